"""Apparent temperature, its local/correlation split, and the heat current.

The bath enters only through its two rates G(+omega) (downward) and
G(-omega) (upward), tied by the KMS ratio G(-omega)/G(omega) =
exp(-omega*beta_B). The apparent inverse temperature of a state,
omega*beta_app = ln(<A A^dag> / <A^dag A>), is what the bath actually
compares against beta_B: the instantaneous heat current is

    dE/dt = 2 omega G(+omega) <A A^dag> (e^{-omega beta_B} - e^{-omega beta_app}),

positive exactly when the state looks colder than the bath. The factor 2
follows the dissipator convention G (2 L rho L^dag - {L^dag L, rho}) used
by the dynamics module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigenops import LadderPair
from .qcore import CorrelationTerm, DensityOperator

# Expectation values below this magnitude are treated as exact zeros when
# forming the log ratio (the +-inf apparent-temperature cases).
EXPECTATION_FLOOR = 1e-14


class DegenerateSplitError(ValueError):
    """The correlation contribution saturates the state boundary (1 + c <= 0)."""


@dataclass(frozen=True)
class BathSpec:
    """Thermal bath: inverse temperature (as omega*beta) and rate scale.

    ``beta_omega`` may be negative (inverted bath) or +inf (zero
    temperature). ``g_plus`` is the downward rate G(+omega) and fixes the
    time unit; the upward rate follows from the KMS ratio.
    """

    beta_omega: float
    g_plus: float = 1.0

    def __post_init__(self):
        if not self.g_plus > 0:
            raise ValueError("g_plus must be positive")
        if math.isnan(self.beta_omega) or self.beta_omega == -math.inf:
            raise ValueError("beta_omega must be a real number or +inf")

    @property
    def g_minus(self) -> float:
        return self.g_plus * math.exp(-self.beta_omega)


@dataclass(frozen=True)
class ApparentTemperature:
    """omega*beta_app = ln(<A A^dag>/<A^dag A>), with the two expectations.

    ``beta_app_omega`` is +inf when the upward weight <A^dag A> vanishes
    (ground-state-like), -inf when the downward weight vanishes (fully
    inverted), and nan when both do (the coupling does not see the state
    at all, e.g. a pure dark state).
    """

    beta_app_omega: float
    aa_dag: float
    adag_a: float


def _positive_expectation(rho: DensityOperator, operator: np.ndarray) -> float:
    value = rho.expectation(operator)
    if value < -1e-12:
        raise ValueError(f"expectation of a positive operator came out {value:.3e}")
    return max(value, 0.0)


def _log_ratio(up: float, down: float) -> float:
    up_zero = up < EXPECTATION_FLOOR
    down_zero = down < EXPECTATION_FLOOR
    if up_zero and down_zero:
        return math.nan
    if down_zero:
        return math.inf
    if up_zero:
        return -math.inf
    return math.log(up / down)


def apparent_temperature(rho: DensityOperator, pair: LadderPair) -> ApparentTemperature:
    """Apparent inverse temperature of ``rho`` as seen through ``pair``."""
    if rho.dim != pair.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, ladder {pair.dim}")
    aa_dag = _positive_expectation(rho, pair.lowering @ pair.raising)
    adag_a = _positive_expectation(rho, pair.raising @ pair.lowering)
    return ApparentTemperature(
        beta_app_omega=_log_ratio(aa_dag, adag_a), aa_dag=aa_dag, adag_a=adag_a
    )


@dataclass(frozen=True)
class TemperatureSplit:
    """Decomposition omega*beta_app = omega*beta_loc + ln((1+c+)/(1+c-))."""

    beta_loc_omega: float
    c_plus: float
    c_minus: float
    beta_app_omega: float


def apparent_temperature_split(
    rho_loc: DensityOperator, chi: CorrelationTerm, pair: LadderPair
) -> TemperatureSplit:
    """Split the apparent temperature of rho_loc + chi into local and
    correlation contributions.

    c- and c+ are the correlation expectations of A^dag A and A A^dag
    normalized by their local (chi = 0) values; the reconstructed
    beta_app_omega equals the direct formula on rho_loc + chi exactly.
    Raises DegenerateSplitError when 1 + c <= 0 (state boundary).
    """
    if rho_loc.dim != chi.dim or rho_loc.dim != pair.dim:
        raise ValueError("rho_loc, chi, and ladder pair must share one dimension")
    aa_dag = pair.lowering @ pair.raising
    adag_a = pair.raising @ pair.lowering
    loc_plus = _positive_expectation(rho_loc, aa_dag)
    loc_minus = _positive_expectation(rho_loc, adag_a)
    if loc_minus < EXPECTATION_FLOOR or loc_plus < EXPECTATION_FLOOR:
        raise DegenerateSplitError("local expectation vanishes; split undefined")
    cor_plus = float(np.trace(chi.matrix @ aa_dag).real)
    cor_minus = float(np.trace(chi.matrix @ adag_a).real)
    c_plus = cor_plus / loc_plus
    c_minus = cor_minus / loc_minus
    if 1.0 + c_plus <= 0 or 1.0 + c_minus <= 0:
        raise DegenerateSplitError(
            f"correlation contribution saturates the state boundary: c+ = {c_plus:.6g}, "
            f"c- = {c_minus:.6g}"
        )
    beta_loc = math.log(loc_plus / loc_minus)
    return TemperatureSplit(
        beta_loc_omega=beta_loc,
        c_plus=c_plus,
        c_minus=c_minus,
        beta_app_omega=beta_loc + math.log((1.0 + c_plus) / (1.0 + c_minus)),
    )


@dataclass(frozen=True)
class CorrelationExpectations:
    """Tr chi A^dag A and Tr chi A A^dag.

    For a genuine inter-subsystem correlation term (all local partial
    traces zero) the two coincide; a single-system coherence block can
    have them differ.
    """

    c_minus: float
    c_plus: float


def correlation_expectations(chi: CorrelationTerm, pair: LadderPair) -> CorrelationExpectations:
    if chi.dim != pair.dim:
        raise ValueError(f"dimension mismatch: chi {chi.dim}, ladder {pair.dim}")
    return CorrelationExpectations(
        c_minus=float(np.trace(chi.matrix @ pair.raising @ pair.lowering).real),
        c_plus=float(np.trace(chi.matrix @ pair.lowering @ pair.raising).real),
    )


def heat_current(rho: DensityOperator, pair: LadderPair, bath: BathSpec) -> float:
    """Instantaneous dE/dt of the system coupled to ``bath`` through ``pair``.

    Computed as 2 omega [G- <A A^dag> - G+ <A^dag A>], the rate-weighted
    balance of upward and downward transitions; algebraically identical to
    the log-ratio form quoted in the module docstring and exactly equal to
    Tr[H drho/dt] under the collective master equation.
    """
    if rho.dim != pair.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, ladder {pair.dim}")
    aa_dag = _positive_expectation(rho, pair.lowering @ pair.raising)
    adag_a = _positive_expectation(rho, pair.raising @ pair.lowering)
    omega = pair.frequency
    return 2.0 * omega * (bath.g_minus * aa_dag - bath.g_plus * adag_a)
