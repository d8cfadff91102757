"""Closed-form heat-flow-reversal thresholds, feasibility bounds, and scans.

Reversal means the instantaneous heat current at t = 0 runs against the
direction set by the bare temperatures; it happens when the correlation
expectation C = Tr chi A^dag A beats a threshold fixed by the two
temperatures. For the two-level pair (C = 2 Re alpha) the threshold becomes
alpha_c; the stronger threshold alpha_p marks *permanent* reversal, i.e.
the steady energy overshooting the initial one against the gradient. Both
thresholds vanish at beta_S = beta_B, where any nonzero correlation drives
a flow (the correlations-to-energy conversion regime).

All formulas are evaluated in forms stable for positive omega*beta (the
x = e^{-w b} parameterization); negative bath temperatures are supported
and flip the inequality directions automatically through the sign of the
threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import pairtls

# Slack used when comparing |alpha_c| against |alpha_p| (both -> 0 at equal
# temperatures, where rounding noise dominates).
_THRESHOLD_ORDER_TOL = 1e-12


class SingularBathError(ValueError):
    """Thresholds are singular at omega*beta_B = 0 (division by e^{w b} - 1)."""


def reversal_condition_general(
    c_correlation: float, loc_adag_a: float, beta_s_omega: float, beta_b_omega: float
) -> bool:
    """Initial-time reversal test for an inter-subsystem correlation C.

    True iff C lies beyond the threshold
    <A^dag A>_loc (e^{w bS} - e^{w bB})/(e^{w bB} - 1) on the threshold's own
    side of zero; for negative beta_B the threshold changes sign, which is
    exactly the stated inversion of the inequality directions. At
    beta_S = beta_B the threshold is 0 and any nonzero C reverses; at
    beta_B = 0 the current is independent of C and nothing can reverse it.
    """
    if loc_adag_a <= 0:
        raise ValueError("loc_adag_a must be positive")
    if beta_b_omega == 0.0:
        return False
    if beta_s_omega == beta_b_omega:
        return c_correlation != 0.0
    threshold = (
        loc_adag_a * math.expm1(beta_s_omega - beta_b_omega) / (-math.expm1(-beta_b_omega))
    )
    if threshold > 0:
        return c_correlation > threshold
    return c_correlation < threshold


def reversal_condition_coherence(
    c_plus: float, c_minus: float, loc_adag_a: float,
    beta_s_omega: float, beta_b_omega: float,
) -> bool:
    """Initial-time reversal test for single-system non-energetic coherences.

    The coherence block enters the two transition weights differently, so
    the correlation scalar C generalizes to the combination
    C^- e^{w bB} - C^+, compared against <A^dag A>_loc (e^{w bS} - e^{w bB})
    (the chain inequality and its mirror, rederived from the heat current;
    with C^+ = C^- it reduces exactly to the inter-subsystem condition).
    """
    if loc_adag_a <= 0:
        raise ValueError("loc_adag_a must be positive")
    # Both sides of the chain inequality scaled by e^{-w bB}.
    drive = c_minus - c_plus * math.exp(-beta_b_omega)
    threshold = loc_adag_a * math.expm1(beta_s_omega - beta_b_omega)
    if threshold > 0:
        return drive > threshold
    if threshold < 0:
        return drive < threshold
    return drive != 0.0


def alpha_critical(beta_s_omega: float, beta_b_omega: float) -> float:
    """Threshold Re alpha for initial reversal on the pair.

    alpha_c = (e^{w bS} - e^{w bB}) / ((e^{w bS} + 1)(e^{w bB} - 1)); Re alpha
    beyond it (on its own side of zero) reverses the t = 0 heat flow.
    Returns exactly 0 at beta_S = beta_B; singular at beta_B = 0.
    """
    if beta_s_omega == beta_b_omega:
        return 0.0
    if beta_b_omega == 0.0:
        raise SingularBathError("alpha_c is singular at omega*beta_B = 0")
    x = math.exp(-beta_s_omega)
    y = math.exp(-beta_b_omega)
    return (y - x) / ((1.0 + x) * (1.0 - y))


def alpha_permanent(beta_s_omega: float, beta_b_omega: float) -> float:
    """Threshold Re alpha for permanent reversal (steady vs initial energy).

    alpha_p = z(bB) (1+e^{-w bB})/(1-e^{-w bB}) (1-e^{-w bS})/(1+e^{-w bS})
    - z(bS); beyond it the steady energy overshoots the initial energy
    against the temperature gradient. Exactly 0 at beta_S = beta_B;
    singular at beta_B = 0.
    """
    if beta_s_omega == beta_b_omega:
        return 0.0
    if beta_b_omega == 0.0:
        raise SingularBathError("alpha_p is singular at omega*beta_B = 0")
    x = math.exp(-beta_s_omega)
    y = math.exp(-beta_b_omega)
    return (
        pairtls.z_factor(beta_b_omega) * ((1.0 + y) / (1.0 - y)) * ((1.0 - x) / (1.0 + x))
        - pairtls.z_factor(beta_s_omega)
    )


def alpha_bound(beta_s_omega: float) -> float:
    """Positivity bound on |alpha|: e^{-w bS}/Z(beta_S)."""
    return pairtls.alpha_max(beta_s_omega)


@dataclass(frozen=True)
class FeasibilityBounds:
    """Bath-temperature window within which internal correlations can reverse.

    ``min_beta_b_omega_for_heating_reversal``: for a colder system
    (T_S < T_B) the bath must satisfy w bB >= w bS - ln[(1+2e^{w bS})/(2+e^{w bS})]
    (the log correction lies in [0, ln 2]); this bound is tight. For a hotter
    system, ``max_beta_b_omega_for_cooling_reversal`` gives the necessary
    bound w bB <= 2 w bS + ln(1 + 2 e^{-w bS}). Outside the positive-
    temperature regime the bounds do not apply and both fields are nan.
    """

    min_beta_b_omega_for_heating_reversal: float
    max_beta_b_omega_for_cooling_reversal: float
    applicable: bool


def feasibility_log_correction(beta_s_omega: float) -> float:
    """ln[(1 + 2 e^{w bS})/(2 + e^{w bS})], monotonically filling [0, ln 2]."""
    x = math.exp(-beta_s_omega)
    return math.log((x + 2.0) / (2.0 * x + 1.0))


def feasibility_bounds(beta_s_omega: float) -> FeasibilityBounds:
    if beta_s_omega < 0:
        return FeasibilityBounds(math.nan, math.nan, applicable=False)
    return FeasibilityBounds(
        min_beta_b_omega_for_heating_reversal=(
            beta_s_omega - feasibility_log_correction(beta_s_omega)
        ),
        max_beta_b_omega_for_cooling_reversal=(
            2.0 * beta_s_omega + math.log1p(2.0 * math.exp(-beta_s_omega))
        ),
        applicable=True,
    )


@dataclass(frozen=True)
class ReversalVerdict:
    """Thresholds and verdicts for one (beta_S, beta_B, Re alpha) point."""

    initial_reversal: bool
    permanent_reversal: bool
    alpha_c: float
    alpha_p: float
    alpha_max: float
    feasible: bool

    def __post_init__(self):
        if math.isfinite(self.alpha_c) and math.isfinite(self.alpha_p):
            if abs(self.alpha_c) > abs(self.alpha_p) + _THRESHOLD_ORDER_TOL:
                raise ValueError(
                    f"threshold ordering violated: |alpha_c| = {abs(self.alpha_c):.3e} "
                    f"> |alpha_p| = {abs(self.alpha_p):.3e}"
                )


def _loc_adag_a(beta_s_omega: float) -> float:
    # <S+ S->_loc = 2/(1 + e^{w bS}) for the thermal pair.
    return 2.0 * math.exp(-beta_s_omega) / (1.0 + math.exp(-beta_s_omega))


def verdict(beta_s_omega: float, beta_b_omega: float, re_alpha: float) -> ReversalVerdict:
    """Full reversal verdict for a pair configuration.

    ``feasible`` asks whether any allowed alpha could reverse the initial
    flow: |alpha_c| strictly below the positivity bound. Permanent reversal
    is decided from the closed-form steady energy: Re alpha beyond alpha_p
    on alpha_p's side (at equal temperatures, any nonzero Re alpha converts
    correlations to energy, except at beta_B = 0 where the steady energy is
    pinned).
    """
    bound = pairtls.alpha_max(beta_s_omega)
    try:
        a_c = alpha_critical(beta_s_omega, beta_b_omega)
        a_p = alpha_permanent(beta_s_omega, beta_b_omega)
    except SingularBathError:
        return ReversalVerdict(
            initial_reversal=False,
            permanent_reversal=False,
            alpha_c=math.nan,
            alpha_p=math.nan,
            alpha_max=bound,
            feasible=False,
        )
    initial = reversal_condition_general(
        2.0 * re_alpha, _loc_adag_a(beta_s_omega), beta_s_omega, beta_b_omega
    )
    if a_p == 0.0:
        permanent = re_alpha != 0.0 and beta_b_omega != 0.0
    else:
        permanent = (re_alpha - a_p) * a_p > 0.0
    return ReversalVerdict(
        initial_reversal=initial,
        permanent_reversal=permanent,
        alpha_c=a_c,
        alpha_p=a_p,
        alpha_max=bound,
        feasible=abs(a_c) < bound,
    )


# --- parameter scans ---------------------------------------------------

SCAN_CSV_COLUMNS = (
    "beta_S_omega",
    "beta_B_omega",
    "re_alpha",
    "alpha_c",
    "alpha_p",
    "alpha_max",
    "initial_reversal",
    "permanent_reversal",
    "delta_E_over_omega",
    "delta_S",
)


@dataclass(frozen=True)
class ScanCell:
    beta_s_omega: float
    beta_b_omega: float
    re_alpha: float
    alpha_c: float
    alpha_p: float
    alpha_max: float
    initial_reversal: bool
    permanent_reversal: bool
    delta_e_over_omega: float
    delta_s: float


def _policy_alphas(policy, beta_s_omega: float) -> tuple[float, ...]:
    if isinstance(policy, str):
        if policy == "min":
            return (-pairtls.alpha_max(beta_s_omega),)
        if policy == "max":
            return (pairtls.alpha_max(beta_s_omega),)
        if policy == "zero":
            return (0.0,)
        raise ValueError(f"unknown alpha policy {policy!r}")
    return tuple(float(v) for v in policy)


def _cell(beta_s: float, beta_b: float, re_alpha: float) -> ScanCell:
    v = verdict(beta_s, beta_b, re_alpha)
    r = pairtls.z_factor(beta_s) + re_alpha
    delta_e = pairtls.steady_energy(beta_s, beta_b, re_alpha) - pairtls.initial_energy(beta_s)
    delta_s = pairtls.steady_entropy(beta_b, r) - pairtls.initial_entropy(beta_s, abs(re_alpha))
    return ScanCell(
        beta_s_omega=beta_s,
        beta_b_omega=beta_b,
        re_alpha=re_alpha,
        alpha_c=v.alpha_c,
        alpha_p=v.alpha_p,
        alpha_max=v.alpha_max,
        initial_reversal=v.initial_reversal,
        permanent_reversal=v.permanent_reversal,
        delta_e_over_omega=delta_e,
        delta_s=delta_s,
    )


def scan_region(
    beta_s_values: Sequence[float] | None,
    beta_b_values: Sequence[float],
    alpha_policy="zero",
    diag: bool = False,
) -> list[ScanCell]:
    """Evaluate the closed forms over a temperature/correlation grid.

    Row-major ordering over (beta_S, beta_B, alpha); with ``diag=True`` the
    system temperature tracks the bath one (beta_S = beta_B along
    ``beta_b_values``) and ``beta_s_values`` must be omitted. ``alpha_policy``
    is "min"/"max" (the reversing extremes +-alpha_max(beta_S)), "zero", or
    an explicit sequence of Re alpha values applied at every grid point.
    """
    cells: list[ScanCell] = []
    if diag:
        if beta_s_values is not None:
            raise ValueError("diagonal scans take only beta_b_values")
        for b in beta_b_values:
            for ra in _policy_alphas(alpha_policy, float(b)):
                cells.append(_cell(float(b), float(b), ra))
        return cells
    if beta_s_values is None:
        raise ValueError("beta_s_values required for a rectangular scan")
    for a in beta_s_values:
        for b in beta_b_values:
            for ra in _policy_alphas(alpha_policy, float(a)):
                cells.append(_cell(float(a), float(b), ra))
    return cells


def write_scan_csv(cells: Iterable[ScanCell], stream) -> None:
    """Fixed-schema scan CSV; booleans as 1/0, floats at 17 significant digits."""
    from .dynamics import format_float

    stream.write(",".join(SCAN_CSV_COLUMNS) + "\n")
    for c in cells:
        row = [
            format_float(c.beta_s_omega),
            format_float(c.beta_b_omega),
            format_float(c.re_alpha),
            format_float(c.alpha_c),
            format_float(c.alpha_p),
            format_float(c.alpha_max),
            "1" if c.initial_reversal else "0",
            "1" if c.permanent_reversal else "0",
            format_float(c.delta_e_over_omega),
            format_float(c.delta_s),
        ]
        stream.write(",".join(row) + "\n")
