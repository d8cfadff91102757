"""Time evolution: generic Lindblad integrator and exact collective-pair solvers.

The master equation used everywhere is, in the interaction picture,

    drho/dt = -i[H_eff, rho]
              + G+ (2 L rho L^dag - L^dag L rho - rho L^dag L)
              + G- (2 L^dag rho L - L L^dag rho - rho L L^dag)

summed over the lowering operators L: a single collective S- for
indistinguishable coupling, or one local sigma_i^- per subsystem for
independent baths. H_eff holds the optional Lamb shift and exchange
interaction (both default 0; they move coherence phases, never
populations).

For the two-level pair the collective equation is solved in closed form in
the basis (psi_0, psi_+, psi_1, psi_-): the dark-state population is frozen,
the triplet populations diagonalize into two decaying modes q+- with rates
a+- = 4[+-sqrt(G+ G-) - G+ - G-], and the coherence sector splits into four
independent decays plus one coupled 2x2 block. The generic integrator is an
explicit adaptive RK4 with step doubling (local tolerance 1e-10 by
default), deterministic given its inputs, and serves as the independent
numerical check on the analytic solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import pairtls
from .qcore import (
    DensityOperator,
    PositivityError,
    partial_trace,
    relative_entropy,
    von_neumann_entropy,
    mutual_information,
    validate_density,
)
from .thermo import BathSpec

DEFAULT_ODE_TOL = 1e-10
# Beyond this negative eigenvalue the integration is declared unstable.
INSTABILITY_EIG = 1e-7
# Trajectory states are validated at this tolerance after integration.
TRAJECTORY_ATOL = 1e-9

_CSV_COLUMNS = (
    "t",
    "E_over_omega",
    "beta_app_omega",
    "p0",
    "pplus",
    "pminus",
    "p1",
    "S_S",
    "S_S1",
    "S_S2",
    "I_S1S2",
    "relent_S1",
    "relent_S2",
    "identity_residual",
)


class IntegrationUnstableError(RuntimeError):
    """The integrator lost positivity (or could not meet the tolerance)."""


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """A Lindblad generator: rates, lowering operators, optional Hamiltonian.

    ``coupling_mode`` records whether the lowering operators form one
    collective jump or per-subsystem local jumps (the latter requires a
    ``tensor_layout``). Rates may be zero (a zero-temperature bath has
    G- = 0) but not negative.
    """

    g_plus: float
    g_minus: float
    lowering_ops: tuple[np.ndarray, ...]
    coupling_mode: str
    h_eff: np.ndarray | None = None
    tensor_layout: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.g_plus < 0 or self.g_minus < 0:
            raise ValueError("rates must be non-negative")
        if self.coupling_mode not in ("collective", "independent"):
            raise ValueError(f"unknown coupling mode {self.coupling_mode!r}")
        if self.coupling_mode == "independent" and self.tensor_layout is None:
            raise ValueError("independent coupling requires a tensor_layout")
        if not self.lowering_ops:
            raise ValueError("at least one lowering operator is required")

    @property
    def dim(self) -> int:
        return self.lowering_ops[0].shape[0]

    @classmethod
    def collective(cls, lowering: np.ndarray, bath: BathSpec, h_eff=None,
                   tensor_layout=None) -> "GeneratorSpec":
        return cls(
            g_plus=bath.g_plus,
            g_minus=bath.g_minus,
            lowering_ops=(np.asarray(lowering, dtype=complex),),
            coupling_mode="collective",
            h_eff=None if h_eff is None else np.asarray(h_eff, dtype=complex),
            tensor_layout=tensor_layout,
        )

    @classmethod
    def independent(cls, local_lowerings, bath: BathSpec, tensor_layout,
                    h_eff=None) -> "GeneratorSpec":
        return cls(
            g_plus=bath.g_plus,
            g_minus=bath.g_minus,
            lowering_ops=tuple(np.asarray(op, dtype=complex) for op in local_lowerings),
            coupling_mode="independent",
            h_eff=None if h_eff is None else np.asarray(h_eff, dtype=complex),
            tensor_layout=tuple(tensor_layout),
        )


def pair_generator(bath: BathSpec, mode: str = "collective",
                   lamb_shift: float = 0.0, exchange: float = 0.0) -> GeneratorSpec:
    """Generator for the two-level pair, collective or independent."""
    h_eff = None
    if lamb_shift != 0.0 or exchange != 0.0:
        s1, s2 = pairtls.local_lowerings()
        number = s1.conj().T @ s1 + s2.conj().T @ s2
        swap = s1.conj().T @ s2 + s2.conj().T @ s1
        h_eff = lamb_shift * number + exchange * swap
    if mode == "collective":
        return GeneratorSpec.collective(
            pairtls.collective_lowering(), bath, h_eff=h_eff,
            tensor_layout=pairtls.PAIR_LAYOUT,
        )
    if mode == "independent":
        return GeneratorSpec.independent(
            pairtls.local_lowerings(), bath, tensor_layout=pairtls.PAIR_LAYOUT,
            h_eff=h_eff,
        )
    raise ValueError(f"unknown mode {mode!r}")


def _compiled_terms(gen: GeneratorSpec):
    terms = []
    for low in gen.lowering_ops:
        raise_ = low.conj().T
        terms.append((low, raise_, raise_ @ low, low @ raise_))
    return terms


def _rhs(y: np.ndarray, gen: GeneratorSpec, terms) -> np.ndarray:
    out = np.zeros_like(y)
    if gen.h_eff is not None:
        out += -1j * (gen.h_eff @ y - y @ gen.h_eff)
    for low, raise_, ldl, lld in terms:
        out += gen.g_plus * (2.0 * (low @ y @ raise_) - ldl @ y - y @ ldl)
        out += gen.g_minus * (2.0 * (raise_ @ y @ low) - lld @ y - y @ lld)
    return out


def lindblad_rhs(rho: DensityOperator, gen: GeneratorSpec) -> np.ndarray:
    """drho/dt for state ``rho`` under ``gen`` (traceless Hermitian matrix)."""
    if rho.dim != gen.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, generator {gen.dim}")
    return _rhs(rho.matrix, gen, _compiled_terms(gen))


@dataclass
class Trajectory:
    """Times, states, and (optionally) per-time derived observables."""

    times: np.ndarray
    states: list[DensityOperator]
    records: list["TrajectoryRecord"] | None = field(default=None)


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("t_grid must be a non-empty 1-d sequence")
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be increasing and start at t >= 0")
    return t


def _rk4_step(y, h, gen, terms):
    k1 = _rhs(y, gen, terms)
    k2 = _rhs(y + 0.5 * h * k1, gen, terms)
    k3 = _rhs(y + 0.5 * h * k2, gen, terms)
    k4 = _rhs(y + h * k3, gen, terms)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _advance(y, t0, t1, h, gen, terms, tol):
    """Adaptive step-doubled RK4 from t0 to t1; returns (state, carried h)."""
    t = t0
    span = t1 - t0
    min_h = max(1e-13 * max(t1, 1.0), 1e-15)
    while t < t1 - 1e-12 * max(t1, 1.0):
        h = min(h, t1 - t)
        full = _rk4_step(y, h, gen, terms)
        half = _rk4_step(_rk4_step(y, 0.5 * h, gen, terms), 0.5 * h, gen, terms)
        err = float(np.abs(half - full).max()) / 15.0
        if err <= tol:
            # Local extrapolation: the doubled step is 5th-order accurate.
            y = half + (half - full) / 15.0
            t += h
            factor = 4.0 if err == 0.0 else min(4.0, 0.9 * (tol / err) ** 0.2)
            h *= factor
        else:
            h *= max(0.2, 0.9 * (tol / err) ** 0.2)
            if h < min_h:
                raise IntegrationUnstableError(
                    f"step size underflow at t = {t:.6g} (h = {h:.3e})"
                )
        h = min(h, span) if span > 0 else h
    return y, h


def _as_trajectory_state(y: np.ndarray, layout) -> DensityOperator:
    verdict = validate_density(y, atol=INSTABILITY_EIG)
    if not verdict.ok:
        raise IntegrationUnstableError(
            "integrated state left the density-operator manifold: "
            + "; ".join(verdict.violations)
        )
    return DensityOperator(y, tensor_layout=layout, atol=INSTABILITY_EIG)


def integrate(rho0: DensityOperator, gen: GeneratorSpec, t_grid,
              tol: float = DEFAULT_ODE_TOL) -> Trajectory:
    """Numerically evolve ``rho0`` along ``t_grid`` (increasing from 0).

    Adaptive RK4 with step doubling keeps the local error per step below
    ``tol``; the grid points are hit exactly. Raises IntegrationUnstableError
    if positivity degrades beyond 1e-7.
    """
    t = _check_grid(t_grid)
    if t[0] != 0.0:
        raise ValueError("t_grid must start at 0")
    if rho0.dim != gen.dim:
        raise ValueError(f"dimension mismatch: state {rho0.dim}, generator {gen.dim}")
    terms = _compiled_terms(gen)
    rate_scale = max(gen.g_plus + gen.g_minus, 1e-6)
    h = 0.05 / rate_scale
    y = np.array(rho0.matrix, dtype=complex)
    states = [rho0]
    for i in range(1, t.size):
        y, h = _advance(y, float(t[i - 1]), float(t[i]), h, gen, terms, tol)
        states.append(_as_trajectory_state(y, rho0.tensor_layout))
    return Trajectory(times=t, states=states)


def relax_to_steady(rho0: DensityOperator, gen: GeneratorSpec,
                    tol: float = DEFAULT_ODE_TOL, rhs_tol: float = 1e-12,
                    t_cap: float | None = None):
    """Integrate until max|drho/dt| < rhs_tol or t exceeds 50/G+ (or t_cap).

    Returns (state, t_stop, reason) with reason "rhs_converged" or "t_cap".
    """
    terms = _compiled_terms(gen)
    if t_cap is None:
        t_cap = 50.0 / max(gen.g_plus, 1e-12)
    rate_scale = max(gen.g_plus + gen.g_minus, 1e-6)
    h = 0.05 / rate_scale
    chunk = 1.0 / rate_scale
    y = np.array(rho0.matrix, dtype=complex)
    t = 0.0
    while True:
        if float(np.abs(_rhs(y, gen, terms)).max()) < rhs_tol:
            return _as_trajectory_state(y, rho0.tensor_layout), t, "rhs_converged"
        if t >= t_cap:
            return _as_trajectory_state(y, rho0.tensor_layout), t, "t_cap"
        step_to = min(t + chunk, t_cap)
        y, h = _advance(y, t, step_to, h, gen, terms, tol)
        t = step_to


# --- exact collective-pair solution ----------------------------------------

def collective_decay_rates(g_plus: float, g_minus: float) -> tuple[float, float]:
    """Population decay rates a+- = 4[+-sqrt(G+ G-) - G+ - G-]."""
    root = math.sqrt(g_plus * g_minus)
    return 4.0 * (root - g_plus - g_minus), 4.0 * (-root - g_plus - g_minus)


def _psi_energies(lamb_shift: float, exchange: float) -> tuple[float, float, float, float]:
    # (E_psi0, E_psi+, E_psi1, E_psi-) of H_eff in the collective basis.
    return 0.0, lamb_shift + exchange, 2.0 * lamb_shift, lamb_shift - exchange


def propagate_pair_psi(rho_psi0: np.ndarray, g_plus: float, g_minus: float,
                       t: float, energies=(0.0, 0.0, 0.0, 0.0)) -> np.ndarray:
    """Exact collective-pair propagation of a collective-basis matrix.

    Index order (psi_0, psi_+, psi_1, psi_-). Populations evolve through the
    q+- modes with the dark state frozen; each coherence picks up its closed
    decay (and H_eff phase), with the (psi_1 psi_+, psi_+ psi_0) block solved
    as a coupled 2x2 linear system. Requires G- > 0: the q+- change of
    variables degenerates at exactly zero upward rate (use the numerical
    integrator for a zero-temperature bath).
    """
    if g_minus <= 0 or g_plus <= 0:
        raise ValueError("analytic pair propagation requires strictly positive rates")
    e0, ep, e1, em = energies
    p0_0 = float(rho_psi0[0, 0].real)
    pp_0 = float(rho_psi0[1, 1].real)
    p1_0 = float(rho_psi0[2, 2].real)
    pm_0 = float(rho_psi0[3, 3].real)
    r = p0_0 + pp_0 + p1_0

    k = math.sqrt(g_minus / g_plus)
    a_plus, a_minus = collective_decay_rates(g_plus, g_minus)
    q_plus0 = pp_0 + (1.0 + k) * p0_0
    q_minus0 = pp_0 + (1.0 - k) * p0_0
    exp_p = math.exp(a_plus * t)
    exp_m = math.exp(a_minus * t)
    q_plus = exp_p * q_plus0 + 4.0 * g_plus * r * (exp_p - 1.0) / a_plus
    q_minus = exp_m * q_minus0 + 4.0 * g_plus * r * (exp_m - 1.0) / a_minus

    p0 = (q_plus - q_minus) / (2.0 * k)
    pp = 0.5 * (q_plus + q_minus) - p0
    p1 = r - p0 - pp

    out = np.zeros((4, 4), dtype=complex)
    out[0, 0], out[1, 1], out[2, 2], out[3, 3] = p0, pp, p1, pm_0

    def decay(i, j, rate):
        value = rho_psi0[i, j] * np.exp(-(rate + 1j * (energies[i] - energies[j])) * t)
        out[i, j] = value
        out[j, i] = np.conj(value)

    decay(1, 3, 2.0 * (g_plus + g_minus))   # psi_+ psi_-
    decay(2, 3, 2.0 * g_plus)               # psi_1 psi_-
    decay(0, 3, 2.0 * g_minus)              # psi_0 psi_-
    decay(2, 0, 2.0 * (g_plus + g_minus))   # psi_1 psi_0

    # Coupled block (rho_{1+}, rho_{+0}).
    block = np.array(
        [
            [-2.0 * (2.0 * g_plus + g_minus) - 1j * (e1 - ep), 4.0 * g_minus],
            [4.0 * g_plus, -2.0 * (g_plus + 2.0 * g_minus) - 1j * (ep - e0)],
        ],
        dtype=complex,
    )
    v0 = np.array([rho_psi0[2, 1], rho_psi0[1, 0]], dtype=complex)
    if np.abs(v0).max() > 0.0:
        eigvals, eigvecs = np.linalg.eig(block)
        coeffs = np.linalg.solve(eigvecs, v0)
        vt = eigvecs @ (np.exp(eigvals * t) * coeffs)
        out[2, 1] = vt[0]
        out[1, 2] = np.conj(vt[0])
        out[1, 0] = vt[1]
        out[0, 1] = np.conj(vt[1])
    return out


def analytic_pair_trajectory(cfg: pairtls.PairConfig, bath: BathSpec, t_grid,
                             lamb_shift: float = 0.0,
                             exchange: float = 0.0) -> Trajectory:
    """Closed-form collective evolution of the initial pair state."""
    t = _check_grid(t_grid)
    rho0 = pairtls.pair_initial_state(cfg)
    rho_psi0 = pairtls.to_psi_basis(rho0.matrix)
    energies = _psi_energies(lamb_shift, exchange)
    states = []
    for ti in t:
        psi_t = propagate_pair_psi(rho_psi0, bath.g_plus, bath.g_minus, float(ti), energies)
        states.append(
            DensityOperator(pairtls.from_psi_basis(psi_t),
                            tensor_layout=pairtls.PAIR_LAYOUT, atol=TRAJECTORY_ATOL)
        )
    return Trajectory(times=t, states=states)


def analytic_steady_populations(cfg: pairtls.PairConfig, bath: BathSpec):
    """(p0, p+, p1, p-) in the t -> inf limit of the q+- solution.

    An independent route to the steady state: the closed-form trajectory
    limit rather than the detailed-balance weights.
    """
    r = cfg.r_constant
    g_plus, g_minus = bath.g_plus, bath.g_minus
    if g_minus <= 0:
        raise ValueError("steady populations via q-modes require G- > 0")
    k = math.sqrt(g_minus / g_plus)
    a_plus, a_minus = collective_decay_rates(g_plus, g_minus)
    q_plus = -4.0 * g_plus * r / a_plus
    q_minus = -4.0 * g_plus * r / a_minus
    p0 = (q_plus - q_minus) / (2.0 * k)
    pp = 0.5 * (q_plus + q_minus) - p0
    p1 = r - p0 - pp
    return p0, pp, p1, 1.0 - r


def independent_pair_trajectory(cfg: pairtls.PairConfig, bath: BathSpec,
                                t_grid) -> Trajectory:
    """Closed-form evolution under independent local dissipation.

    Each qubit relaxes exponentially at rate 2(G+ + G-) toward the bath
    thermal occupation, so the energy never sees alpha; the correlation
    coherence decays at the same total rate without feeding back.
    """
    t = _check_grid(t_grid)
    g_plus, g_minus = bath.g_plus, bath.g_minus
    rate = 2.0 * (g_plus + g_minus)
    x = math.exp(-cfg.beta_s_omega)
    pe_0 = x / (1.0 + x)
    pe_inf = g_minus / (g_plus + g_minus) if g_plus + g_minus > 0 else pe_0
    alpha = complex(cfg.alpha)
    states = []
    for ti in t:
        damp = math.exp(-rate * float(ti))
        pe = pe_inf + (pe_0 - pe_inf) * damp
        local = np.diag([1.0 - pe, pe]).astype(complex)
        rho = np.kron(local, local)
        rho[1, 2] += alpha * damp
        rho[2, 1] += np.conj(alpha) * damp
        states.append(DensityOperator(rho, tensor_layout=pairtls.PAIR_LAYOUT,
                                      atol=TRAJECTORY_ATOL))
    return Trajectory(times=t, states=states)


# --- derived observables -----------------------------------------------

@dataclass(frozen=True)
class TrajectoryRecord:
    """One CSV row of derived observables along a pair trajectory."""

    t: float
    e_over_omega: float
    beta_app_omega: float
    p0: float
    pplus: float
    pminus: float
    p1: float
    s_s: float
    s_s1: float
    s_s2: float
    i_s1s2: float
    relent_s1: float
    relent_s2: float
    identity_residual: float


def _log_population_ratio(up: float, down: float) -> float:
    if up < 1e-14 and down < 1e-14:
        return math.nan
    if down < 1e-14:
        return math.inf
    if up < 1e-14:
        return -math.inf
    return math.log(up / down)


def trajectory_observables(traj: Trajectory, beta_s_omega: float,
                           beta_b_omega: float) -> list[TrajectoryRecord]:
    """Populations, energies, entropies, and identity residuals per time.

    The apparent temperature uses the population form
    omega*beta_app = ln[(p0 + p+)/(p1 + p+)]. relent_Si is the relative
    entropy of the local state against its initial thermal state at beta_S,
    and identity_residual is the worst per-subsystem defect of
    relent + Delta S_i - beta_S Delta E_i = 0 (exact for thermal initial
    locals). ``beta_b_omega`` is part of the reporting contract but no
    system-side record depends on it (the bath state is traced out). The
    records are attached to ``traj.records`` and returned.
    """
    if traj.states and traj.states[0].tensor_layout != pairtls.PAIR_LAYOUT:
        raise ValueError("trajectory observables are defined for the (2, 2) pair layout")
    x = math.exp(-beta_s_omega)
    pe_ref = x / (1.0 + x)
    ref_local = DensityOperator(np.diag([1.0 - pe_ref, pe_ref]).astype(complex))
    s_ref = von_neumann_entropy(ref_local)
    records = []
    for ti, state in zip(traj.times, traj.states):
        psi = pairtls.to_psi_basis(state.matrix)
        p0, pp, p1, pm = (max(float(psi[i, i].real), 0.0) for i in range(4))
        energy = 2.0 * p1 + pp + pm
        beta_app = _log_population_ratio(p0 + pp, p1 + pp)
        locals_ = [partial_trace(state, keep=(i,)) for i in (0, 1)]
        relents = []
        residuals = []
        for loc in locals_:
            rel = relative_entropy(loc, ref_local)
            pe = float(loc.matrix[1, 1].real)
            residual = abs(rel + (von_neumann_entropy(loc) - s_ref)
                           - beta_s_omega * (pe - pe_ref))
            relents.append(rel)
            residuals.append(residual)
        records.append(
            TrajectoryRecord(
                t=float(ti),
                e_over_omega=energy,
                beta_app_omega=beta_app,
                p0=p0,
                pplus=pp,
                pminus=pm,
                p1=p1,
                s_s=von_neumann_entropy(state),
                s_s1=von_neumann_entropy(locals_[0]),
                s_s2=von_neumann_entropy(locals_[1]),
                i_s1s2=mutual_information(state),
                relent_s1=relents[0],
                relent_s2=relents[1],
                identity_residual=max(residuals),
            )
        )
    traj.records = records
    return records


def format_float(value: float) -> str:
    """17-significant-digit decimal, enough to round-trip a double exactly."""
    return format(value, ".17g")


def write_trajectory_csv(traj: Trajectory, stream) -> None:
    """Emit the fixed-schema trajectory CSV (records must be attached)."""
    if traj.records is None:
        raise ValueError("trajectory has no records; run trajectory_observables first")
    stream.write(",".join(_CSV_COLUMNS) + "\n")
    for rec in traj.records:
        row = (
            rec.t, rec.e_over_omega, rec.beta_app_omega,
            rec.p0, rec.pplus, rec.pminus, rec.p1,
            rec.s_s, rec.s_s1, rec.s_s2, rec.i_s1s2,
            rec.relent_s1, rec.relent_s2, rec.identity_residual,
        )
        stream.write(",".join(format_float(v) for v in row) + "\n")
