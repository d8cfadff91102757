"""Closed forms for a pair of two-level systems under collective dissipation.

The pair has Hamiltonian H = omega (n_1 + n_2) and couples to the bath
through the collective ladder operators S+- = sigma_1^+- + sigma_2^+-.
States of interest are a thermal product at inverse temperature beta_S
upgraded by a correlation term

    chi = alpha |01><10| + conj(alpha) |10><01|,

whose real part shifts the symmetric-state population and whose modulus is
bounded by the positivity limit alpha_max = e^{-w b}/Z(b). In the collective
basis {psi_0, psi_+, psi_1, psi_-} (psi_+- = (|01> +- |10>)/sqrt 2) the
dissipation acts only on the triplet ladder psi_0 <-> psi_+ <-> psi_1; the
dark-state population p_- is frozen, which makes r = p_0 + p_+ + p_1 a
constant of motion and yields closed forms for every steady quantity.

All energies are reported in units of omega, all temperatures as the
dimensionless products omega*beta.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .eigenops import LadderPair
from .qcore import CorrelationTerm, DensityOperator, HermitianObservable, PositivityError

# Slack on the |alpha| <= alpha_max positivity bound.
ALPHA_BOUND_TOL = 1e-12

PAIR_LAYOUT = (2, 2)

# Computational basis order |00>, |01>, |10>, |11>.
_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)

# Collective basis columns (psi_0, psi_+, psi_1, psi_-) in the computational
# basis; PSI_ORDER documents the index convention used everywhere.
PSI_ORDER = ("psi0", "psi_plus", "psi1", "psi_minus")
_S = 1.0 / math.sqrt(2.0)
PSI_BASIS = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, _S, 0.0, _S],
        [0.0, _S, 0.0, -_S],
        [0.0, 0.0, 1.0, 0.0],
    ],
    dtype=complex,
)


def partition_function(beta_s_omega: float) -> float:
    """Z(beta) = (1 + e^{-w b})^2 for the non-interacting pair."""
    return (1.0 + math.exp(-beta_s_omega)) ** 2


def z_factor(beta_s_omega: float) -> float:
    """z(beta) = (1 + e^{-w b} + e^{-2 w b}) / Z(beta), the thermal triplet weight."""
    x = math.exp(-beta_s_omega)
    return (1.0 + x + x * x) / partition_function(beta_s_omega)


def alpha_max(beta_s_omega: float) -> float:
    """Positivity bound on |alpha|: e^{-w b}/Z(beta) = x/(1+x)^2."""
    x = math.exp(-beta_s_omega)
    return x / (1.0 + x) ** 2


def initial_energy(beta_s_omega: float) -> float:
    """Thermal pair energy E/omega = 2 e^{-w b}/(1 + e^{-w b}); the
    correlation term is traceless against H and adds nothing."""
    x = math.exp(-beta_s_omega)
    return 2.0 * x / (1.0 + x)


def pair_hamiltonian() -> HermitianObservable:
    """H/omega = n_1 + n_2 = diag(0, 1, 1, 2)."""
    return HermitianObservable(np.diag([0.0, 1.0, 1.0, 2.0]).astype(complex))


def collective_lowering() -> np.ndarray:
    """S- = sigma_1^- + sigma_2^- in the computational basis."""
    return np.kron(_SIGMA_MINUS, _I2) + np.kron(_I2, _SIGMA_MINUS)


def collective_coupling() -> HermitianObservable:
    """The coupling observable A = S+ + S- (collective x coupling)."""
    sm = collective_lowering()
    return HermitianObservable(sm + sm.conj().T)


def collective_ladder() -> LadderPair:
    """The pair's single eigenoperator pair: A = S- at frequency omega = 1."""
    return LadderPair(frequency=1.0, lowering=collective_lowering())


def local_lowerings() -> tuple[np.ndarray, np.ndarray]:
    """(sigma_1^-, sigma_2^-) embedded in the pair space."""
    return np.kron(_SIGMA_MINUS, _I2), np.kron(_I2, _SIGMA_MINUS)


def to_psi_basis(matrix: np.ndarray) -> np.ndarray:
    """Conjugate a computational-basis matrix into the collective basis."""
    return PSI_BASIS.conj().T @ matrix @ PSI_BASIS


def from_psi_basis(matrix: np.ndarray) -> np.ndarray:
    return PSI_BASIS @ matrix @ PSI_BASIS.conj().T


@dataclass(frozen=True)
class PairConfig:
    """Initial pair parameters: thermal omega*beta_S plus correlation alpha."""

    beta_s_omega: float
    alpha: complex = 0.0

    def __post_init__(self):
        bound = alpha_max(self.beta_s_omega)
        if abs(self.alpha) > bound + ALPHA_BOUND_TOL:
            x = math.exp(-self.beta_s_omega)
            min_eig = x / partition_function(self.beta_s_omega) - abs(self.alpha)
            raise PositivityError(
                min_eig,
                f"|alpha| = {abs(self.alpha):.6g} exceeds the positivity bound "
                f"{bound:.6g} at omega*beta_S = {self.beta_s_omega:g} "
                f"(min eigenvalue {min_eig:.3e})",
            )

    @property
    def phi(self) -> float:
        """Phase arg(alpha); irrelevant to every energy observable."""
        return cmath.phase(complex(self.alpha))

    @property
    def r_constant(self) -> float:
        """Triplet weight r = z(beta_S) + Re alpha, conserved by the dynamics."""
        return z_factor(self.beta_s_omega) + complex(self.alpha).real


def pair_thermal_state(beta_s_omega: float) -> DensityOperator:
    """Product thermal state at beta_S (the alpha = 0 initial state)."""
    x = math.exp(-beta_s_omega)
    diag = np.array([1.0, x, x, x * x], dtype=complex) / partition_function(beta_s_omega)
    return DensityOperator(np.diag(diag), tensor_layout=PAIR_LAYOUT)


def pair_correlation_term(alpha: complex) -> CorrelationTerm:
    """chi = alpha |01><10| + conj(alpha)|10><01|."""
    chi = np.zeros((4, 4), dtype=complex)
    chi[1, 2] = alpha
    chi[2, 1] = np.conj(alpha)
    return CorrelationTerm(chi, tensor_layout=PAIR_LAYOUT)


def pair_initial_state(cfg: PairConfig) -> DensityOperator:
    """Thermal product at beta_S plus the correlation term of ``cfg``.

    Eigenvalues are {1/Z, x^2/Z, x/Z + |alpha|, x/Z - |alpha|}; both partial
    traces are single-qubit thermal states at beta_S. Raises PositivityError
    (with the offending eigenvalue) when |alpha| exceeds the bound.
    """
    x = math.exp(-cfg.beta_s_omega)
    z = partition_function(cfg.beta_s_omega)
    matrix = np.diag(np.array([1.0, x, x, x * x], dtype=complex)) / z
    matrix[1, 2] += cfg.alpha
    matrix[2, 1] += np.conj(cfg.alpha)
    return DensityOperator(matrix, tensor_layout=PAIR_LAYOUT)


def steady_state(beta_b_omega: float, r: float) -> DensityOperator:
    """Collective steady state: Gibbs weights on the triplet ladder scaled
    by r, with the leftover 1 - r frozen in the dark state.

    Diagonal in the collective basis with weights r{1, y, y^2}/(1+y+y^2)
    on (psi_0, psi_+, psi_1) and 1-r on psi_-, where y = e^{-w beta_B}.
    """
    if not 0.0 <= r <= 1.0 + 1e-12:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    r = min(r, 1.0)
    y = math.exp(-beta_b_omega)
    norm = 1.0 + y + y * y
    psi_diag = np.array([r / norm, r * y / norm, r * y * y / norm, 1.0 - r], dtype=complex)
    return DensityOperator(
        from_psi_basis(np.diag(psi_diag)), tensor_layout=PAIR_LAYOUT
    )


def steady_populations(beta_b_omega: float, r: float) -> tuple[float, float, float, float]:
    """(p0, p+, p1, p-) of the steady state, in collective-basis order."""
    y = math.exp(-beta_b_omega)
    norm = 1.0 + y + y * y
    return r / norm, r * y / norm, r * y * y / norm, 1.0 - r


def steady_energy(beta_s_omega: float, beta_b_omega: float, re_alpha: float) -> float:
    """Steady energy E_inf/omega = 1 + (Re alpha + z(beta_S)) (y^2 - 1)/(1 + y + y^2)."""
    if abs(re_alpha) > alpha_max(beta_s_omega) + ALPHA_BOUND_TOL:
        raise ValueError(
            f"Re alpha = {re_alpha:.6g} outside the positivity bound "
            f"{alpha_max(beta_s_omega):.6g}"
        )
    y = math.exp(-beta_b_omega)
    r = re_alpha + z_factor(beta_s_omega)
    return 1.0 + r * (y * y - 1.0) / (1.0 + y + y * y)


def _entropy_of(probabilities) -> float:
    total = 0.0
    for p in probabilities:
        if p > 1e-14:
            total -= p * math.log(p)
    return total


def steady_entropy(beta_b_omega: float, r: float) -> float:
    """Steady von Neumann entropy, from the steady-state eigenvalues.

    Equals r ln[(1+y+y^2)/r] - (1-r) ln(1-r) + r w beta_B (y + 2 y^2)/(1+y+y^2);
    computed directly as -sum p ln p of the four weights so it can never
    drift from the matrix-based entropy.
    """
    if not 0.0 <= r <= 1.0 + 1e-12:
        raise ValueError(f"r must lie in [0, 1], got {r}")
    return _entropy_of(steady_populations(beta_b_omega, min(r, 1.0)))


def initial_entropy(beta_s_omega: float, abs_alpha: float) -> float:
    """Entropy of the initial pair state from its closed-form eigenvalues.

    At the positivity boundary |alpha| = alpha_max the vanishing eigenvalue
    contributes nothing (0 ln 0 = 0).
    """
    if abs_alpha < 0:
        raise ValueError("abs_alpha must be non-negative")
    if abs_alpha > alpha_max(beta_s_omega) + ALPHA_BOUND_TOL:
        raise ValueError(
            f"|alpha| = {abs_alpha:.6g} outside the positivity bound "
            f"{alpha_max(beta_s_omega):.6g}"
        )
    x = math.exp(-beta_s_omega)
    z = partition_function(beta_s_omega)
    eigs = (1.0 / z, x * x / z, x / z + abs_alpha, max(x / z - abs_alpha, 0.0))
    return _entropy_of(eigs)


@dataclass(frozen=True)
class SteadyReport:
    """Initial and steady energy/entropy of one pair configuration."""

    e_inf_over_omega: float
    s_inf: float
    e0_over_omega: float
    s0: float
    delta_e: float
    delta_s: float
    r: float


def steady_report(cfg: PairConfig, beta_b_omega: float) -> SteadyReport:
    r = cfg.r_constant
    e_inf = steady_energy(cfg.beta_s_omega, beta_b_omega, complex(cfg.alpha).real)
    s_inf = steady_entropy(beta_b_omega, r)
    e0 = initial_energy(cfg.beta_s_omega)
    s0 = initial_entropy(cfg.beta_s_omega, abs(cfg.alpha))
    return SteadyReport(
        e_inf_over_omega=e_inf,
        s_inf=s_inf,
        e0_over_omega=e0,
        s0=s0,
        delta_e=e_inf - e0,
        delta_s=s_inf - s0,
        r=r,
    )


@dataclass(frozen=True)
class MaxReversalPoint:
    beta_b_omega: float
    re_alpha: float
    delta_e: float
    delta_e_over_e0: float


def max_reversal_curve(beta_b_grid) -> list[MaxReversalPoint]:
    """Maximal permanent reversal along the diagonal beta_S = beta_B.

    For beta_B > 0 the reversing extreme is alpha = -alpha_max (the bath
    heats the pair); for beta_B < 0 the extremes swap. Returns the energy
    gain Delta E and its ratio to the initial thermal energy per grid point.
    """
    points = []
    for b in beta_b_grid:
        b = float(b)
        re_alpha = alpha_max(b) if b < 0 else -alpha_max(b)
        e0 = initial_energy(b)
        delta = steady_energy(b, b, re_alpha) - e0
        points.append(
            MaxReversalPoint(
                beta_b_omega=b, re_alpha=re_alpha, delta_e=delta, delta_e_over_e0=delta / e0
            )
        )
    return points
