"""Energy-shell decomposition and eigenoperators of a coupling observable.

A Hamiltonian with degenerate levels is split into shells (energy,
multiplicity, projector); a coupling observable A is decomposed into
ladder components A(nu) connecting shells separated by nu, satisfying
[H, A(nu)] = -nu A(nu). For a system with a single coupled transition
omega the decomposition collapses to one lowering/raising pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import HermitianObservable

# Degeneracy tolerance, relative to the spectral range (floored at 1).
DEFAULT_DEGENERACY_TOL = 1e-9

# Components with max-abs below this (times the scale of A) are dropped
# from the frequency map.
COMPONENT_DROP_TOL = 1e-12


class MultiFrequencyError(ValueError):
    """The coupling drives more than one transition frequency."""

    def __init__(self, frequencies, message: str | None = None):
        self.frequencies = tuple(float(f) for f in frequencies)
        freqs = ", ".join(f"{f:.9g}" for f in self.frequencies)
        super().__init__(message or f"coupling is not single-transition: frequencies {{{freqs}}}")


class ZeroCouplingError(ValueError):
    """The coupling observable has no component at the requested frequency."""


@dataclass(frozen=True)
class EnergyShell:
    """One (possibly degenerate) energy level.

    ``projector`` is the rank-``multiplicity`` orthogonal projector onto the
    eigenspace; ``basis`` holds the orthonormal eigenvectors as columns. Any
    orthonormal basis of the shell is acceptable: the projector, and every
    quantity built from it, is basis-independent.
    """

    energy: float
    multiplicity: int
    projector: np.ndarray
    basis: np.ndarray


def _resolve_tol(eigenvalues: np.ndarray, tol: float | None) -> float:
    if tol is not None:
        if tol <= 0:
            raise ValueError("tol must be positive")
        return float(tol)
    spread = float(eigenvalues[-1] - eigenvalues[0]) if eigenvalues.size else 0.0
    return DEFAULT_DEGENERACY_TOL * max(1.0, spread)


def spectral_groups(hamiltonian: HermitianObservable, tol: float | None = None) -> list[EnergyShell]:
    """Group the spectrum of H into degenerate shells, sorted ascending.

    Two consecutive eigenvalues land in the same shell iff their gap is at
    most ``tol`` (default: 1e-9 relative to the spectral range); merging is
    transitive along chains of close eigenvalues. Shell energies are the
    mean of the grouped eigenvalues and multiplicities sum to dim.
    """
    eigs, vecs = np.linalg.eigh(hamiltonian.matrix)
    tol = _resolve_tol(eigs, tol)
    shells: list[EnergyShell] = []
    start = 0
    for i in range(1, len(eigs) + 1):
        if i == len(eigs) or eigs[i] - eigs[i - 1] > tol:
            block = vecs[:, start:i]
            shells.append(
                EnergyShell(
                    energy=float(eigs[start:i].mean()),
                    multiplicity=i - start,
                    projector=block @ block.conj().T,
                    basis=block,
                )
            )
            start = i
    return shells


def _canonical_frequencies(shells: list[EnergyShell], tol: float) -> dict[tuple[int, int], float]:
    """Map each ordered shell pair (n, n') to a canonical nu = e_{n'} - e_n.

    Raw differences are clustered with the same tolerance used for the
    shells, so map keys are exact cluster representatives (with nu and -nu
    exactly negated), not floating noise.
    """
    diffs = []
    for n in range(len(shells)):
        for m in range(n + 1, len(shells)):
            diffs.append(shells[m].energy - shells[n].energy)
    reps: list[float] = []
    for d in sorted(diffs):
        if not reps or d - reps[-1] > tol:
            reps.append(d)
    out: dict[tuple[int, int], float] = {}
    for n in range(len(shells)):
        out[(n, n)] = 0.0
        for m in range(n + 1, len(shells)):
            d = shells[m].energy - shells[n].energy
            rep = min(reps, key=lambda r: abs(r - d))
            out[(n, m)] = rep
            out[(m, n)] = -rep
    return out


def build_eigenoperators(
    hamiltonian: HermitianObservable,
    coupling: HermitianObservable,
    tol: float | None = None,
) -> dict[float, np.ndarray]:
    """Decompose a coupling observable into its ladder components.

    Returns the map nu -> A(nu) with A(nu) the sum of Pi_n A Pi_{n'} over
    shell pairs with e_{n'} - e_n = nu. The components reconstruct the
    observable (sum over nu equals A) and pair up under the adjoint,
    A(-nu) = A(nu)^dagger. Numerically vanishing components are dropped.
    """
    if hamiltonian.dim != coupling.dim:
        raise ValueError(
            f"dimension mismatch: H is {hamiltonian.dim}, coupling is {coupling.dim}"
        )
    eigs = np.linalg.eigvalsh(hamiltonian.matrix)
    tol = _resolve_tol(eigs, tol)
    shells = spectral_groups(hamiltonian, tol)
    freq_of_pair = _canonical_frequencies(shells, tol)
    a = coupling.matrix
    components: dict[float, np.ndarray] = {}
    for (n, m), nu in freq_of_pair.items():
        block = shells[n].projector @ a @ shells[m].projector
        if nu in components:
            components[nu] = components[nu] + block
        else:
            components[nu] = block
    scale = max(1.0, float(np.abs(a).max()))
    drop = COMPONENT_DROP_TOL * scale
    return {nu: comp for nu, comp in components.items() if np.abs(comp).max() > drop}


@dataclass(frozen=True)
class LadderPair:
    """Lowering/raising eigenoperator pair for one transition frequency.

    ``lowering`` is A = A(+omega), satisfying [H, A] = -omega A; the raising
    operator is its adjoint.
    """

    frequency: float
    lowering: np.ndarray

    @property
    def raising(self) -> np.ndarray:
        return self.lowering.conj().T

    @property
    def dim(self) -> int:
        return self.lowering.shape[0]


def ladder_pair(
    hamiltonian: HermitianObservable,
    coupling: HermitianObservable,
    omega: float | None = None,
    tol: float | None = None,
) -> LadderPair:
    """Extract the single lowering/raising pair of a one-transition coupling.

    Requires the eigenoperator map to contain exactly the frequencies
    {-omega, +omega} with no static (nu = 0) component. With ``omega=None``
    the transition frequency is inferred. Raises MultiFrequencyError when
    several distinct frequencies couple (listing all of them, including 0
    for a static component) and ZeroCouplingError when nothing couples at
    the requested frequency.
    """
    components = build_eigenoperators(hamiltonian, coupling, tol)
    eigs = np.linalg.eigvalsh(hamiltonian.matrix)
    match_tol = _resolve_tol(eigs, tol)
    positive = sorted(nu for nu in components if nu > 0)
    if not positive:
        raise ZeroCouplingError("coupling observable has no off-diagonal transition component")
    has_static = 0.0 in components
    if omega is None:
        if len(positive) > 1 or has_static:
            raise MultiFrequencyError(([0.0] if has_static else []) + positive)
        omega_found = positive[0]
    else:
        if omega <= 0:
            raise ValueError("omega must be positive")
        matches = [nu for nu in positive if abs(nu - omega) <= match_tol]
        others = [nu for nu in positive if abs(nu - omega) > match_tol]
        if others or has_static:
            raise MultiFrequencyError(([0.0] if has_static else []) + positive)
        if not matches:
            raise ZeroCouplingError(f"no coupling component at frequency {omega:.9g}")
        omega_found = matches[0]
    return LadderPair(frequency=float(omega_found), lowering=components[omega_found])


def commutator_defect(hamiltonian: HermitianObservable, pair: LadderPair) -> float:
    """Max-abs residual of [H, A] + omega A (zero for a true eigenoperator)."""
    h = hamiltonian.matrix
    a = pair.lowering
    return float(np.abs(h @ a - a @ h + pair.frequency * a).max())
