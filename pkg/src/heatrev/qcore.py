"""Dense complex-matrix foundation and quantum-information primitives.

Everything downstream (eigenoperator construction, apparent temperatures,
Lindblad dynamics) works on the small validated value types defined here:
density operators, Hermitian observables, and traceless correlation terms.
All operations are pure functions over immutable inputs; natural-log
entropies (nats) and the units hbar = k_B = 1, omega = 1 are used
throughout, so temperatures always enter as the dimensionless product
omega*beta.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

# Default construction/validation tolerances. Integrator output is validated
# at a looser tolerance (see dynamics), passed through the atol arguments.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-12

# Eigenvalues below this threshold contribute 0 to entropies (0 ln 0 = 0).
EIGENVALUE_FLOOR = 1e-14

# Relative-entropy support violation: mass of rho outside supp(sigma) above
# this returns the +inf sentinel.
SUPPORT_TOL = 1e-12


class PositivityError(ValueError):
    """A candidate density matrix has a negative eigenvalue beyond tolerance."""

    def __init__(self, min_eigenvalue: float, message: str | None = None):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            message
            or f"matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}"
        )


def _as_square_complex(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermiticity_defect(matrix) -> float:
    """Max absolute element of M - M^dagger."""
    m = _as_square_complex(matrix)
    return float(np.abs(m - m.conj().T).max()) if m.size else 0.0


def _hermitize(m: np.ndarray, atol: float) -> np.ndarray:
    defect = hermiticity_defect(m)
    if defect > atol:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} > {atol:.1e}")
    return (m + m.conj().T) / 2.0


def _check_layout(layout, dim: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in layout)
    if any(d <= 0 for d in dims):
        raise ValueError(f"tensor_layout entries must be positive, got {dims}")
    if int(np.prod(dims)) != dim:
        raise ValueError(f"tensor_layout {dims} does not multiply to dim {dim}")
    return dims


@dataclass(frozen=True)
class DensityVerdict:
    """Result of validate_density: ok flag plus the measured defects."""

    ok: bool
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    violations: tuple[str, ...]


def validate_density(matrix, atol: float = POSITIVITY_TOL) -> DensityVerdict:
    """Check the three density-operator invariants and report magnitudes.

    Returns a verdict listing the Hermiticity defect (max |M - M^dagger|),
    the trace defect |Tr M - 1|, and the most negative eigenvalue. ``ok``
    is True iff all three are within ``atol``.
    """
    m = _as_square_complex(matrix)
    herm = hermiticity_defect(m)
    trace = abs(complex(np.trace(m)) - 1.0)
    violations = []
    if herm > atol:
        violations.append(f"hermiticity defect {herm:.3e}")
        min_eig = math.nan
    else:
        sym = (m + m.conj().T) / 2.0
        min_eig = float(np.linalg.eigvalsh(sym)[0])
        if min_eig < -atol:
            violations.append(f"negative eigenvalue {min_eig:.3e}")
    if trace > atol:
        violations.append(f"trace defect {trace:.3e}")
    return DensityVerdict(
        ok=not violations,
        hermiticity_defect=herm,
        trace_defect=float(trace),
        min_eigenvalue=min_eig,
        violations=tuple(violations),
    )


class DensityOperator:
    """A finite-dimensional quantum state: Hermitian, unit trace, PSD.

    Parameters
    ----------
    matrix : array_like
        dim x dim complex matrix. Validated on construction.
    tensor_layout : sequence of int, optional
        Subsystem dimensions whose product equals dim; required by the
        partial-trace and mutual-information operations.
    atol : float
        Validation tolerance. The default is the exact-arithmetic tolerance;
        numerically integrated states are constructed with a looser value.
    """

    __slots__ = ("matrix", "tensor_layout", "atol")

    def __init__(self, matrix, tensor_layout=None, atol: float = POSITIVITY_TOL):
        m = _as_square_complex(matrix)
        verdict = validate_density(m, atol=atol)
        if not verdict.ok:
            only_positivity = (
                verdict.hermiticity_defect <= atol and verdict.trace_defect <= atol
            )
            if only_positivity:
                raise PositivityError(verdict.min_eigenvalue)
            raise ValueError("invalid density operator: " + "; ".join(verdict.violations))
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        layout = _check_layout(tensor_layout, m.shape[0]) if tensor_layout is not None else None
        object.__setattr__(self, "tensor_layout", layout)
        object.__setattr__(self, "atol", float(atol))

    def __setattr__(self, name, value):
        raise AttributeError("DensityOperator is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, operator) -> float:
        """Real part of Tr(rho O); the imaginary part is discarded."""
        op = np.asarray(operator, dtype=complex)
        return float(np.trace(self.matrix @ op).real)

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, tensor_layout={self.tensor_layout})"


class HermitianObservable:
    """A Hermitian matrix (Hamiltonian or coupling observable)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, atol: float = HERMITICITY_TOL):
        m = _as_square_complex(matrix)
        defect = hermiticity_defect(m)
        if defect > atol:
            raise ValueError(f"observable is not Hermitian: defect {defect:.3e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianObservable is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


class CorrelationTerm:
    """Traceless Hermitian addition to a state, carrying only coherences.

    With a multi-subsystem ``tensor_layout``, every single-subsystem partial
    trace must vanish: the term then contributes nothing to local states and
    represents genuine inter-subsystem correlations. Without a layout the
    term is a plain non-energetic coherence block of a single system.
    """

    __slots__ = ("matrix", "tensor_layout")

    def __init__(self, matrix, tensor_layout=None, atol: float = HERMITICITY_TOL):
        m = _hermitize(_as_square_complex(matrix), atol)
        tr = abs(complex(np.trace(m)))
        if tr > atol:
            raise ValueError(f"correlation term must be traceless: |trace| = {tr:.3e}")
        layout = _check_layout(tensor_layout, m.shape[0]) if tensor_layout is not None else None
        if layout is not None and len(layout) >= 2:
            for i in range(len(layout)):
                local = partial_trace_matrix(m, layout, keep=(i,))
                worst = float(np.abs(local).max())
                if worst > atol:
                    raise ValueError(
                        f"partial trace onto subsystem {i} is nonzero ({worst:.3e}); "
                        "not a pure correlation term"
                    )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "tensor_layout", layout)

    def __setattr__(self, name, value):
        raise AttributeError("CorrelationTerm is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def partial_trace_matrix(matrix, dims, keep) -> np.ndarray:
    """Partial trace of a raw matrix over the subsystems not in ``keep``.

    ``dims`` lists the subsystem dimensions, ``keep`` the (0-based) indices
    to retain; retained subsystems keep their original order.
    """
    m = _as_square_complex(matrix)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"subsystem index out of range for layout {dims}: {keep}")
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(f"layout {dims} does not match matrix dim {m.shape[0]}")
    t = m.reshape(dims + dims)
    # Contract row/column indices of each traced subsystem pairwise.
    traced = [i for i in range(n) if i not in keep]
    for offset, i in enumerate(traced):
        # After each trace two axes disappear; live axes shift down.
        ax = i - offset
        t = np.trace(t, axis1=ax, axis2=ax + (n - offset))
    d_keep = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d_keep, d_keep)


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Reduced state on the ``keep`` subsystems of ``rho``.

    Requires ``rho.tensor_layout``; preserves the trace and returns a state
    whose layout is the kept subsystem dimensions in original order.
    """
    if rho.tensor_layout is None:
        raise ValueError("partial_trace requires a DensityOperator with tensor_layout")
    keep = sorted(set(int(k) for k in keep))
    reduced = partial_trace_matrix(rho.matrix, rho.tensor_layout, keep)
    layout = tuple(rho.tensor_layout[i] for i in keep)
    return DensityOperator(reduced, tensor_layout=layout, atol=max(rho.atol, POSITIVITY_TOL))


def _entropy_from_eigenvalues(eigs: np.ndarray) -> float:
    p = eigs[eigs > EIGENVALUE_FLOOR]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log(p)).sum())


def von_neumann_entropy(rho: DensityOperator) -> float:
    """S(rho) = -Tr rho ln rho in nats.

    Eigenvalues in [-atol, 0] are clipped to 0 before the logarithm and
    contribute nothing (the 0 ln 0 = 0 convention).
    """
    sym = (rho.matrix + rho.matrix.conj().T) / 2.0
    eigs = np.linalg.eigvalsh(sym)
    return _entropy_from_eigenvalues(eigs)


def relative_entropy(rho: DensityOperator, sigma: DensityOperator) -> float:
    """S(rho || sigma) = Tr rho (ln rho - ln sigma), in nats.

    Returns ``math.inf`` when the support of rho is not contained in the
    support of sigma. Values depressed below zero by rounding (within
    1e-10) are clamped to 0.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    rho_sym = (rho.matrix + rho.matrix.conj().T) / 2.0
    sig_sym = (sigma.matrix + sigma.matrix.conj().T) / 2.0
    r_eigs = np.linalg.eigvalsh(rho_sym)
    s_eigs, s_vecs = np.linalg.eigh(sig_sym)
    # rho expressed in sigma's eigenbasis; diagonal gives Tr rho ln sigma.
    rho_in_s = s_vecs.conj().T @ rho_sym @ s_vecs
    diag = np.clip(rho_in_s.diagonal().real, 0.0, None)
    kernel = s_eigs <= EIGENVALUE_FLOOR
    if float(diag[kernel].sum()) > SUPPORT_TOL:
        return math.inf
    tr_rho_ln_rho = -_entropy_from_eigenvalues(r_eigs)
    tr_rho_ln_sig = float((diag[~kernel] * np.log(s_eigs[~kernel])).sum())
    value = tr_rho_ln_rho - tr_rho_ln_sig
    if -1e-10 < value < 0.0:
        return 0.0
    return value


def mutual_information(rho: DensityOperator) -> float:
    """I(1:2) = S(rho_1) + S(rho_2) - S(rho) for a bipartite state."""
    if rho.tensor_layout is None or len(rho.tensor_layout) != 2:
        raise ValueError("mutual_information requires a tensor_layout with exactly 2 subsystems")
    s1 = von_neumann_entropy(partial_trace(rho, keep=(0,)))
    s2 = von_neumann_entropy(partial_trace(rho, keep=(1,)))
    return s1 + s2 - von_neumann_entropy(rho)


# --- matrix file format ----------------------------------------------------
# JSON object {"dim": n, "re": [[...]], "im": [[...]]}, row-major.

def matrix_to_payload(matrix) -> dict:
    m = _as_square_complex(matrix)
    return {"dim": m.shape[0], "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_payload(payload: dict) -> np.ndarray:
    try:
        dim = int(payload["dim"])
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix payload: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(
            f"matrix payload shape mismatch: dim={dim}, re {re.shape}, im {im.shape}"
        )
    return re + 1j * im


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return matrix_from_payload(json.load(fh))


def save_matrix(path, matrix) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(matrix_to_payload(matrix), fh)
        fh.write("\n")
