"""Shared construction helpers for the test suite."""

import numpy as np

from heatrev.qcore import DensityOperator


def random_density(rng, dim, tensor_layout=None, atol=1e-12):
    """Full-rank random state from a Wishart draw."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    return DensityOperator(rho, tensor_layout=tensor_layout, atol=atol)


def random_pair_correlation_matrix(rng):
    """Random 4x4 traceless Hermitian matrix with vanishing local traces."""
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = h + h.conj().T
    t = h.reshape(2, 2, 2, 2)
    local_1 = np.einsum("ikjk->ij", t)
    local_2 = np.einsum("kikj->ij", t)
    eye = np.eye(2, dtype=complex)
    return (
        h
        - np.kron(local_1, eye) / 2.0
        - np.kron(eye, local_2) / 2.0
        + np.trace(h) * np.eye(4, dtype=complex) / 4.0
    )


def thermal_qubit_matrix(beta_omega):
    x = np.exp(-beta_omega)
    return np.diag([1.0, x]).astype(complex) / (1.0 + x)
