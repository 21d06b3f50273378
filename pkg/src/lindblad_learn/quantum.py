"""Dense operators and states for small open quantum systems.

Basis convention: qubit index 0 is the sigma_z = +1 (excited) state, so
``sigma_minus`` maps |0> to |1>.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidDimensionError

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-12

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "PLUS": np.array([[0, 1], [0, 0]], dtype=complex),
    "MINUS": np.array([[0, 0], [1, 0]], dtype=complex),
}


def pauli(which: str) -> np.ndarray:
    """Return a 2x2 Pauli matrix: one of X, Y, Z, Plus, Minus (or I).

    ``Plus`` and ``Minus`` are (X +/- iY)/2.
    """
    try:
        return _PAULI[which.upper()].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli operator {which!r}") from None


def ladder(n_max: int, which: str) -> np.ndarray:
    """Truncated bosonic operator on the Fock states |0>..|n_max-1>.

    ``which`` is ``"lower"`` (a), ``"raise"`` (a^dagger) or ``"number"``.
    """
    if n_max < 2:
        raise InvalidDimensionError(f"Fock truncation must be >= 2, got {n_max}")
    a = np.diag(np.sqrt(np.arange(1, n_max)), k=1).astype(complex)
    key = which.lower()
    if key == "lower":
        return a
    if key == "raise":
        return a.conj().T
    if key == "number":
        return np.diag(np.arange(n_max)).astype(complex)
    raise ValueError(f"unknown ladder operator {which!r}")


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of operators (left factor is slowest)."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def embed(op: np.ndarray, site: int, dims: list[int]) -> np.ndarray:
    """Place ``op`` on tensor factor ``site`` of a product space with ``dims``."""
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[site] = op
    return kron(*factors)


def dag(op: np.ndarray) -> np.ndarray:
    return op.conj().T


def is_hermitian(op: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    return bool(np.max(np.abs(op - op.conj().T), initial=0.0) <= atol)


def expectation(rho: np.ndarray, obs: np.ndarray) -> float:
    """Real expectation value Tr(obs rho) of a Hermitian observable."""
    if rho.shape != obs.shape or rho.shape[0] != rho.shape[1]:
        raise InvalidDimensionError(f"shape mismatch: rho {rho.shape}, observable {obs.shape}")
    if not is_hermitian(obs):
        raise ValueError("observable is not Hermitian")
    val = np.einsum("ij,ji->", obs, rho)
    assert abs(val.imag) <= 1e-9, f"expectation has imaginary part {val.imag}"
    return float(val.real)


def haar_random_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed pure state from a normalized complex Gaussian vector."""
    if dim < 2:
        raise InvalidDimensionError(f"state dimension must be >= 2, got {dim}")
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def basis_state(dim: int, index: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def density_matrix(state: np.ndarray) -> np.ndarray:
    """Validated density matrix from a ket or a square matrix.

    Raises ValueError when the input is not Hermitian or not unit trace.
    """
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        norm = np.linalg.norm(state)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalized (norm={norm})")
        rho = np.outer(state, state.conj())
    elif state.ndim == 2 and state.shape[0] == state.shape[1]:
        rho = state.copy()
    else:
        raise InvalidDimensionError(f"cannot build a density matrix from shape {state.shape}")
    if not is_hermitian(rho, atol=1e-12):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    rho.setflags(write=False)
    return rho


def min_eigenvalue(rho: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``rho``."""
    return float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.einsum("ij,ji->", rho, rho)))
