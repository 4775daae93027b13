"""
Dense spin-1/2 operator primitives.

Site convention: sites are labelled 1..N, site 1 is the leftmost (most
significant) tensor factor, and the single-site basis is |+> = (1, 0),
the sigma^z = +1 eigenstate, followed by |-> = (0, 1).
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .config import TOL

_PAULI = {
    "identity": np.eye(2, dtype=np.complex128),
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "plus": np.array([[0, 1], [0, 0]], dtype=np.complex128),
    "minus": np.array([[0, 0], [1, 0]], dtype=np.complex128),
}


class NotHermitianError(ValueError):
    pass


def pauli(axis: str) -> np.ndarray:
    """Return a fresh 2x2 Pauli matrix for ``axis`` in {x, y, z, plus, minus, identity}.

    ``plus`` and ``minus`` are sigma^{+-} = (sigma^x +- i sigma^y) / 2.
    """
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def identity(n_sites: int) -> np.ndarray:
    return np.eye(2**n_sites, dtype=np.complex128)


def site_count(op: np.ndarray) -> int:
    """Number of qubits an operator or ket acts on."""
    dim = op.shape[0]
    n = dim.bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if op.ndim == 2 and op.shape[0] != op.shape[1]:
        raise ValueError(f"operator is not square: {op.shape}")
    return n


def kron_all(factors) -> np.ndarray:
    return reduce(np.kron, factors)


def dagger(op: np.ndarray) -> np.ndarray:
    return op.conj().T


def embed(op: np.ndarray, first_site: int, N: int) -> np.ndarray:
    """Place an m-site operator on sites first_site..first_site+m-1 of an N-site chain."""
    m = site_count(op)
    if first_site < 1 or first_site + m - 1 > N:
        raise IndexError(f"operator on {m} sites does not fit at site {first_site} of {N}")
    left = identity(first_site - 1)
    right = identity(N - first_site - m + 1)
    return np.kron(np.kron(left, op), right)


def local_product(factors: dict[int, np.ndarray], N: int) -> np.ndarray:
    """Tensor product of single-site operators at (not necessarily adjacent) sites."""
    for site in factors:
        if not 1 <= site <= N:
            raise IndexError(f"site {site} outside 1..{N}")
    eye = _PAULI["identity"]
    return kron_all([factors.get(site, eye) for site in range(1, N + 1)])


def partial_trace(op: np.ndarray, keep) -> np.ndarray:
    """Trace out every site not listed in ``keep`` (1-based labels).

    The kept sites stay in ascending order.
    """
    N = site_count(op)
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set is empty; use np.trace for the full trace")
    if keep[0] < 1 or keep[-1] > N:
        raise IndexError(f"keep sites {keep} outside 1..{N}")
    t = op.reshape([2] * (2 * N))
    n = N
    for site in reversed(range(1, N + 1)):
        if site in keep:
            continue
        axis = site - 1
        t = np.trace(t, axis1=axis, axis2=axis + n)
        n -= 1
    dim = 2 ** len(keep)
    return t.reshape(dim, dim)


def is_hermitian(op: np.ndarray, tol: float = TOL.hermitian) -> bool:
    return bool(np.max(np.abs(op - dagger(op)), initial=0.0) <= tol)


def hermitian_spectrum(op: np.ndarray, tol: float = TOL.hermitian):
    """Ascending eigenvalues and column eigenvectors of a Hermitian operator.

    Raises NotHermitianError if any entry of op - op^dagger exceeds ``tol``.
    """
    dev = np.max(np.abs(op - dagger(op)), initial=0.0)
    if dev > tol:
        raise NotHermitianError(f"operator deviates from Hermitian by {dev:.3e}")
    herm = 0.5 * (op + dagger(op))
    return np.linalg.eigh(herm)


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    """tr(op rho) without forming the product."""
    return complex(np.einsum("ij,ji->", op, rho))
