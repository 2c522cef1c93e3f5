"""Small dense linear-algebra helpers used throughout the package.

Eigenvalue routines for Hermitian data always symmetrize their input
explicitly before calling LAPACK, so that downstream guarantees never
depend on how a caller assembled the matrix.
"""

import numpy as np

__all__ = [
    "as_complex_matrix",
    "sym",
    "eigh_sym",
    "spectral_norm",
    "orthonormal_columns",
]


def as_complex_matrix(a) -> np.ndarray:
    """Return ``a`` as a 2-d complex128 array (real input is promoted)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    return m


def sym(a: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A^H)/2."""
    return 0.5 * (a + a.conj().T)


def eigh_sym(a: np.ndarray):
    """Eigendecomposition of the explicitly symmetrized input.

    Returns ``(w, v)`` with eigenvalues ascending, like ``numpy.linalg.eigh``.
    """
    return np.linalg.eigh(sym(np.asarray(a, dtype=np.complex128)))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value of ``a`` (0.0 for an empty matrix)."""
    a = np.atleast_2d(np.asarray(a))
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def orthonormal_columns(a: np.ndarray, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis for the column span of ``a``.

    Rank is decided by singular values larger than ``rank_tol`` times the
    largest one, so the cut is relative to the scale of the input.  An
    all-zero (or empty) input yields a ``(d, 0)`` array.
    """
    a = as_complex_matrix(a)
    d = a.shape[0]
    if a.shape[1] == 0:
        return np.zeros((d, 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((d, 0), dtype=np.complex128)
    rank = int(np.count_nonzero(s > rank_tol * s[0]))
    return u[:, :rank]
