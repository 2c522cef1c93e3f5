"""Closed subspaces of a finite-dimensional complex Hilbert space.

A subspace is represented by a ``d x r`` matrix with orthonormal columns;
``r = 0`` encodes the zero subspace.  Real input is promoted to complex.
All rank decisions are made through singular values with a relative
threshold, and all constructed objects are immutable.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalContractError
from .linalg import as_complex_matrix, eigh_sym, orthonormal_columns

__all__ = [
    "AmbientSpace",
    "Subspace",
    "Projector",
    "orthonormalize",
    "projector",
    "intersection",
    "complement_within",
    "orthogonal_complement",
]


@dataclass(frozen=True)
class AmbientSpace:
    """The space C^dim in which all subspaces of an instance live."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("ambient dimension must be positive")

    def zero(self) -> "Subspace":
        return Subspace(np.zeros((self.dim, 0), dtype=np.complex128))

    def full(self) -> "Subspace":
        return Subspace(np.eye(self.dim, dtype=np.complex128))


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Subspace:
    """Column span of a matrix with orthonormal columns.

    Parameters
    ----------
    basis : (d, r) complex array
        Orthonormal columns; ``r = 0`` is the zero subspace.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = as_complex_matrix(self.basis)
        object.__setattr__(self, "basis", _freeze(b))
        gram = b.conj().T @ b
        if not np.allclose(gram, np.eye(b.shape[1]), atol=1e-12):
            raise ValueError("basis columns are not orthonormal to 1e-12")

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of ``x`` (vector or stacked columns)."""
        if self.dim == 0:
            return np.zeros_like(np.asarray(x, dtype=np.complex128))
        return self.basis @ (self.basis.conj().T @ np.asarray(x, dtype=np.complex128))

    def contains(self, x: np.ndarray, tol: float = 1e-10) -> bool:
        x = np.asarray(x, dtype=np.complex128)
        return bool(np.linalg.norm(self.project(x) - x) <= tol * max(1.0, np.linalg.norm(x)))

    def distance(self, x: np.ndarray) -> float:
        """dist(x, subspace) = ||x - Px||."""
        x = np.asarray(x, dtype=np.complex128)
        return float(np.linalg.norm(x - self.project(x)))


@dataclass(frozen=True)
class Projector:
    """Matrix of an orthogonal projection, validated at construction."""

    matrix: np.ndarray
    _validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        p = as_complex_matrix(self.matrix)
        object.__setattr__(self, "matrix", _freeze(p))
        if not self._validate:
            return
        if p.shape[0] != p.shape[1]:
            raise ValueError("projector matrix must be square")
        if np.linalg.norm(p - p.conj().T, np.inf) > 1e-12:
            raise NumericalContractError("projector is not Hermitian to 1e-12")
        if np.linalg.norm(p @ p - p, np.inf) > 1e-10:
            raise NumericalContractError("projector is not idempotent to 1e-10")
        w, _ = eigh_sym(p)
        if w.size and np.abs(w - np.round(w)).max() > 1e-8:
            raise NumericalContractError("projector eigenvalues leave {0,1} by > 1e-8")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=np.complex128)


def orthonormalize(vectors, rank_tol: float = 1e-10) -> Subspace:
    """Subspace spanned by the given vectors (columns or a list of 1-d arrays).

    Rank is the number of singular values above ``rank_tol`` times the
    largest; the spanned space is unchanged up to that cut.
    """
    a = np.asarray(vectors, dtype=np.complex128)
    if a.ndim == 1:
        a = a[:, None]
    elif a.ndim == 2 and not isinstance(vectors, np.ndarray):
        # a list/tuple of 1-d vectors arrives row-wise
        a = a.T
    return Subspace(orthonormal_columns(a, rank_tol=rank_tol))


def projector(s: Subspace) -> Projector:
    """Orthogonal projection onto ``s`` as a dense matrix."""
    b = s.basis
    return Projector(b @ b.conj().T, _validate=False)


def intersection(subspaces, eig_tol: float = 1e-10) -> Subspace:
    """Intersection of finitely many subspaces of one ambient space.

    Computed as the top eigenspace of the averaged projector
    (1/N) sum_k P_k: eigenvalues exceeding 1 - eig_tol are taken.  Every
    accepted eigenvector is cross-checked against each individual
    projector; a vector moved by more than sqrt(eig_tol) means the
    eigenvalue cut is not trustworthy at this scale.
    """
    subspaces = list(subspaces)
    if not subspaces:
        raise ValueError("need at least one subspace")
    d = subspaces[0].ambient_dim
    if any(s.ambient_dim != d for s in subspaces):
        raise ValueError("subspaces live in different ambient dimensions")
    mean = np.zeros((d, d), dtype=np.complex128)
    for s in subspaces:
        mean += s.basis @ s.basis.conj().T
    mean /= len(subspaces)
    w, v = eigh_sym(mean)
    keep = w > 1.0 - eig_tol
    basis = v[:, keep]
    for s in subspaces:
        drift = np.linalg.norm(s.project(basis) - basis, axis=0) if basis.size else np.zeros(0)
        if drift.size and drift.max() > np.sqrt(eig_tol):
            raise NumericalContractError(
                "ill-conditioned intersection; reduce eig_tol or rescale instance"
            )
    return Subspace(orthonormal_columns(basis, rank_tol=1e-12) if basis.size else basis.reshape(d, 0))


def complement_within(mk: Subspace, m: Subspace, rank_tol: float = 1e-10) -> Subspace:
    """Orthogonal complement of ``m`` inside ``mk``, i.e. ``mk ∩ m^perp``.

    Requires ``m`` to be contained in ``mk`` (each basis vector of ``m``
    must be reproduced by the projection onto ``mk`` within 1e-10).
    """
    if mk.ambient_dim != m.ambient_dim:
        raise ValueError("subspaces live in different ambient dimensions")
    if m.dim:
        drift = np.linalg.norm(mk.project(m.basis) - m.basis, axis=0)
        if drift.max() > 1e-10:
            raise ValueError("second argument is not contained in the first")
    reduced = mk.basis - m.project(mk.basis)
    return Subspace(orthonormal_columns(reduced, rank_tol=rank_tol))


def orthogonal_complement(s: Subspace) -> Subspace:
    """The full orthogonal complement of ``s`` in its ambient space."""
    d = s.ambient_dim
    if s.dim == 0:
        return AmbientSpace(d).full()
    u, sv, _ = np.linalg.svd(s.basis, full_matrices=True)
    return Subspace(u[:, s.dim:])
