"""Subspaces of C^n, orthogonal projections and the direct-sum space.

Direct-sum vectors are stored in local coordinates: block ``i`` holds the
coordinates of ``f_i`` in the orthonormal basis of subspace ``i``, so the
constraint ``f_i in W_i`` holds by construction.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, SpaceMismatch
from .linalg import DEFAULT_TOL, adjoint, as_matrix, orthonormal_basis


@dataclass(frozen=True, eq=False)
class Subspace:
    basis: np.ndarray

    def __post_init__(self):
        q = as_matrix(self.basis)
        if q.shape[1] < 1 or q.shape[1] > q.shape[0]:
            raise DimensionMismatch(f"invalid basis shape {q.shape}")
        gram = adjoint(q) @ q
        if np.linalg.norm(gram - np.eye(q.shape[1])) > DEFAULT_TOL.identity_abs:
            raise ValueError("basis columns are not orthonormal")
        q.setflags(write=False)
        object.__setattr__(self, "basis", q)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def __eq__(self, other):
        return isinstance(other, Subspace) and np.array_equal(self.basis, other.basis)

    __hash__ = None


def make_subspace(span, tol=DEFAULT_TOL):
    """Subspace spanned by the columns of ``span`` (orthonormalized)."""
    return Subspace(orthonormal_basis(span, tol))


def projection(sub):
    q = sub.basis
    return q @ adjoint(q)


def embed(sub, local):
    local = np.asarray(local, dtype=np.complex128)
    if local.shape[0] != sub.dim:
        raise DimensionMismatch(f"expected {sub.dim} local coordinates, got {local.shape[0]}")
    return sub.basis @ local


def restrict(sub, ambient):
    ambient = np.asarray(ambient, dtype=np.complex128)
    if ambient.shape[0] != sub.ambient_dim:
        raise DimensionMismatch(f"expected ambient dimension {sub.ambient_dim}, got {ambient.shape[0]}")
    return adjoint(sub.basis) @ ambient


@dataclass(frozen=True, eq=False)
class DirectSumSpace:
    subspaces: tuple
    offsets: tuple = field(init=False)

    def __post_init__(self):
        subs = tuple(self.subspaces)
        if not subs:
            raise ValueError("direct sum needs at least one subspace")
        n = subs[0].ambient_dim
        if any(s.ambient_dim != n for s in subs):
            raise DimensionMismatch("subspaces live in different ambient spaces")
        object.__setattr__(self, "subspaces", subs)
        object.__setattr__(self, "offsets", tuple(np.concatenate([[0], np.cumsum(self.block_dims)]).tolist()))

    @property
    def ambient_dim(self):
        return self.subspaces[0].ambient_dim

    @property
    def block_dims(self):
        return tuple(s.dim for s in self.subspaces)

    @property
    def total_dim(self):
        return sum(self.block_dims)

    def __len__(self):
        return len(self.subspaces)

    def block_slice(self, i):
        return slice(self.offsets[i], self.offsets[i + 1])

    def __eq__(self, other):
        return isinstance(other, DirectSumSpace) and len(self) == len(other) and all(
            a == b for a, b in zip(self.subspaces, other.subspaces))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DirectSumVector:
    space: DirectSumSpace
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=np.complex128).reshape(-1)
        if c.shape[0] != self.space.total_dim:
            raise DimensionMismatch(f"expected {self.space.total_dim} coordinates, got {c.shape[0]}")
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_components(cls, space, components):
        """Build from ambient vectors ``f_i``; each is projected onto its subspace."""
        return cls(space, np.concatenate([restrict(s, f) for s, f in zip(space.subspaces, components)]))

    def block(self, i):
        return self.coords[self.space.block_slice(i)]

    def components(self):
        """Ambient-space vectors ``f_i``."""
        return [embed(s, self.block(i)) for i, s in enumerate(self.space.subspaces)]

    def norm(self):
        return float(np.linalg.norm(self.coords))


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """Dense operator between two direct-sum spaces, ``codomain x domain`` blocks."""

    domain: DirectSumSpace
    codomain: DirectSumSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (self.codomain.total_dim, self.domain.total_dim):
            raise DimensionMismatch(
                f"matrix shape {m.shape} does not match spaces "
                f"({self.codomain.total_dim}, {self.domain.total_dim})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def block(self, j, i):
        n_out, n_in = len(self.codomain), len(self.domain)
        if not (0 <= j < n_out and 0 <= i < n_in):
            raise IndexError(f"block ({j}, {i}) out of range for {n_out}x{n_in} blocks")
        return self.matrix[self.codomain.block_slice(j), self.domain.block_slice(i)]

    def blocks(self):
        return [[self.block(j, i) for i in range(len(self.domain))] for j in range(len(self.codomain))]

    def adjoint(self):
        return BlockOperator(self.codomain, self.domain, adjoint(self.matrix))

    def __matmul__(self, other):
        if isinstance(other, BlockOperator):
            if other.codomain != self.domain:
                raise SpaceMismatch("composition of operators on different spaces")
            return BlockOperator(other.domain, self.codomain, self.matrix @ other.matrix)
        return NotImplemented

    @classmethod
    def identity(cls, space):
        return cls(space, space, np.eye(space.total_dim, dtype=np.complex128))

    @classmethod
    def zero(cls, domain, codomain):
        return cls(domain, codomain, np.zeros((codomain.total_dim, domain.total_dim), dtype=np.complex128))

    @classmethod
    def from_blocks(cls, domain, codomain, blocks):
        return cls(domain, codomain, np.block(blocks))


def apply_block(op, v):
    if not (v.space is op.domain or v.space == op.domain):
        raise SpaceMismatch("vector does not belong to the operator's domain")
    return DirectSumVector(op.codomain, op.matrix @ v.coords)
