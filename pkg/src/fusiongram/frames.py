"""Weighted families of subspaces and their fusion-frame operators.

A family ``{(W_i, w_i)}`` is represented by a :class:`WeightedFamily`. The
synthesis operator ``T_W`` is the ``n x D`` matrix whose column block ``i`` is
``w_i * Q_i`` with ``Q_i`` the orthonormal basis of ``W_i``; the analysis
operator is its conjugate transpose and ``S_W = T_W T_W^*``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, LocalBasisMismatch, NotAFrame
from .linalg import (
    DEFAULT_TOL, NotInvertible, adjoint, as_matrix, hermitian_eigenvalues,
    inverse_checked, numerical_rank, operator_norm, singular_values,
)
from .spaces import DirectSumSpace, make_subspace, projection


@dataclass(frozen=True, eq=False)
class WeightedFamily:
    subspaces: tuple
    weights: np.ndarray

    def __post_init__(self):
        subs = tuple(self.subspaces)
        w = np.array(self.weights, dtype=np.float64).reshape(-1)
        if not subs:
            raise ValueError("a family needs at least one subspace")
        if len(subs) != w.shape[0]:
            raise DimensionMismatch(f"{len(subs)} subspaces but {w.shape[0]} weights")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("weights must be positive and finite")
        w.setflags(write=False)
        object.__setattr__(self, "subspaces", subs)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "space", DirectSumSpace(subs))

    @classmethod
    def from_spans(cls, spans, weights=None, tol=DEFAULT_TOL):
        subs = tuple(make_subspace(s, tol) for s in spans)
        if weights is None:
            weights = np.ones(len(subs))
        return cls(subs, weights)

    @property
    def ambient_dim(self):
        return self.subspaces[0].ambient_dim

    @property
    def total_dim(self):
        return self.space.total_dim

    def __len__(self):
        return len(self.subspaces)

    def bases(self):
        return [s.basis for s in self.subspaces]

    def projections(self):
        return [projection(s) for s in self.subspaces]

    def __eq__(self, other):
        return (isinstance(other, WeightedFamily) and len(self) == len(other)
                and np.array_equal(self.weights, other.weights)
                and all(a == b for a, b in zip(self.subspaces, other.subspaces)))

    __hash__ = None


class FrameBounds(NamedTuple):
    lower: float
    upper: float


@dataclass(frozen=True)
class Classification:
    is_bessel: bool
    is_frame: bool
    is_riesz_basis: bool
    is_parseval: bool
    is_orthonormal_basis: bool
    is_uniform: bool
    is_complete: bool

    def as_dict(self):
        return dict(self.__dict__)


class DeltaTest(NamedTuple):
    passed: bool
    residual: float


def check_compatible(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch("families live in different ambient spaces")
    if len(a) != len(b):
        raise DimensionMismatch("families have different index sets")


def synthesis(W):
    return np.hstack([w * q for w, q in zip(W.weights, W.bases())])


def analysis(W):
    return adjoint(synthesis(W))


def frame_operator(W):
    """``sum_i w_i^2 P_i``, assembled from the projections."""
    n = W.ambient_dim
    s = np.zeros((n, n), dtype=np.complex128)
    for w, p in zip(W.weights, W.projections()):
        s += w * w * p
    return (s + adjoint(s)) / 2


def frame_bounds(W):
    ev = hermitian_eigenvalues(frame_operator(W))
    return FrameBounds(max(float(ev[0]), 0.0), float(ev[-1]))


def is_frame(W, tol=DEFAULT_TOL):
    a, b = frame_bounds(W)
    return bool(a > tol.invert_rel * b)


def require_frame(W, tol=DEFAULT_TOL):
    if not is_frame(W, tol):
        raise NotAFrame("family is not a fusion frame (lower bound is zero)")


def frame_operator_inverse(W, tol=DEFAULT_TOL):
    inv = inverse_checked(frame_operator(W), tol)
    if isinstance(inv, NotInvertible):
        raise NotAFrame(f"frame operator is singular (sigma ratio {inv.ratio:.3g})")
    return (inv + adjoint(inv)) / 2


def is_complete(W, tol=DEFAULT_TOL):
    return numerical_rank(np.hstack(W.bases()), tol) == W.ambient_dim


def is_riesz_basis(W, tol=DEFAULT_TOL):
    """``T_W`` bijective: square and invertible."""
    if W.total_dim != W.ambient_dim:
        return False
    return not isinstance(inverse_checked(synthesis(W), tol), NotInvertible)


def classify(W, tol=DEFAULT_TOL):
    n = W.ambient_dim
    w = W.weights
    uniform = bool(np.all(np.abs(w - w[0]) <= 1e-12 * w[0]))
    parseval = bool(np.linalg.norm(frame_operator(W) - np.eye(n)) <= tol.identity_abs)
    return Classification(
        is_bessel=True,
        is_frame=is_frame(W, tol),
        is_riesz_basis=is_riesz_basis(W, tol),
        is_parseval=parseval,
        is_orthonormal_basis=bool(parseval and uniform and abs(w[0] - 1.0) <= 1e-12),
        is_uniform=uniform,
        is_complete=is_complete(W, tol),
    )


def riesz_constants(W):
    """Optimal ``(C, D)`` with ``C sum|f_j|^2 <= |sum w_j f_j|^2 <= D sum|f_j|^2``."""
    s = singular_values(synthesis(W))
    upper = float(s[0] ** 2)
    lower = float(s[-1] ** 2) if W.total_dim <= W.ambient_dim else 0.0
    return lower, upper


def riesz_delta_test(W, tol=DEFAULT_TOL):
    """Max over ``(i, j)`` of ``|w_i^2 P_i S^-1 P_j - delta_ij P_j|`` against ``identity_abs``."""
    s_inv = frame_operator_inverse(W, tol)
    projs = W.projections()
    worst = 0.0
    for i, (wi, pi) in enumerate(zip(W.weights, projs)):
        left = wi * wi * pi @ s_inv
        for j, pj in enumerate(projs):
            r = left @ pj
            if i == j:
                r = r - pj
            worst = max(worst, operator_norm(r))
    return DeltaTest(worst <= tol.identity_abs, worst)


def canonical_dual(W, tol=DEFAULT_TOL):
    s_inv = frame_operator_inverse(W, tol)
    subs = []
    for sub in W.subspaces:
        image = make_subspace(s_inv @ sub.basis, tol)
        # S^-1 is invertible, so dimensions cannot drop
        assert image.dim == sub.dim, "canonical dual lost a dimension"
        subs.append(image)
    return WeightedFamily(tuple(subs), W.weights)


def phi_matrix(V, W, tol=DEFAULT_TOL):
    """Coordinate matrix of ``phi_VW : sum W_i -> sum V_i``, ``{f_i} -> {P_Vi S_W^-1 f_i}``."""
    check_compatible(V, W)
    s_inv = frame_operator_inverse(W, tol)
    out = np.zeros((V.total_dim, W.total_dim), dtype=np.complex128)
    for i, (qv, qw) in enumerate(zip(V.bases(), W.bases())):
        out[V.space.block_slice(i), W.space.block_slice(i)] = adjoint(qv) @ s_inv @ qw
    return out


def alternate_operator(V, W, tol=DEFAULT_TOL):
    """``L_VW = T_V phi_VW T_W^*`` on the ambient space."""
    return synthesis(V) @ phi_matrix(V, W, tol) @ analysis(W)


def duality_defect(V, W, tol=DEFAULT_TOL):
    """Operator-norm distance of ``T_V phi_VW T_W^*`` from the identity."""
    require_frame(W, tol)
    L = alternate_operator(V, W, tol)
    return operator_norm(L - np.eye(W.ambient_dim))


def is_dual(V, W, tol=DEFAULT_TOL):
    return duality_defect(V, W, tol) <= tol.identity_abs


def is_pseudo_dual(V, W, tol=DEFAULT_TOL):
    require_frame(W, tol)
    return not isinstance(inverse_checked(alternate_operator(V, W, tol), tol), NotInvertible)


def unit_weight_family(W):
    return WeightedFamily(W.subspaces, np.ones(len(W)))


def reweighted(W, weights):
    return WeightedFamily(W.subspaces, weights)


def flatten_local(W, local_bases=None, tol=DEFAULT_TOL):
    """``n x D`` matrix with columns ``w_i f_ij`` for local bases ``{f_ij}`` of ``W_i``.

    Without ``local_bases`` the orthonormal basis columns are used, giving
    ``T_W`` itself.
    """
    if local_bases is None:
        return synthesis(W)
    if len(local_bases) != len(W):
        raise LocalBasisMismatch("one local basis per subspace is required")
    cols = []
    for w, sub, f in zip(W.weights, W.subspaces, local_bases):
        f = as_matrix(f)
        if f.shape != (sub.ambient_dim, sub.dim):
            raise LocalBasisMismatch(f"local basis has shape {f.shape}, expected {(sub.ambient_dim, sub.dim)}")
        outside = f - projection(sub) @ f
        if numerical_rank(f, tol) != sub.dim or np.linalg.norm(outside) > tol.identity_abs * max(1.0, np.linalg.norm(f)):
            raise LocalBasisMismatch("local basis does not span its subspace")
        cols.append(w * f)
    return np.hstack(cols)


def columns_form_riesz_basis(m, tol=DEFAULT_TOL):
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and not isinstance(inverse_checked(m, tol), NotInvertible)
