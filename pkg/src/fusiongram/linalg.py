"""Dense complex linear-algebra primitives with an explicit tolerance policy.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every rank or
invertibility decision is taken relative to the largest singular value so the
classification is scale invariant.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AllZero, DimensionMismatch, NotHermitian


@dataclass(frozen=True)
class TolerancePolicy:
    """Thresholds for the numerical decisions made throughout the package.

    ``rank_rel`` is multiplied by ``sigma_max * max(rows, cols)`` to obtain the
    singular-value cutoff used for rank decisions. ``invert_rel`` is the
    smallest admissible ratio ``sigma_min / sigma_max`` of an invertible matrix.
    ``identity_abs`` is the absolute Frobenius tolerance for "equals identity"
    and "equals zero" checks.
    """

    rank_rel: float = 1e-12
    invert_rel: float = 1e-10
    identity_abs: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel", "invert_rel", "identity_abs"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")
        if self.rank_rel > self.invert_rel:
            raise ValueError("rank_rel must not exceed invert_rel")

    def rank_cutoff(self, sigma_max, shape):
        return self.rank_rel * float(sigma_max) * max(shape)


DEFAULT_TOL = TolerancePolicy()


@dataclass(frozen=True)
class NotInvertible:
    """Outcome of :func:`inverse_checked` for a (numerically) singular matrix."""

    ratio: float

    def __bool__(self):
        return False


def as_matrix(m):
    """Coerce to a finite 2-d complex array (copying only when needed)."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def adjoint(m):
    return np.conj(m).T


def _fix_phase(q):
    # first nonzero entry of every column made real positive
    q = q.copy()
    for k in range(q.shape[1]):
        col = q[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-14 * max(np.abs(col).max(), 1e-300))
        if idx.size:
            z = col[idx[0]]
            q[:, k] = col * (np.conj(z) / abs(z))
            q[idx[0], k] = abs(z)
    return q


def singular_values(m):
    """Singular values, descending."""
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def numerical_rank(m, tol=DEFAULT_TOL):
    a = as_matrix(m)
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_cutoff(s.max(initial=0.0), a.shape)))


def orthonormal_basis(m, tol=DEFAULT_TOL):
    """Orthonormal basis of ``range(m)``, columns ordered by descending singular value."""
    a = as_matrix(m)
    if a.shape[1] < 1:
        raise DimensionMismatch("need at least one column")
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise AllZero("matrix has numerical rank 0")
    r = int(np.sum(s > tol.rank_cutoff(s.max(initial=0.0), a.shape)))
    return _fix_phase(u[:, :r])


def hermitian_eigenvalues(m, tol=DEFAULT_TOL):
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("matrix is not square")
    scale = max(1.0, np.linalg.norm(a))
    if np.linalg.norm(a - adjoint(a)) > tol.identity_abs * scale:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh((a + adjoint(a)) / 2)


def operator_norm(m):
    s = singular_values(m)
    return float(s[0]) if s.size else 0.0


def pseudo_inverse(m, tol=DEFAULT_TOL):
    """Moore-Penrose pseudo-inverse by singular-value thresholding."""
    a = as_matrix(m)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=np.complex128)
    keep = s > tol.rank_cutoff(s.max(initial=0.0), a.shape)
    return (adjoint(vh[keep]) / s[keep]) @ adjoint(u[:, keep])


def inverse_checked(m, tol=DEFAULT_TOL):
    """Inverse of ``m``, or a :class:`NotInvertible` carrying ``sigma_min/sigma_max``."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("matrix is not square")
    s = singular_values(a)
    ratio = float(s[-1] / s[0]) if s.size and s[0] > 0 else 0.0
    if ratio <= tol.invert_rel:
        return NotInvertible(ratio)
    return np.linalg.solve(a, np.eye(a.shape[0], dtype=np.complex128))


def is_invertible(m, tol=DEFAULT_TOL):
    return not isinstance(inverse_checked(m, tol), NotInvertible)


def condition_number(m):
    s = singular_values(m)
    if s.size == 0 or s[-1] == 0.0:
        return np.inf
    return float(s[0] / s[-1])


def kernel_basis(m, tol=DEFAULT_TOL):
    """Orthonormal basis of the null space (possibly with zero columns)."""
    a = as_matrix(m)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = 0 if s.size == 0 or s[0] == 0.0 else int(np.sum(s > tol.rank_cutoff(s.max(initial=0.0), a.shape)))
    return adjoint(vh[r:])


def principal_angle(q1, q2):
    """Largest principal angle (radians) between the ranges of two orthonormal bases.

    Subspaces of different dimension are at angle pi/2; two trivial subspaces
    are at angle 0.
    """
    if q1.shape[1] != q2.shape[1]:
        return np.pi / 2
    if q1.shape[1] == 0:
        return 0.0
    # sine form is accurate for small angles
    resid = q2 - q1 @ (adjoint(q1) @ q2)
    s = np.linalg.svd(resid, compute_uv=False)
    return float(np.arcsin(min(1.0, s[0])))
