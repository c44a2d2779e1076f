"""Perturbation bounds that preserve invertibility of cross Gram matrices.

Only the main perturbation condition (weighted l^2 distance of the projections
bounded by ``lambda1``, ``lambda2`` and ``epsilon``) is implemented; the
alternative per-index and unweighted conditions are not.
"""

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import DivergenceDetected, HypothesisViolated, PurbViolated
from .frames import (
    check_compatible, frame_bounds, frame_operator_inverse, is_riesz_basis,
)
from .gram import gram
from .linalg import (
    DEFAULT_TOL, NotInvertible, adjoint, as_matrix, inverse_checked,
    operator_norm, singular_values,
)
from .rng import Xoshiro256

PROBE_COUNT = 200
PROBE_SEED = 0x5EED_0F_9B0BE5


@dataclass(frozen=True, eq=False)
class PerturbationInstance:
    """Families ``W`` (Bessel), ``V`` and ``Z`` (frames) sharing one weight list."""

    w: object
    v: object
    z: object
    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        check_compatible(self.w, self.v)
        check_compatible(self.w, self.z)
        for fam in (self.v, self.z):
            if not np.allclose(fam.weights, self.w.weights, rtol=1e-14, atol=0):
                raise HypothesisViolated("W, V and Z must carry the same weights")
        n = self.w.ambient_dim
        for name in ("u1", "u2"):
            u = as_matrix(getattr(self, name))
            if u.shape != (n, n):
                raise HypothesisViolated(f"{name} has shape {u.shape}, expected {(n, n)}")
            object.__setattr__(self, name, u)


@dataclass
class StabilityReport:
    mu: float
    lambda1: float
    lambda2: float
    epsilon: float
    B: float
    sum_weights_sq: float
    lhs: float
    rhs: float
    purb_residual: float
    bound_holds: bool
    sigma_ratio: float
    invertible: bool
    gram_inverse_norm: float
    s_v_inverse_norm: float
    s_z_inverse_norm: float
    u2_norm: float

    @property
    def verdict(self):
        return self.bound_holds and self.invertible

    @property
    def margin(self):
        return self.rhs - self.lhs

    @property
    def counterexample(self):
        """Bound satisfied yet the perturbed Gram matrix is singular."""
        return self.bound_holds and not self.invertible

    def as_dict(self):
        d = asdict(self)
        d.update(verdict=self.verdict, margin=self.margin, counterexample=self.counterexample)
        return d


def _difference_map(V, Z):
    """Stacked ``f -> {v_i (P_Zi - P_Vi) f}`` as an ``(N n) x n`` matrix."""
    return np.vstack([w * (pz - pv) for w, pz, pv in zip(V.weights, Z.projections(), V.projections())])


def perturbation_epsilon(V, Z):
    """Smallest ``epsilon`` in the perturbation inequality when ``lambda1 = lambda2 = 0``."""
    check_compatible(V, Z)
    return operator_norm(_difference_map(V, Z))


def _weighted_analysis_norms(fam, f):
    return np.sqrt(np.sum([(w * w) * np.sum(np.abs(p @ f) ** 2, axis=0)
                           for w, p in zip(fam.weights, fam.projections())], axis=0))


def purb_residual(V, Z, lambda1, lambda2, epsilon, probes=PROBE_COUNT, seed=PROBE_SEED):
    """Worst ``lhs - rhs`` of the perturbation inequality over probe vectors.

    Probes are all right singular vectors of the difference map followed by
    ``probes`` random unit vectors from the seeded stream.
    """
    n = V.ambient_dim
    diff = _difference_map(V, Z)
    _, _, vh = np.linalg.svd(diff)
    rng = Xoshiro256(seed)
    rand = rng.complex_matrix(n, probes)
    rand /= np.linalg.norm(rand, axis=0)
    f = np.hstack([adjoint(vh), rand])
    lhs = np.linalg.norm(diff @ f, axis=0)
    rhs = (lambda1 * _weighted_analysis_norms(Z, f) + lambda2 * _weighted_analysis_norms(V, f)
           + epsilon * np.linalg.norm(f, axis=0))
    return float(np.max(lhs - rhs))


def _report(u1_gram, W, V, Z, u2, mu, lambda1, lambda2, epsilon, rhs_override, tol):
    if lambda1 < 0 or lambda2 < 0:
        raise ValueError("lambda1 and lambda2 must be nonnegative")
    if epsilon is None:
        epsilon = perturbation_epsilon(V, Z)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    resid = purb_residual(V, Z, lambda1, lambda2, epsilon)
    if resid > 1e-12 * max(1.0, epsilon):
        raise PurbViolated(f"perturbation inequality fails on a probe by {resid:.3g}", resid)

    g1_inv = inverse_checked(u1_gram, tol)
    if isinstance(g1_inv, NotInvertible):
        raise HypothesisViolated(f"unperturbed Gram matrix is not invertible (ratio {g1_inv.ratio:.3g})")
    B = max(frame_bounds(W).upper, frame_bounds(V).upper, frame_bounds(Z).upper)
    sum_sq = float(np.sum(W.weights ** 2))
    s_v_inv = operator_norm(frame_operator_inverse(V, tol))
    s_z_inv = operator_norm(frame_operator_inverse(Z, tol))
    u2_norm = operator_norm(u2)
    g1_inv_norm = operator_norm(g1_inv)

    lhs = mu + (lambda1 + lambda2 + epsilon / np.sqrt(B)) * (
        np.sqrt(B) * s_z_inv * np.sqrt(sum_sq) * u2_norm + u2_norm)
    rhs = rhs_override if rhs_override is not None else 1.0 / g1_inv_norm / (B * s_v_inv)

    s = singular_values(gram(u2, W, Z, tol).matrix)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    return StabilityReport(
        mu=float(mu), lambda1=float(lambda1), lambda2=float(lambda2), epsilon=float(epsilon),
        B=float(B), sum_weights_sq=sum_sq, lhs=float(lhs), rhs=float(rhs), purb_residual=resid,
        bound_holds=bool(lhs < rhs), sigma_ratio=ratio, invertible=ratio > tol.invert_rel,
        gram_inverse_norm=g1_inv_norm, s_v_inverse_norm=s_v_inv, s_z_inverse_norm=s_z_inv,
        u2_norm=u2_norm,
    )


def check_stability(inst, lambda1=0.0, lambda2=0.0, epsilon=None, tol=DEFAULT_TOL):
    """Evaluate the invertibility-preservation bound for ``G_{U2,W,Z}``.

    ``epsilon`` defaults to :func:`perturbation_epsilon`. The report records
    whether the bound holds and, independently, whether the perturbed Gram
    matrix is invertible; only the direction bound => invertible is a claim.
    """
    g1 = gram(inst.u1, inst.w, inst.v, tol).matrix
    mu = operator_norm(inst.u1 - inst.u2)
    return _report(g1, inst.w, inst.v, inst.z, inst.u2, mu, lambda1, lambda2, epsilon, None, tol)


def corollary_check(W, Z, u, mu=None, lambda1=0.0, lambda2=0.0, epsilon=None, tol=DEFAULT_TOL):
    """Specialization to ``V = W`` Riesz, ``U1 = I`` with right side ``A_W / (B |S_W^-1|)``.

    Here ``B = max(B_W, B_Z)``, which is what the general bound reduces to for
    ``V = W``.
    """
    if not is_riesz_basis(W, tol):
        raise HypothesisViolated("W must be a fusion Riesz basis")
    inst = PerturbationInstance(W, W, Z, np.eye(W.ambient_dim), u)
    if mu is None:
        mu = operator_norm(inst.u2 - inst.u1)
    a_w = frame_bounds(W).lower
    B = max(frame_bounds(W).upper, frame_bounds(Z).upper)
    rhs = a_w / (B * operator_norm(frame_operator_inverse(W, tol)))
    g1 = gram(inst.u1, W, W, tol).matrix
    return _report(g1, W, W, Z, inst.u2, mu, lambda1, lambda2, epsilon, rhs, tol)


class NeumannResult(NamedTuple):
    inverse: np.ndarray
    terms_used: int


def neumann_inverse(F, G, k_max=10_000, tol=1e-15):
    """``G^-1 = sum_k [F^-1 (F - G)]^k F^-1``, truncated once a term is negligible.

    Requires ``|F^-1| |F - G| < 1``; otherwise :class:`DivergenceDetected`.
    ``tol`` is relative to the norm of the running sum.
    """
    F, G = as_matrix(F), as_matrix(G)
    f_inv = inverse_checked(F)
    if isinstance(f_inv, NotInvertible):
        raise HypothesisViolated("F is not invertible")
    q = operator_norm(f_inv) * operator_norm(F - G)
    if q >= 1:
        raise DivergenceDetected(f"contraction factor {q:.3g} >= 1", q)
    step = f_inv @ (F - G)
    term = f_inv
    total = f_inv.copy()
    terms = 1
    while terms < k_max:
        term = step @ term
        if operator_norm(term) <= tol * operator_norm(total):
            return NeumannResult(total, terms)
        total = total + term
        terms += 1
    raise DivergenceDetected(f"no convergence within {k_max} terms", q)
