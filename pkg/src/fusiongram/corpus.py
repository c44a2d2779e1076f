"""Deterministic instance generators for every hypothesis class used in the checks.

Each generator draws from a :class:`~fusiongram.rng.Xoshiro256` stream seeded
by ``InstanceSpec.seed`` and certifies its output with the classification
routines; a failed certification redraws from the continuing stream, at most
16 times.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import GenerationFailed
from .frames import (
    WeightedFamily, classify, duality_defect, frame_operator, is_frame,
    unit_weight_family,
)
from .linalg import DEFAULT_TOL, adjoint, condition_number, orthonormal_basis
from .rng import Xoshiro256
from .spaces import Subspace, make_subspace

KINDS = ("generic_frame", "riesz_basis", "fusion_onb", "parseval", "dual_pair", "perturbation_pair")
KIND_ALIASES = {
    "frame": "generic_frame", "generic": "generic_frame", "riesz": "riesz_basis",
    "onb": "fusion_onb", "dual": "dual_pair", "perturbation": "perturbation_pair",
}
MAX_ATTEMPTS = 16
# generated Riesz bases are kept reasonably conditioned
MAX_RIESZ_CONDITION = 1e3


@dataclass(frozen=True)
class InstanceSpec:
    """Recipe for one generated instance.

    ``weight_law`` is ``"unit"``, ``("uniform", a, b)`` or a tuple of explicit
    weights. ``theta`` is used by ``perturbation_pair`` only and ``extra_dims``
    by ``dual_pair`` (0 gives the canonical dual).
    """

    seed: int
    ambient_dim: int
    subspace_dims: tuple
    kind: str = "generic_frame"
    weight_law: object = "unit"
    theta: float = 0.0
    extra_dims: int = 1

    def __post_init__(self):
        kind = KIND_ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        dims = tuple(int(d) for d in self.subspace_dims)
        object.__setattr__(self, "subspace_dims", dims)
        object.__setattr__(self, "weight_law", _normalize_law(self.weight_law, len(dims)))
        n = int(self.ambient_dim)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if n < 1 or not dims or any(d < 1 or d > n for d in dims):
            raise ValueError("subspace dimensions must lie in [1, ambient_dim]")
        total = sum(dims)
        if kind in ("riesz_basis", "fusion_onb") and total != n:
            raise ValueError(f"{kind} needs dimensions summing to {n}, got {total}")
        if total < n:
            raise ValueError(f"{kind} needs dimensions summing to at least {n}, got {total}")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValueError("theta must lie in [0, pi/2]")
        if self.extra_dims < 0:
            raise ValueError("extra_dims must be nonnegative")

    def to_dict(self):
        law = self.weight_law
        return {
            "seed": int(self.seed), "ambient_dim": int(self.ambient_dim),
            "subspace_dims": list(self.subspace_dims), "kind": self.kind,
            "weight_law": list(law) if isinstance(law, tuple) else law,
            "theta": float(self.theta), "extra_dims": int(self.extra_dims),
        }


def _normalize_law(law, count):
    if law == "unit":
        return law
    if isinstance(law, str):
        m = re.fullmatch(r"uniform\(\s*([^,]+?)\s*,\s*([^)]+?)\s*\)", law)
        if not m:
            raise ValueError(f"unknown weight law {law!r}")
        law = ("uniform", float(m.group(1)), float(m.group(2)))
    law = tuple(law)
    if law and law[0] == "uniform":
        _, a, b = law
        if not 0 < a <= b:
            raise ValueError("uniform weight law needs 0 < a <= b")
        return ("uniform", float(a), float(b))
    weights = tuple(float(x) for x in law)
    if len(weights) != count or any(not (w > 0 and math.isfinite(w)) for w in weights):
        raise ValueError("explicit weights must be positive, one per subspace")
    return weights


def _draw_weights(rng, law, count):
    if law == "unit":
        return np.ones(count)
    if law[0] == "uniform":
        return rng.uniform_array(count, law[1], law[2])
    return np.array(law)


def _random_subspace(rng, n, d):
    return make_subspace(rng.complex_matrix(n, d))


def _random_unitary(rng, n):
    q = orthonormal_basis(rng.complex_matrix(n, n))
    if q.shape[1] != n:
        raise GenerationFailed("degenerate Gaussian matrix")
    return q


def _blocks(m, dims):
    offs = np.concatenate([[0], np.cumsum(dims)])
    return [m[:, offs[k]:offs[k + 1]] for k in range(len(dims))]


def _generic(rng, spec):
    subs = tuple(_random_subspace(rng, spec.ambient_dim, d) for d in spec.subspace_dims)
    return WeightedFamily(subs, _draw_weights(rng, spec.weight_law, len(subs)))


def _riesz(rng, spec):
    m = rng.complex_matrix(spec.ambient_dim, spec.ambient_dim)
    if condition_number(m) > MAX_RIESZ_CONDITION:
        return None
    subs = tuple(make_subspace(b) for b in _blocks(m, spec.subspace_dims))
    return WeightedFamily(subs, _draw_weights(rng, spec.weight_law, len(subs)))


def _onb(rng, spec):
    q = _random_unitary(rng, spec.ambient_dim)
    subs = tuple(Subspace(b) for b in _blocks(q, spec.subspace_dims))
    return WeightedFamily(subs, _draw_weights(rng, spec.weight_law, len(subs)))


def _parseval(rng, spec, iterations=2000):
    fam = _generic(rng, spec)
    n, total = spec.ambient_dim, sum(spec.subspace_dims)
    w = fam.weights
    # trace condition sum w_i^2 d_i = n
    w = w * math.sqrt(n / float(np.sum(w ** 2 * np.array(spec.subspace_dims))))
    if np.any(w > 1):
        return None
    subs = fam.subspaces
    history = []
    for k in range(iterations):
        s = frame_operator(WeightedFamily(subs, w))
        res = np.linalg.norm(s - np.eye(n))
        if res <= 1e-14 * total:
            break
        history.append(res)
        # stagnating: no halving of the residual over 25 sweeps
        if k >= 50 and res > 0.5 * history[-26]:
            return None
        evals, evecs = np.linalg.eigh(s)
        if evals[0] <= 0:
            return None
        s_inv_half = (evecs / np.sqrt(evals)) @ adjoint(evecs)
        subs = tuple(make_subspace(s_inv_half @ sub.basis) for sub in subs)
    return WeightedFamily(subs, w)


def _extend_dual(rng, W, extra):
    """Dual of ``W`` with subspaces ``S_W^-1 W_i`` enlarged by ``extra`` random directions."""
    s_inv = np.linalg.inv(frame_operator(W))
    subs = []
    for sub in W.subspaces:
        k = min(extra, W.ambient_dim - sub.dim)
        span = s_inv @ sub.basis
        if k:
            span = np.hstack([span, rng.complex_matrix(W.ambient_dim, k)])
        subs.append(make_subspace(span))
    return WeightedFamily(tuple(subs), W.weights)


def _rotate(rng, sub, theta):
    """Rotate ``sub`` by ``theta`` in the plane of a unit ``a`` in it and a unit ``b`` orthogonal to it."""
    n = sub.ambient_dim
    if sub.dim == n or theta == 0.0:
        return sub
    q = sub.basis
    a = q @ rng.complex_matrix(sub.dim, 1)
    a /= np.linalg.norm(a)
    b = rng.complex_matrix(n, 1)
    b -= q @ (adjoint(q) @ b)
    b /= np.linalg.norm(b)
    plane = a @ adjoint(a) + b @ adjoint(b)
    rot = np.eye(n) + (math.cos(theta) - 1.0) * plane + math.sin(theta) * (b @ adjoint(a) - a @ adjoint(b))
    return make_subspace(rot @ q)


def _certify(spec, value, tol):
    kind = spec.kind
    if value is None:
        return False
    if kind == "generic_frame":
        return classify(value, tol).is_frame
    if kind == "riesz_basis":
        return classify(value, tol).is_riesz_basis
    if kind == "fusion_onb":
        return classify(unit_weight_family(value), tol).is_orthonormal_basis
    if kind == "parseval":
        return classify(value, tol).is_parseval
    if kind == "dual_pair":
        v, w = value
        return is_frame(w, tol) and duality_defect(v, w, tol) <= tol.identity_abs
    v, z = value
    return is_frame(v, tol) and is_frame(z, tol)


def generate(spec, tol=DEFAULT_TOL):
    """Instance described by ``spec``.

    Frame kinds return a :class:`WeightedFamily`; ``dual_pair`` returns
    ``(V, W)`` with ``V`` a dual of ``W``; ``perturbation_pair`` returns
    ``(V, Z)`` where ``Z_i`` is ``V_i`` rotated by ``theta``. The base family
    of a perturbation pair is a Riesz basis when the dimensions sum to
    ``ambient_dim`` and a generic frame otherwise.
    """
    rng = Xoshiro256(spec.seed)
    kind = spec.kind
    for _ in range(MAX_ATTEMPTS):
        if kind == "generic_frame":
            value = _generic(rng, spec)
        elif kind == "riesz_basis":
            value = _riesz(rng, spec)
        elif kind == "fusion_onb":
            value = _onb(rng, spec)
        elif kind == "parseval":
            value = _parseval(rng, spec)
        elif kind == "dual_pair":
            w = _generic(rng, spec)
            value = (_extend_dual(rng, w, spec.extra_dims), w)
        else:
            base = _riesz(rng, spec) if sum(spec.subspace_dims) == spec.ambient_dim else _generic(rng, spec)
            value = None if base is None else (
                base, WeightedFamily(tuple(_rotate(rng, s, spec.theta) for s in base.subspaces), base.weights))
        if _certify(spec, value, tol):
            return value
    raise GenerationFailed(f"could not certify a {kind} instance for seed {spec.seed}")


OPERATOR_KINDS = ("identity", "zero", "random", "random_invertible", "singular", "rank_one", "projector")


@dataclass(frozen=True)
class OperatorSpec:
    """Recipe for an operator on C^n; ``rank`` applies to ``singular`` (default n-1)."""

    kind: str
    seed: int = 0
    rank: object = field(default=None)

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")

    def to_dict(self):
        return {"kind": self.kind, "seed": int(self.seed), "rank": self.rank}


def make_operator(spec, n):
    """Operator from an :class:`OperatorSpec`.

    ``random_invertible`` and ``singular`` are ``Q1 diag(s) Q2^*`` with
    singular values drawn from [0.5, 2]; ``singular`` zeroes all but the
    first ``rank`` of them.
    """
    kind = spec.kind
    if kind == "identity":
        return np.eye(n, dtype=np.complex128)
    if kind == "zero":
        return np.zeros((n, n), dtype=np.complex128)
    rng = Xoshiro256(spec.seed)
    if kind == "random":
        return rng.complex_matrix(n, n)
    if kind == "rank_one":
        return rng.complex_matrix(n, 1) @ adjoint(rng.complex_matrix(n, 1))
    if kind == "projector":
        k = spec.rank if spec.rank is not None else max(1, n // 2)
        q = orthonormal_basis(rng.complex_matrix(n, k))
        return q @ adjoint(q)
    q1 = _random_unitary(rng, n)
    q2 = _random_unitary(rng, n)
    s = rng.uniform_array(n, 0.5, 2.0)
    if kind == "singular":
        r = spec.rank if spec.rank is not None else n - 1
        s[r:] = 0.0
    return (q1 * s) @ adjoint(q2)
