"""Theorem batteries: each one evaluates the independent sides of a stated
equivalence or bound on one generated instance and reports agreement.

Every runner takes ``(spec, u_spec, tol)`` and returns a dict with
``results``, ``residuals`` and a boolean ``passed``.
"""

import math

import numpy as np

from .corpus import InstanceSpec, OperatorSpec, generate, make_operator
from .errors import HypothesisViolated
from .frames import (
    analysis, canonical_dual, classify, columns_form_riesz_basis, flatten_local,
    is_frame, phi_matrix, reweighted, riesz_constants, riesz_delta_test,
    synthesis, unit_weight_family,
)
from .gram import (
    GramTriple, adjoint_relation_residual, closed_range_check, composition_check,
    cross_gram, cross_gram_blockwise, dual_riesz_characterization, gram,
    gram_inverse, gram_pinv_formula, inv_equivalence_battery, norm_bounds,
    oblique_projection_check, orthonormal_gram_battery, reconstruct_operator,
)
from .linalg import (
    DEFAULT_TOL, NotInvertible, condition_number, inverse_checked,
    kernel_basis, numerical_rank, operator_norm,
)
from .rng import Xoshiro256
from .stability import (
    PerturbationInstance, check_stability, corollary_check, neumann_inverse,
)

# gram inverse residual slack, multiplied by the condition number
INVERSE_REL = 1e-8
DIRECT_MATCH_REL = 1e-7


def _single(spec):
    value = generate(spec)
    if isinstance(value, tuple):
        raise HypothesisViolated(f"battery needs a single family, {spec.kind} gives a pair")
    return value


def _pair(spec):
    value = generate(spec)
    if not isinstance(value, tuple):
        raise HypothesisViolated(f"battery needs a pair of families, {spec.kind} gives one")
    return value


def _operator(u_spec, n, default="random_invertible", seed=0):
    return make_operator(u_spec or OperatorSpec(default, seed), n)


# ---------------------------------------------------------------- Riesz bases

def random_local_bases(W, seed):
    """Non-orthonormal bases ``Q_i M_i`` of every subspace, ``M_i`` well conditioned."""
    rng = Xoshiro256(seed)
    out = []
    for sub in W.subspaces:
        m = rng.complex_matrix(sub.dim, sub.dim)
        while condition_number(m) > 1e3:
            m = rng.complex_matrix(sub.dim, sub.dim)
        out.append(sub.basis @ m)
    return out


def riesz_verdicts(W, tol=DEFAULT_TOL, local_seed=1):
    """Independent Riesz-basis verdicts for any family of subspaces."""
    n, D = W.ambient_dim, W.total_dim
    t = synthesis(W)
    t_star = analysis(W)
    unit = synthesis(unit_weight_family(W))
    c, d = riesz_constants(W)
    complete = classify(W, tol).is_complete
    frame = is_frame(W, tol)
    return {
        "riesz_decomposition": columns_form_riesz_basis(unit, tol),
        "synthesis_bijective": kernel_basis(t, tol).shape[1] == 0 and numerical_rank(t, tol) == n,
        "analysis_bijective": kernel_basis(t_star, tol).shape[1] == 0 and numerical_rank(t_star, tol) == D,
        "riesz_inequality": complete and c > (tol.invert_rel ** 2) * d,
        "flattened_local_riesz": columns_form_riesz_basis(
            flatten_local(W, random_local_bases(W, local_seed), tol), tol),
        "delta_test": frame and riesz_delta_test(W, tol).passed,
        "classify": classify(W, tol).is_riesz_basis,
    }


def weight_bounds_hold(W):
    """``sqrt(C) <= w_i <= sqrt(D)`` with the optimal constants of the flattened family."""
    c, d = riesz_constants(W)
    w = W.weights
    return bool(np.all(w >= math.sqrt(c) * (1 - 1e-10)) and np.all(w <= math.sqrt(d) * (1 + 1e-10)))


def phi_diagonal_residual(W, tol=DEFAULT_TOL):
    """For a Riesz family: distance of ``phi_WW`` from ``diag(1/w_i^2)``."""
    phi = phi_matrix(W, W, tol)
    target = np.diag(np.concatenate([np.full(s.dim, 1.0 / w ** 2) for s, w in zip(W.subspaces, W.weights)]))
    return operator_norm(phi - target)


def battery_riesz(spec, u_spec=None, tol=DEFAULT_TOL):
    W = _single(spec)
    verdicts = riesz_verdicts(W, tol, local_seed=spec.seed)
    vals = list(verdicts.values())
    residuals = {"delta": riesz_delta_test(W, tol).residual if is_frame(W, tol) else None}
    passed = len(set(vals)) == 1
    if vals[0]:
        residuals["phi_diagonal"] = phi_diagonal_residual(W, tol)
        residuals["weights_within_riesz_constants"] = weight_bounds_hold(W)
        passed = passed and residuals["phi_diagonal"] <= 1e-10 and residuals["weights_within_riesz_constants"]
    return {"results": verdicts, "residuals": residuals, "passed": passed}


def battery_weights(spec, u_spec=None, tol=DEFAULT_TOL, trials=5):
    W = _single(spec)
    rng = Xoshiro256(spec.seed ^ 0xA5A5)
    base = classify(W, tol).is_riesz_basis
    verdicts = [classify(reweighted(W, rng.uniform_array(len(W), 0.5, 2.0)), tol).is_riesz_basis
                for _ in range(trials)]
    return {"results": {"riesz": base, "reweighted": verdicts},
            "residuals": {}, "passed": all(v == base for v in verdicts)}


# ------------------------------------------------------------ Gram batteries

def battery_ort(spec, u_spec=None, tol=DEFAULT_TOL):
    W = _single(spec)
    report = orthonormal_gram_battery(W, tol)
    return {"results": report["verdicts"], "residuals": report["residuals"], "passed": report["agree"]}


def battery_inv(spec, u_spec=None, tol=DEFAULT_TOL):
    W = _single(spec)
    u = _operator(u_spec, W.ambient_dim, seed=spec.seed)
    report = inv_equivalence_battery(u, W, tol)
    return {"results": report["conditions"], "residuals": report["residuals"], "passed": report["agree"]}


def inverse_formula_check(t, mode, tol=DEFAULT_TOL):
    """Residuals of a closed-form inverse against the assembled Gram matrix."""
    g = cross_gram(t).matrix
    formula = gram_inverse(t, mode, tol)
    if isinstance(formula, NotInvertible):
        return {"invertible": False, "sigma_ratio": formula.ratio, "passed": True}
    eye = np.eye(g.shape[0])
    kappa = condition_number(g)
    right = operator_norm(g @ formula.matrix - eye)
    left = operator_norm(formula.matrix @ g - eye)
    direct = inverse_checked(g, tol)
    direct_rel = operator_norm(direct - formula.matrix) / operator_norm(direct)
    ok = max(left, right) <= INVERSE_REL * kappa and direct_rel <= DIRECT_MATCH_REL
    return {"invertible": True, "kappa": kappa, "right_residual": right, "left_residual": left,
            "direct_rel": direct_rel, "passed": ok}


def inverse_instance(spec, mode, u_spec=None):
    """Gram triple appropriate for ``mode`` built around the Riesz family of ``spec``."""
    W = _single(spec)
    n = W.ambient_dim
    u = _operator(u_spec, n, seed=spec.seed)
    if mode == "WW":
        return GramTriple(u, W, W)
    if mode == "dual_VW":
        return GramTriple(u, canonical_dual(W), W)
    other = generate(InstanceSpec(spec.seed ^ 0x77, n, spec.subspace_dims, "generic_frame",
                                  weight_law=("uniform", 0.5, 2.0)))
    return GramTriple(u, W, other)


def battery_inverse(spec, u_spec=None, tol=DEFAULT_TOL):
    results = {mode: inverse_formula_check(inverse_instance(spec, mode, u_spec), mode, tol)
               for mode in ("WW", "dual_VW", "WV")}
    return {"results": results, "residuals": {},
            "passed": all(r["passed"] for r in results.values())}


def battery_pinv(spec, u_spec=None, tol=DEFAULT_TOL):
    value = generate(spec)
    n = spec.ambient_dim
    u = _operator(u_spec, n, default="rank_one", seed=spec.seed)
    if isinstance(value, tuple):
        V, W = value
        r = gram_pinv_formula(GramTriple(u, V, W), "dual_VW", tol)
        variant = "dual_VW"
    else:
        r = gram_pinv_formula(GramTriple(u, value, value), "WW", tol)
        variant = "WW"
    return {"results": {"variant": variant, **r.report()}, "residuals": {},
            "passed": r.consistent}


def battery_norms(spec, u_spec=None, tol=DEFAULT_TOL):
    W = _single(spec)
    n = W.ambient_dim
    V = generate(InstanceSpec(spec.seed ^ 0x99, n, spec.subspace_dims, "generic_frame",
                              weight_law=("uniform", 0.5, 2.0)))
    u = _operator(u_spec, n, default="random", seed=spec.seed)
    b = norm_bounds(u, W, V, tol)
    t = GramTriple(u, W, V)
    two_paths = operator_norm(cross_gram(t).matrix - cross_gram_blockwise(t).matrix) / max(
        1.0, operator_norm(cross_gram(t).matrix))
    checks = {
        "gram": b["gram_norm"] <= b["gram_bound"] + 1e-9,
        "phi": b["phi_norm"] <= b["phi_bound"] + 1e-12,
        "alternate": b["alt_norm"] <= b["alt_bound"] * (1 + 1e-12) + 1e-12,
        "lw_lower": b["lw_min_eig"] >= b["lw_lower_bound"] - 1e-9,
        "assembly_paths": two_paths <= 1e-12,
        "adjoint_relation": adjoint_relation_residual(u, W, V, tol) <= 1e-10,
    }
    return {"results": checks, "residuals": {**b, "assembly_paths": two_paths},
            "passed": all(checks.values())}


def battery_reconstruct(spec, u_spec=None, tol=DEFAULT_TOL):
    V, W = _pair(spec)
    u = _operator(u_spec, spec.ambient_dim, default="random", seed=spec.seed)
    g = gram(u, V, W, tol)
    back = reconstruct_operator(g, V, W, tol)
    err = operator_norm(back - u) / max(operator_norm(u), 1e-300)
    return {"results": {"roundtrip_ok": err <= 1e-8}, "residuals": {"relative_error": err},
            "passed": err <= 1e-8}


def battery_oblique(spec, u_spec=None, tol=DEFAULT_TOL):
    V, W = _pair(spec)
    r = oblique_projection_check(V, W, tol)
    cr = closed_range_check(_operator(u_spec, spec.ambient_dim, seed=spec.seed), V, W, tol)
    checks = {
        "idempotent": r["idempotent_residual"] <= 1e-9,
        "synthesis_fixed": r["synthesis_residual"] <= 1e-9,
        "kernel_equal": r["kernel_angle"] <= 1e-7 and r["kernel_dims"][0] == r["kernel_dims"][1],
        "range": r["range_angle"] <= 1e-7,
        "closed_range_rank": cr["gram_rank"] == cr["reference_rank"] and cr["range_angle"] <= 1e-7,
    }
    return {"results": checks, "residuals": {**r, **cr}, "passed": all(checks.values())}


def battery_dual_riesz(spec, u_spec=None, tol=DEFAULT_TOL):
    V, W = _pair(spec)
    r = dual_riesz_characterization(V, W, tol)
    return {"results": r["verdicts"], "residuals": r["residuals"], "passed": r["agree"]}


def battery_composition(spec, u_spec=None, tol=DEFAULT_TOL):
    V, Z = _pair(spec)
    n = spec.ambient_dim
    W = generate(InstanceSpec(spec.seed ^ 0x55, n, spec.subspace_dims, "generic_frame"))
    rng = Xoshiro256(spec.seed ^ 0x33)
    u1, u2 = rng.complex_matrix(n, n), rng.complex_matrix(n, n)
    r = composition_check(u1, u2, W, V, Z, tol)
    ok = r["general_residual"] <= 1e-10 and (not r["dual_checked"] or r["dual_residual"] <= 1e-10)
    return {"results": {"dual_checked": r["dual_checked"]}, "residuals": r, "passed": ok}


# -------------------------------------------------------------- stability

def stable_instance(seed, n, dims, margin=0.5, theta=0.25, weight_law=("uniform", 0.5, 2.0)):
    """Riesz ``W = V``, rotated ``Z`` and perturbed ``U2`` with the bound met at ``margin``.

    ``theta`` and the operator perturbation are halved together until
    ``lhs <= margin * rhs``.
    """
    u1 = make_operator(OperatorSpec("random_invertible", seed), n)
    direction = make_operator(OperatorSpec("random", seed ^ 0xD1), n)
    direction /= operator_norm(direction)
    scale = 1.0
    for _ in range(60):
        V, Z = generate(InstanceSpec(seed, n, dims, "perturbation_pair", weight_law=weight_law,
                                     theta=theta * scale))
        u2 = u1 + 0.1 * scale * direction
        report = check_stability(PerturbationInstance(V, V, Z, u1, u2))
        if report.lhs <= margin * report.rhs:
            return PerturbationInstance(V, V, Z, u1, u2), report
        scale *= 0.5
    raise HypothesisViolated("could not meet the stability bound")


def battery_stability(spec, u_spec=None, tol=DEFAULT_TOL):
    inst, report = stable_instance(spec.seed, spec.ambient_dim, spec.subspace_dims)
    r = report.as_dict()
    return {"results": {"bound_holds": report.bound_holds, "invertible": report.invertible},
            "residuals": r, "passed": not report.counterexample and report.bound_holds}


def stable_corollary_instance(seed, n, dims, margin=0.5, theta=0.25, weight_law=("uniform", 0.5, 2.0)):
    """Riesz ``W``, rotated ``Z`` and ``U`` near the identity meeting the corollary bound at ``margin``."""
    direction = make_operator(OperatorSpec("random", seed ^ 0xC0), n)
    direction /= operator_norm(direction)
    scale = 1.0
    for _ in range(60):
        W, Z = generate(InstanceSpec(seed, n, dims, "perturbation_pair", weight_law=weight_law,
                                     theta=theta * scale))
        u = np.eye(n) + 0.1 * scale * direction
        report = corollary_check(W, Z, u)
        if report.lhs <= margin * report.rhs:
            return (W, Z, u), report
        scale *= 0.5
    raise HypothesisViolated("could not meet the corollary bound")


def battery_corollary(spec, u_spec=None, tol=DEFAULT_TOL):
    _, report = stable_corollary_instance(spec.seed, spec.ambient_dim, spec.subspace_dims)
    return {"results": {"bound_holds": report.bound_holds, "invertible": report.invertible},
            "residuals": report.as_dict(), "passed": report.bound_holds and not report.counterexample}


def battery_neumann(spec, u_spec=None, tol=DEFAULT_TOL):
    n = spec.ambient_dim
    F = make_operator(OperatorSpec("random_invertible", spec.seed), n)
    N = make_operator(OperatorSpec("random", spec.seed ^ 0x4E), n)
    f_inv_norm = operator_norm(np.linalg.inv(F))
    G = F - N * (0.9 / (f_inv_norm * operator_norm(N)))
    res = neumann_inverse(F, G)
    err = operator_norm(res.inverse - np.linalg.inv(G)) / operator_norm(np.linalg.inv(G))
    return {"results": {"terms_used": res.terms_used}, "residuals": {"relative_error": err},
            "passed": err <= 1e-8}


BATTERIES = {
    "riesz": (battery_riesz, "riesz_basis",
              "Riesz decomposition, bijective synthesis/analysis, Riesz inequality, flattened local "
              "bases and the S^-1 delta identity all decide fusion Riesz bases alike"),
    "weights": (battery_weights, "riesz_basis",
                "being a fusion Riesz basis does not depend on the weights"),
    "ort": (battery_ort, "fusion_onb",
            "for Riesz families: fusion ONB <=> G_W = I <=> G_W' = I"),
    "inv": (battery_inv, "riesz_basis",
            "W Riesz and U invertible <=> G_{U,W,W} / G_{U,W~,W} invertible, onto, one-to-one"),
    "inverse": (battery_inverse, "riesz_basis",
                "closed-form inverses of G_{U,W,W}, G_{U,V,W} (V dual) and G_{U,W,V}"),
    "pinv": (battery_pinv, "dual_pair",
             "G^+ = G_{U^+,V,W} <=> phi_VW T_W^* U = T_V^* S_V^-1 U (and for U^*)"),
    "norms": (battery_norms, "generic_frame",
              "norm bounds for G, phi_VW and L_VW, lower bound of L_W, adjoint relation"),
    "reconstruct": (battery_reconstruct, "dual_pair",
                    "U = T_W G_{U,W,V} T_W^* S_W^-1 for a dual W of V"),
    "oblique": (battery_oblique, "dual_pair",
                "G_{V,W} is an oblique projection with kernel ker T_V; closed range"),
    "dual_riesz": (battery_dual_riesz, "dual_pair",
                   "for a dual V of W: V Riesz <=> G_{V,W} = I <=> G_{V,W} has a left inverse"),
    "composition": (battery_composition, "dual_pair",
                    "G_{U1,W,V} G_{U2,W,Z} = G_{U1 L_WZ U2,W,V}; product law for dual pairs"),
    "stability": (battery_stability, "riesz_basis",
                  "perturbation bound => G_{U2,W,Z} invertible"),
    "corollary": (battery_corollary, "riesz_basis",
                  "Riesz W, |U - I| small, Z close to W => G_{U,W,Z} invertible"),
    "neumann": (battery_neumann, "riesz_basis",
                "Neumann series inverse of a perturbed invertible operator"),
}


def run_battery(name, spec, u_spec=None, tol=DEFAULT_TOL):
    fn = BATTERIES[name][0]
    return fn(spec, u_spec, tol)
