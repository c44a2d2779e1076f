import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fusiongram.corpus import InstanceSpec, OperatorSpec, generate, make_operator
from fusiongram.errors import BadExponent, HypothesisViolated, NotDual
from fusiongram.frames import (
    alternate_operator, analysis, canonical_dual, frame_bounds, frame_operator,
    phi_matrix, synthesis,
)
from fusiongram.gram import (
    GramTriple, composition_check, cross_gram, gram, gram_block,
    gram_block_formula, gram_inverse, gram_pinv_formula,
    inv_equivalence_battery, norm_bounds, oblique_projection_check,
    reconstruct_operator, schatten_norm,
)
from fusiongram.linalg import NotInvertible, operator_norm

from conftest import random_matrix

RIESZ = InstanceSpec(3, 6, (2, 2, 2), "riesz_basis", weight_law=("uniform", 0.5, 2.0))


def _inv(seed, n):
    return make_operator(OperatorSpec("random_invertible", seed), n)


def test_phi_identity_for_onb():
    W = generate(InstanceSpec(1, 4, (2, 2), "fusion_onb"))
    np.testing.assert_allclose(phi_matrix(W, W), np.eye(4), atol=1e-12)


def test_phi_norm_bound():
    W = generate(InstanceSpec(7, 5, (2, 2, 2), "generic_frame", weight_law=("uniform", 0.5, 2.0)))
    V = generate(InstanceSpec(8, 5, (2, 2, 2), "generic_frame"))
    assert operator_norm(phi_matrix(V, W)) <= operator_norm(np.linalg.inv(frame_operator(W))) + 1e-12


def test_gram_identity_and_zero():
    W = generate(InstanceSpec(2, 4, (2, 2), "fusion_onb"))
    np.testing.assert_allclose(gram(np.eye(4), W, W).matrix, np.eye(4), atol=1e-12)
    np.testing.assert_array_equal(gram(np.zeros((4, 4)), W, W).matrix, 0)


def _gram_by_vectors(u, W, V):
    # column-by-column: G e = phi_WV T_V^* U T_W e
    t_w = synthesis(W)
    phi = phi_matrix(W, V)
    cols = [phi @ (analysis(V) @ (u @ (t_w @ e))) for e in np.eye(t_w.shape[1])]
    return np.stack(cols, axis=1)


def test_gram_matches_columnwise_assembly():
    W = generate(InstanceSpec(4, 5, (2, 1, 2), "generic_frame"))
    V = generate(InstanceSpec(5, 5, (3, 1, 2), "generic_frame", weight_law=("uniform", 0.5, 2.0)))
    u = random_matrix(6, 5, 5)
    np.testing.assert_allclose(gram(u, W, V).matrix, _gram_by_vectors(u, W, V), atol=1e-12)


def test_gram_norm_bound():
    W = generate(InstanceSpec(4, 5, (2, 2, 2), "generic_frame", weight_law=("uniform", 0.5, 2.0)))
    V = generate(InstanceSpec(9, 5, (2, 2, 2), "generic_frame", weight_law=("uniform", 0.5, 2.0)))
    u = random_matrix(1, 5, 5)
    a_v, b_v = frame_bounds(V)
    b_w = frame_bounds(W).upper
    assert operator_norm(gram(u, W, V).matrix) <= math.sqrt(b_w * b_v) / a_v * operator_norm(u) + 1e-9


def test_gram_block_examples():
    W = generate(InstanceSpec(2, 4, (2, 2), "fusion_onb"))
    t = GramTriple(np.eye(4), W, W)
    np.testing.assert_allclose(gram_block(t, 1, 1), np.eye(2), atol=1e-12)
    assert not np.any(gram_block(GramTriple(np.zeros((4, 4)), W, W), 0, 1))
    with pytest.raises(IndexError):
        gram_block(t, 2, 0)
    F = generate(InstanceSpec(3, 5, (2, 3, 1), "generic_frame", weight_law=("uniform", 0.5, 2.0)))
    t2 = GramTriple(random_matrix(3, 5, 5), F, F)
    for j in range(3):
        for i in range(3):
            assert np.linalg.norm(gram_block(t2, j, i) - gram_block_formula(t2, j, i)) <= 1e-12


def test_gram_inverse_ww_onb_identity():
    W = generate(InstanceSpec(2, 4, (2, 2), "fusion_onb"))
    inv = gram_inverse(GramTriple(np.eye(4), W, W), "WW")
    np.testing.assert_allclose(inv.matrix, np.eye(4), atol=1e-12)


@pytest.mark.parametrize("mode", ["WW", "dual_VW", "WV"])
def test_gram_inverse_matches_dense_inverse(mode):
    W = generate(RIESZ)
    u = _inv(9, 6)
    if mode == "WW":
        t = GramTriple(u, W, W)
    elif mode == "dual_VW":
        t = GramTriple(u, canonical_dual(W), W)
    else:
        t = GramTriple(u, W, generate(InstanceSpec(4, 6, (2, 2, 2), "generic_frame")))
    g = cross_gram(t).matrix
    inv = gram_inverse(t, mode).matrix
    direct = np.linalg.inv(g)
    assert operator_norm(inv - direct) <= 1e-8 * operator_norm(direct)
    assert operator_norm(g @ inv - np.eye(6)) <= 1e-8
    assert operator_norm(inv @ g - np.eye(6)) <= 1e-8


def test_gram_inverse_not_invertible_cases(three_lines):
    W = generate(RIESZ)
    sing = make_operator(OperatorSpec("singular", 2), 6)
    assert isinstance(gram_inverse(GramTriple(sing, W, W), "WW"), NotInvertible)
    assert isinstance(gram_inverse(GramTriple(np.eye(2), three_lines, three_lines), "WW"), NotInvertible)


def test_gram_inverse_mode_preconditions():
    W = generate(RIESZ)
    other = generate(InstanceSpec(4, 6, (2, 2, 2), "generic_frame"))
    with pytest.raises(HypothesisViolated):
        gram_inverse(GramTriple(np.eye(6), W, other), "WW")
    with pytest.raises(HypothesisViolated):
        gram_inverse(GramTriple(np.eye(6), other, W), "dual_VW")


def test_inv_battery_examples(three_lines):
    W = generate(RIESZ)
    r = inv_equivalence_battery(_inv(1, 6), W)
    assert r["agree"] and r["verdict"] is True
    r = inv_equivalence_battery(np.eye(2), three_lines)
    assert r["agree"] and r["verdict"] is False
    r = inv_equivalence_battery(make_operator(OperatorSpec("singular", 5), 6), W)
    assert r["agree"] and r["verdict"] is False


def test_pinv_riesz_dual_pair_invertible_u():
    W = generate(RIESZ)
    u = _inv(5, 6)
    t = GramTriple(u, canonical_dual(W), W)
    r = gram_pinv_formula(t, "dual_VW")
    assert r.condition_residual <= 1e-9 and r.formula_holds
    np.testing.assert_allclose(r.pinv.matrix, gram(np.linalg.inv(u), canonical_dual(W), W).matrix, atol=1e-8)


def test_pinv_parseval_commuting_projector():
    P = generate(InstanceSpec(6, 4, (2, 2, 2), "parseval"))
    u = make_operator(OperatorSpec("projector", 3, 2), 4)  # commutes with S = I
    r = gram_pinv_formula(GramTriple(u, P, P), "dual_VW")
    assert r.condition_holds and r.formula_holds


def test_pinv_rank_one_on_redundant_dual_pair():
    V, W = generate(InstanceSpec(11, 4, (2, 2, 2), "dual_pair"))
    u = make_operator(OperatorSpec("rank_one", 11), 4)
    r = gram_pinv_formula(GramTriple(u, V, W), "dual_VW")
    assert r.condition_residual >= 1e-2 and r.formula_error >= 1e-3
    assert r.consistent


def test_pinv_ww_riesz_counterexample():
    # L_W variant: the formula holds for any Riesz family and invertible U,
    # although the characterizing identity fails there
    W = generate(RIESZ)
    r = gram_pinv_formula(GramTriple(_inv(9, 6), W, W), "WW")
    assert r.formula_holds
    assert r.condition_residual > 1e-2
    assert not r.consistent


def test_reconstruct_examples():
    P = generate(InstanceSpec(2, 4, (2, 2, 2), "parseval"))
    np.testing.assert_allclose(reconstruct_operator(gram(np.eye(4), P, P), P, P), np.eye(4), atol=1e-10)
    V, W = generate(InstanceSpec(4, 5, (2, 2, 2), "dual_pair"))
    u = random_matrix(3, 5, 5)
    back = reconstruct_operator(gram(u, V, W), V, W)
    assert operator_norm(back - u) <= 1e-8 * operator_norm(u)
    np.testing.assert_allclose(reconstruct_operator(gram(np.zeros((5, 5)), V, W), V, W), 0, atol=1e-14)


def test_reconstruct_requires_dual():
    W = generate(InstanceSpec(4, 5, (2, 2, 2), "generic_frame", weight_law=("uniform", 0.5, 2.0)))
    Z = generate(InstanceSpec(5, 5, (2, 2, 2), "generic_frame"))
    with pytest.raises(NotDual):
        reconstruct_operator(gram(np.eye(5), Z, W), Z, W)


def test_composition_examples():
    P = generate(InstanceSpec(2, 4, (2, 2, 2), "parseval"))
    r = composition_check(np.eye(4), np.eye(4), P, P, P)
    assert r["general_residual"] <= 1e-12 and r["dual_checked"]
    g = gram(np.eye(4), P, P).matrix
    np.testing.assert_allclose(g @ g, g, atol=1e-10)
    V, Z = generate(InstanceSpec(7, 5, (2, 2, 2), "dual_pair"))
    W = generate(InstanceSpec(8, 5, (2, 2, 2), "generic_frame"))
    r = composition_check(random_matrix(1, 5, 5), random_matrix(2, 5, 5), W, V, Z)
    assert r["general_residual"] <= 1e-10 and r["dual_residual"] <= 1e-10


def test_oblique_projection_examples():
    W = generate(InstanceSpec(3, 4, (2, 2), "fusion_onb"))
    r = oblique_projection_check(W, W)
    assert r["idempotent_residual"] <= 1e-12
    V, W = generate(InstanceSpec(3, 5, (2, 2, 2), "dual_pair"))
    r = oblique_projection_check(V, W)
    assert r["idempotent_residual"] <= 1e-9 and r["selfadjoint_residual"] > 1e-9
    assert r["kernel_angle"] <= 1e-7
    F = generate(InstanceSpec(3, 5, (2, 2, 2), "generic_frame", weight_law=("uniform", 0.5, 2.0)))
    r = oblique_projection_check(canonical_dual(F), F)
    assert r["synthesis_residual"] <= 1e-9


def test_schatten_examples():
    assert schatten_norm(np.eye(3), 2).value == pytest.approx(math.sqrt(3))
    m = random_matrix(3, 4, 6)
    for p in (1, 2, 3.5, math.inf):
        assert schatten_norm(m, p).value == pytest.approx(schatten_norm(m.conj().T, p).value, rel=1e-12)
    s = random_matrix(4, 4, 4)
    for p in (1, 2):
        prod = np.linalg.svd(s @ m, compute_uv=False)
        assert np.sum(prod ** p) ** (1 / p) <= operator_norm(s) * schatten_norm(m, p).value * (1 + 1e-12)
    for bad in (0.5, float("nan"), "x"):
        with pytest.raises(BadExponent):
            schatten_norm(m, bad)


def test_norm_bounds_report():
    W = generate(InstanceSpec(2, 5, (2, 2, 2), "generic_frame"))
    V = generate(InstanceSpec(3, 5, (2, 2, 2), "generic_frame", weight_law=("uniform", 0.5, 2.0)))
    b = norm_bounds(random_matrix(4, 5, 5), W, V)
    assert b["gram_norm"] <= b["gram_bound"] + 1e-9
    assert b["phi_norm"] <= b["phi_bound"] + 1e-12
    assert b["lw_min_eig"] >= b["lw_lower_bound"] - 1e-9


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32), n=st.integers(3, 6))
def test_gram_properties(seed, n):
    dims = (2, 2, 2)
    V, W = generate(InstanceSpec(seed, n, dims, "dual_pair", weight_law=("uniform", 0.5, 2.0)))
    u1, u2 = random_matrix(seed, n, n), random_matrix(seed + 1, n, n)
    # linear in U
    lin = gram(u1 + 2 * u2, V, W).matrix - gram(u1, V, W).matrix - 2 * gram(u2, V, W).matrix
    assert operator_norm(lin) <= 1e-10 * (1 + operator_norm(gram(u1, V, W).matrix))
    # dual pairs: product law and reconstruction
    lhs = gram(u1, V, W).matrix @ gram(u2, V, W).matrix
    assert operator_norm(lhs - gram(u1 @ u2, V, W).matrix) <= 1e-9 * max(1.0, operator_norm(lhs))
    assert operator_norm(reconstruct_operator(gram(u1, V, W), V, W) - u1) <= 1e-8 * operator_norm(u1)
    assert operator_norm(alternate_operator(V, W) - np.eye(n)) <= 1e-9
