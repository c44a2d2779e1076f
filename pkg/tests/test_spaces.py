import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fusiongram.errors import AllZero, DimensionMismatch, SpaceMismatch
from fusiongram.spaces import (
    BlockOperator, DirectSumSpace, DirectSumVector, apply_block, embed,
    make_subspace, projection, restrict,
)

from conftest import random_matrix


def test_make_subspace_dims():
    assert make_subspace(np.array([[1.0], [0.0], [0.0]])).dim == 1
    assert make_subspace(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]])).dim == 1
    sub = make_subspace(random_matrix(3, 8, 3))
    p = projection(sub)
    assert sub.dim == 3
    assert np.linalg.norm(p @ p - p) <= 1e-12


def test_make_subspace_rejects_zero():
    with pytest.raises(AllZero):
        make_subspace(np.zeros((3, 1)))


def test_projection_examples():
    np.testing.assert_allclose(projection(make_subspace(np.array([[1.0], [0.0]]))), [[1, 0], [0, 0]])
    np.testing.assert_allclose(projection(make_subspace(np.eye(2))), np.eye(2), atol=1e-15)
    d = make_subspace(np.array([[1.0], [1.0]]))
    np.testing.assert_allclose(projection(d), 0.5 * np.ones((2, 2)), atol=1e-15)


def test_embed_restrict():
    e1 = make_subspace(np.array([[1.0], [0.0]]))
    np.testing.assert_allclose(restrict(e1, np.array([3.0, 4.0])), [3.0])
    np.testing.assert_allclose(restrict(e1, np.array([0.0, 5.0])), [0.0])
    sub = make_subspace(random_matrix(5, 6, 3))
    local = random_matrix(6, 3, 1)[:, 0]
    assert np.linalg.norm(restrict(sub, embed(sub, local)) - local) <= 1e-12
    f = random_matrix(7, 6, 1)[:, 0]
    np.testing.assert_allclose(embed(sub, restrict(sub, f)), projection(sub) @ f, atol=1e-12)
    with pytest.raises(DimensionMismatch):
        embed(sub, np.ones(2))
    with pytest.raises(DimensionMismatch):
        restrict(sub, np.ones(5))


def _space(seed, dims, n=6):
    return DirectSumSpace(tuple(make_subspace(random_matrix(seed + k, n, d)) for k, d in enumerate(dims)))


def test_direct_sum_layout():
    space = _space(1, (1, 2, 3))
    assert space.total_dim == 6 and space.block_dims == (1, 2, 3)
    assert space.block_slice(2) == slice(3, 6)
    v = DirectSumVector(space, [1, 2, 2, 3, 3, 3])
    np.testing.assert_allclose(v.block(1), [2, 2])
    assert v.norm() == pytest.approx(np.sqrt(1 + 8 + 27))


def test_apply_block_identity_and_zero():
    space = _space(2, (2, 2))
    v = DirectSumVector(space, random_matrix(3, 4, 1)[:, 0])
    np.testing.assert_allclose(apply_block(BlockOperator.identity(space), v).coords, v.coords)
    np.testing.assert_allclose(apply_block(BlockOperator.zero(space, space), v).coords, 0)


def test_apply_block_matches_per_block_loop():
    dom, cod = _space(4, (1, 2, 2)), _space(9, (2, 3))
    op = BlockOperator(dom, cod, random_matrix(5, 5, 5))
    v = DirectSumVector(dom, random_matrix(6, 5, 1)[:, 0])
    out = apply_block(op, v)
    for j in range(len(cod)):
        acc = sum(op.block(j, i) @ v.block(i) for i in range(len(dom)))
        np.testing.assert_allclose(out.block(j), acc, atol=1e-13)


def test_apply_block_space_mismatch():
    a, b = _space(1, (2, 2)), _space(50, (2, 2))
    op = BlockOperator.identity(a)
    with pytest.raises(SpaceMismatch):
        apply_block(op, DirectSumVector(b, np.ones(4)))


def test_block_index_and_shape_errors():
    space = _space(1, (1, 2))
    op = BlockOperator.identity(space)
    with pytest.raises(IndexError):
        op.block(2, 0)
    with pytest.raises(DimensionMismatch):
        BlockOperator(space, space, np.eye(2))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 31), dims=st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_composition_and_adjoint(seed, dims):
    space = _space(seed, dims)
    a = BlockOperator(space, space, random_matrix(seed, space.total_dim, space.total_dim))
    b = BlockOperator(space, space, random_matrix(seed + 7, space.total_dim, space.total_dim))
    np.testing.assert_allclose((a @ b).matrix, a.matrix @ b.matrix)
    np.testing.assert_allclose((a @ b).adjoint().matrix, (b.adjoint() @ a.adjoint()).matrix, atol=1e-12)
    rebuilt = BlockOperator.from_blocks(space, space, a.blocks())
    np.testing.assert_array_equal(rebuilt.matrix, a.matrix)
