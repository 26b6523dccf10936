import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chi2corr.errors import DimensionError, NotOrthonormalError, SymmetryError
from chi2corr.models import MultinomialSpec, multinomial_model
from chi2corr.tensors import (
    random_orthonormal,
    rotate2,
    rotate3,
    rotate4,
    rotate_vector,
    symmetrize,
    validate_symmetry,
)


def rot2d(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_sym(rng, p, rank):
    return symmetrize(rng.standard_normal((p,) * rank))


def test_identity_is_symmetric():
    rep = validate_symmetry(np.eye(3))
    assert rep.passed
    assert rep.max_deviation == 0.0


def test_constructed_violation_reports_indices():
    t = np.zeros((2, 2, 2))
    t[0, 0, 1] = 1.0
    t[0, 1, 0] = 2.0
    rep = validate_symmetry(t)
    assert not rep.passed
    # (0,1,0) also disagrees with (1,0,0) == 0, which is the worst pair
    assert rep.max_deviation == 2.0
    assert {rep.index, rep.partner} == {(0, 1, 0), (1, 0, 0)}
    with pytest.raises(SymmetryError) as exc:
        rep.raise_if_failed("k3")
    assert "k3" in str(exc.value)
    assert exc.value.index == rep.index


def test_single_pair_violation():
    t = np.zeros((2, 2, 2))
    t[0, 0, 1] = t[1, 0, 0] = 1.0
    t[0, 1, 0] = 2.0
    rep = validate_symmetry(t)
    assert rep.max_deviation == 1.0
    assert {rep.index, rep.partner} <= {(0, 0, 1), (0, 1, 0), (1, 0, 0)}


def test_multinomial_k3_is_symmetric():
    model = multinomial_model(MultinomialSpec((0.25,) * 4, 10))
    assert validate_symmetry(model.k3).passed
    assert validate_symmetry(model.k4).passed


def test_symmetry_tolerance_is_relative():
    m = np.array([[1e6, 1.0], [1.0 + 1e-7, 0.0]])
    assert not validate_symmetry(m).passed
    m = np.array([[0.0, 1e6], [1e6 * (1 + 1e-13), 0.0]])
    assert validate_symmetry(m).passed


def test_symmetrize_fixes_violation():
    rng = np.random.default_rng(1)
    t = symmetrize(rng.standard_normal((3, 3, 3, 3)))
    assert validate_symmetry(t).passed


def test_rotate_identity():
    rng = np.random.default_rng(2)
    v = random_sym(rng, 4, 2)
    np.testing.assert_array_equal(rotate2(v, np.eye(4)), v)


def test_rotate2_half_turn_example():
    # R diag(1, 0) R^T with a 45 degree rotation has every entry 1/2
    out = rotate2(np.diag([1.0, 0.0]), rot2d(math.pi / 4))
    np.testing.assert_allclose(out, np.full((2, 2), 0.5), atol=1e-15)


def test_rotate3_then_inverse():
    rng = np.random.default_rng(3)
    t = random_sym(rng, 4, 3)
    r = random_orthonormal(4, rng)
    np.testing.assert_allclose(rotate3(rotate3(t, r), r.T), t, atol=1e-10)


def test_rotation_matches_index_rule():
    rng = np.random.default_rng(4)
    p = 3
    t = random_sym(rng, p, 3)
    r = random_orthonormal(p, rng)
    out = rotate3(t, r)
    for i, j, l in np.ndindex(p, p, p):
        expect = sum(r[i, a] * r[j, b] * r[l, c] * t[a, b, c]
                     for a in range(p) for b in range(p) for c in range(p))
        assert out[i, j, l] == pytest.approx(expect, abs=1e-12)


def test_rotate4_preserves_symmetry():
    rng = np.random.default_rng(5)
    t = random_sym(rng, 3, 4)
    out = rotate4(t, random_orthonormal(3, rng))
    assert validate_symmetry(out, tol=1e-12).passed


def test_non_orthonormal_rejected():
    with pytest.raises(NotOrthonormalError):
        rotate2(np.eye(2), np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_rank_checked():
    with pytest.raises(DimensionError):
        rotate3(np.eye(2), np.eye(2))
    with pytest.raises(DimensionError):
        rotate_vector(np.ones(3), np.eye(2))


def test_rotate_vector_examples():
    v = np.array([0.3, -1.2, 2.0])
    np.testing.assert_array_equal(rotate_vector(v, np.eye(3)), v)
    out = rotate_vector(np.array([1.0, 0.0]), rot2d(math.pi / 2))
    np.testing.assert_allclose(np.abs(out), [0.0, 1.0], atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.integers(1, 5))
def test_rotation_invariants(seed, p):
    rng = np.random.default_rng(seed)
    t = random_sym(rng, p, 3)
    r = random_orthonormal(p, rng)
    out = rotate3(t, r)
    assert np.sum(out**2) == pytest.approx(np.sum(t**2), rel=1e-10, abs=1e-10)
    tr_t = np.einsum("ijj->i", t)
    tr_o = np.einsum("ijj->i", out)
    assert tr_o @ tr_o == pytest.approx(tr_t @ tr_t, rel=1e-10, abs=1e-10)
    assert validate_symmetry(out).passed
    np.testing.assert_allclose(rotate3(out, r.T), t, atol=1e-10)
    v = rng.standard_normal(p)
    assert np.linalg.norm(rotate_vector(v, r)) == pytest.approx(np.linalg.norm(v), rel=1e-12)
