import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from localmu.errors import DimensionError, DomainError, NonFiniteError
from localmu.spaces import (Segment, as_points, as_vector, distance, l1_space, l2_space,
                            linf_space, lp_space, norm_eval, norm_metric, polyhedral_space,
                            reflect, segment_point, shipped_spaces, space_from_spec,
                            unit_directions, weighted_linf_space)


def test_norm_examples():
    assert norm_eval(linf_space(2), [3, -4]) == 4
    assert norm_eval(l2_space(2), [3, 4]) == 5
    for S in shipped_spaces(3):
        assert norm_eval(S, np.zeros(3)) == 0


def test_distance_examples():
    assert distance(linf_space(2), [0, 0], [1, -2]) == 2
    assert distance(l1_space(2), [1, 1], [0, 0]) == 2
    x = [0.3, -7.1]
    for S in shipped_spaces(2):
        assert distance(S, x, x) == 0


def test_reflect_examples():
    v = np.array([1.5, -2.0, 0.25])
    assert np.array_equal(reflect(np.zeros(3), v), -v)
    assert np.array_equal(reflect(v, v), v)
    assert np.array_equal(reflect([1, 1], [0, 3]), [2, -1])


def test_segment_point_examples():
    a, b = np.array([0.0, 0.0]), np.array([2.0, 4.0])
    assert np.array_equal(segment_point(a, b, 1), a)
    assert np.array_equal(segment_point(a, b, 0), b)
    assert np.allclose(segment_point(a, b, 0.5), [1, 2])
    with pytest.raises(DomainError):
        segment_point(a, b, 1.5)
    seg = Segment(a, b)
    assert np.allclose(seg.points([0.0, 1.0]), [b, a])


def test_validation_errors():
    S = l2_space(2)
    with pytest.raises(DimensionError):
        norm_eval(S, [1, 2, 3])
    with pytest.raises(NonFiniteError):
        norm_eval(S, [1, np.nan])
    with pytest.raises(NonFiniteError):
        distance(S, [np.inf, 0], [0, 0])
    with pytest.raises(DimensionError):
        as_points(np.zeros((3, 4)), 2)
    with pytest.raises(DimensionError):
        as_vector(np.zeros((2, 2)))


def test_norms_match_numpy():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(200, 5))
    for p in (1, 2, np.inf, 1.5, 3.5, 7):
        assert np.allclose(lp_space(5, p).norm(X), np.linalg.norm(X, ord=p, axis=1), rtol=1e-13)


def test_lp_stable_for_large_entries():
    S = lp_space(2, 4)
    assert np.isclose(norm_eval(S, [1e200, 0]), 1e200)
    assert norm_eval(S, [1e-200, 0]) > 0


def test_weighted_and_polyhedral_by_formula():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(100, 3))
    w = np.array([0.5, 1.0, 3.0])
    assert np.allclose(weighted_linf_space(w).norm(X), [max(abs(x * w)) for x in X])
    F = rng.normal(size=(6, 3))
    assert np.allclose(polyhedral_space(F).norm(X), [max(abs(F @ x)) for x in X])


def test_invalid_norm_parameters():
    with pytest.raises(ValueError):
        lp_space(2, 0.5)
    with pytest.raises(ValueError):
        weighted_linf_space([1.0, 0.0])
    with pytest.raises(ValueError):
        polyhedral_space([[1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(ValueError):
        l2_space(0)


def test_coord_bound_covers_unit_ball():
    rng = np.random.default_rng(3)
    for S in shipped_spaces(3, rng):
        u = S.unit(rng.normal(size=(2000, 3)))
        assert np.all(np.abs(u) <= S.coord_bound + 1e-12), S.label


def test_dual_norm_holder_inequality():
    rng = np.random.default_rng(4)
    for S in shipped_spaces(4, rng):
        if S.dual is None:
            continue
        x, y = rng.normal(size=(2, 500, 4))
        assert np.all(np.abs((x * y).sum(1)) <= S.norm(x) * S.dual(y) * (1 + 1e-12)), S.label


def test_space_spec_roundtrip():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(20, 3))
    for S in shipped_spaces(3, rng):
        T = space_from_spec(S.spec)
        assert np.array_equal(S.norm(x), T.norm(x))
    with pytest.raises(ValueError):
        space_from_spec({"norm": "l7", "dim": 2})


def test_unit_directions_include_axes_and_corners():
    S = linf_space(3)
    D = unit_directions(S, 64, np.random.default_rng(0))
    assert D.shape == (64, 3)
    assert np.allclose(S.norm(D), 1)
    assert any(np.array_equal(d, [1, 1, 1]) for d in D)
    assert any(np.array_equal(d, [0, 0, -1]) for d in D)


def test_norm_metric_translation_invariant():
    S = l1_space(2)
    d = norm_metric(S)
    assert d.translation_invariant
    assert d(np.array([1.0, 2.0]), np.array([0.0, 0.0])) == 3


finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(dim=st.integers(1, 6), data=st.data())
def test_norm_axioms(dim, data):
    x = data.draw(arrays(float, dim, elements=finite))
    y = data.draw(arrays(float, dim, elements=finite))
    lam = data.draw(finite)
    for S in shipped_spaces(dim):
        nx, ny = norm_eval(S, x), norm_eval(S, y)
        scale = 1e-12 * (nx + ny + 1)
        assert norm_eval(S, x + y) <= nx + ny + scale
        assert np.isclose(norm_eval(S, lam * x), abs(lam) * nx, rtol=1e-12, atol=1e-300)
        assert (nx == 0) == (not np.any(x))


@settings(max_examples=200, deadline=None)
@given(dim=st.integers(1, 8), data=st.data())
def test_reflection_is_isometric_involution(dim, data):
    c, x, y = (data.draw(arrays(float, dim, elements=st.floats(-1e3, 1e3))) for _ in range(3))
    for S in shipped_spaces(dim):
        assert np.allclose(reflect(c, reflect(c, y)), y, rtol=0, atol=4 * np.spacing(np.abs(y) + np.abs(c) + 1))
        assert np.isclose(distance(S, reflect(c, x), reflect(c, y)), distance(S, x, y), rtol=1e-12, atol=1e-12)
