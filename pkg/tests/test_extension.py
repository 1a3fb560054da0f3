import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localmu.domains import closed_ball, contains, open_ball, polytope
from localmu.errors import PreconditionError
from localmu.extension import (RadialExtension, extend, extend_convex, materialize, recentre,
                               run_extension, safe_radius, verify_extension)
from localmu.fixtures import load_fixture, random_convex_fixture, random_isometry_fixture
from localmu.maps import (Affine, build_example_star_closed, build_example_two_balls, identity,
                          rotation2)
from localmu.spaces import l2_space, linf_space


def test_recentre_affine():
    S = linf_space(2)
    A = np.array([[0.0, -1.0], [1.0, 0.0]])
    T = Affine(A, [3, 4], S)
    U = open_ball(S, [0.5, 0.5], 1)
    V1, T0 = recentre(T, U, [0.5, 0.5])
    assert np.array_equal(T0(np.zeros(2)), [0, 0])
    x = np.random.default_rng(0).uniform(-0.5, 0.5, size=(20, 2))
    assert np.allclose(T0(x), x @ A.T)
    assert contains(V1, [0.9, -0.9]) and not contains(V1, [1.1, 0])
    assert V1.spec == open_ball(S, [0, 0], 1).spec or contains(V1, [0, 0])


def test_recentre_star_closed_is_already_centred():
    X, T = build_example_star_closed()
    _, T0 = recentre(T, X, [0, 0])
    pts = np.array([[-0.5, 0.25], [0.7, 0.0], [0.0, 0.0]])
    assert np.array_equal(T0(pts), T(pts))


def test_recentre_rejects_non_star_centre():
    U, T = build_example_two_balls()
    with pytest.raises(PreconditionError):
        recentre(T, U, [0, 0])


def test_safe_radius_examples():
    assert safe_radius(open_ball(l2_space(2), [0, 0], 1)) == pytest.approx(0.3)
    S = linf_space(2)
    square = polytope(S, [[1, 0], [-1, 0], [0, 1], [0, -1]], [2, 2, 2, 2], closed=False)
    assert safe_radius(square) == pytest.approx(0.6)
    X, _ = build_example_star_closed()
    with pytest.raises(PreconditionError, match="inradius"):
        safe_radius(X)


def test_safe_radius_zero_inradius_probe_along_y():
    # Directly above the origin the closed star set is left at once.
    X, _ = build_example_star_closed()
    assert not contains(X, [0, 1e-9])


def test_extend_linear_and_sphere():
    S = l2_space(2)
    L = Affine(rotation2(0.4), [0, 0], S)
    Tt = extend(L, 0.3)
    x = np.random.default_rng(2).normal(size=(50, 2)) * 10
    assert np.allclose(Tt(x), L(x), atol=1e-12)
    T0 = Affine(rotation2(0.4), [0, 0], S, domain=open_ball(S, [0, 0], 1))
    s = S.unit(x) * 0.3
    assert np.allclose(extend(T0, 0.3)(s), T0(s), atol=1e-15)
    with pytest.raises(ValueError):
        extend(L, 0)


def test_extend_two_balls_is_identity():
    U, T = build_example_two_balls()
    _, T0 = recentre(T, U, [0, 0], check_star=False)
    Tt = extend(T0, 0.3)
    assert np.allclose(Tt([0.5, 10]), [0.5, 10])
    assert np.array_equal(T([0.5, 10]), [-0.5, 10])


def test_materialize_examples():
    S2 = l2_space(2)
    assert np.array_equal(materialize(RadialExtension(identity(S2), 0.3)), np.eye(2))
    rot = Affine(rotation2(np.pi / 2), [0, 0], S2)
    assert np.allclose(materialize(extend(rot, 0.3)), [[0, -1], [1, 0]], atol=1e-15)
    Sinf = linf_space(2)
    swap = Affine([[0, 1], [-1, 0]], [0, 0], Sinf)
    assert np.array_equal(materialize(extend(swap, 0.3)), [[0, 1], [-1, 0]])


def test_verify_signed_permutation_fixture():
    fx = load_fixture("signed-perm-star")
    res = run_extension(fx.map, fx.domain, fx.center, n_samples=1000, seed=3)
    A, u = fx.generator
    assert np.abs(res.A - A).max() <= 1e-9 and np.abs(res.u - u).max() <= 1e-9
    assert res.defects.passes(1e-9)
    assert res.defects.invertibility_ok


def test_verify_rotation_fixture():
    fx = load_fixture("rotation-disc")
    res = run_extension(fx.map, fx.domain, fx.center, n_samples=1000)
    assert res.defects.worst() <= 1e-9
    rep = verify_extension(fx.map, fx.domain, fx.center, res.A, res.u, res.r, n_samples=500, seed=5)
    assert rep.worst() <= 1e-9


def test_verify_detects_wrong_matrix():
    fx = load_fixture("rotation-disc")
    res = run_extension(fx.map, fx.domain, fx.center, n_samples=500)
    rep = verify_extension(fx.map, fx.domain, fx.center, res.A * 1.001, res.u, res.r, n_samples=500)
    assert rep.agreement > 1e-4


def test_forced_star_closed_agreement_gap():
    fx = load_fixture("ex-star-closed")
    with pytest.raises(PreconditionError):
        run_extension(fx.map, fx.domain, fx.center)
    res = run_extension(fx.map, fx.domain, fx.center, force=True,
                        fallback_center=fx.fallback_center, probe_points=[[1.0, 0.0]])
    probe = res.defects.probes[0]
    assert probe["point"] == [1.0, 0.0]
    assert probe["agreement"] >= 0.8
    assert probe["agreement"] == pytest.approx(np.sin(1), abs=1e-9)
    assert any(n.get("forced") == "safe_radius" for n in res.notes)


def test_two_balls_refused_then_forced():
    U, T = build_example_two_balls()
    with pytest.raises(PreconditionError, match="star-shaped"):
        run_extension(T, U, [0, 0])
    res = run_extension(T, U, [0, 0], force=True, probe_points=[[0.5, 10.0]])
    # |-0.5 - 0.5| = 1 in the first coordinate.
    assert res.defects.probes[0]["agreement"] == pytest.approx(1.0)
    assert res.defects.agreement >= 0.9


def test_extend_convex_maxball_corners():
    fx = load_fixture("convex-maxball")
    res = extend_convex(fx.map, fx.domain, probe_points=fx.probe_points)
    A, u = fx.generator
    assert np.abs(res.A - A).max() <= 1e-9 and np.abs(res.u - u).max() <= 1e-9
    assert res.defects.boundary_agreement <= 1e-9
    corners = [p["point"] for p in res.defects.probes]
    for c in ([1, 1], [1, -1], [-1, 1], [-1, -1]):
        assert c in corners


def test_extend_convex_l2_ball():
    S = l2_space(2)
    X = closed_ball(S, [1, -1], 2)
    T = Affine(rotation2(1.3), [0.5, 2], S)
    res = extend_convex(T, X, n_samples=800)
    assert np.allclose(res.A, rotation2(1.3), atol=1e-9)
    assert res.defects.boundary_agreement <= 1e-9


def test_extend_convex_rejects_star_closed():
    X, T = build_example_star_closed()
    with pytest.raises(PreconditionError, match="convexity"):
        extend_convex(T, X.with_flags(convex=True))


@settings(max_examples=6, deadline=None)
@given(st.sampled_from(["linf", "l2"]), st.integers(2, 4), st.integers(0, 2 ** 32 - 1))
def test_random_round_trip(norm, dim, seed):
    fx = random_isometry_fixture(norm, dim, np.random.default_rng(seed))
    res = run_extension(fx.map, fx.domain, fx.center, n_samples=300, seed=seed)
    A, u = fx.generator
    assert np.abs(res.A - A).max() <= 1e-9
    assert np.abs(res.u - u).max() <= 1e-9
    assert res.defects.passes(1e-9)


@settings(max_examples=4, deadline=None)
@given(st.sampled_from(["linf", "l2"]), st.integers(2, 3), st.integers(0, 2 ** 32 - 1))
def test_random_convex_round_trip(norm, dim, seed):
    fx = random_convex_fixture(norm, dim, np.random.default_rng(seed))
    res = extend_convex(fx.map, fx.domain, n_samples=300, seed=seed, probe_points=fx.probe_points)
    A, u = fx.generator
    assert np.abs(res.A - A).max() <= 1e-9 and np.abs(res.u - u).max() <= 1e-9
    assert res.defects.boundary_agreement <= 1e-9
