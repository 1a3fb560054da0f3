import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localmu.domains import open_ball
from localmu.errors import DomainError, PreconditionError
from localmu.maps import (Affine, build_example_star_closed, build_example_two_balls, identity,
                          image_domain, rotation2)
from localmu.midpoint import (SphereSet, certify_midpoint, chain_midpoint_defect,
                              choose_subdivision, dyadic_chain, fixed_center_check,
                              midpoint_defect, segment_escape, spacing_collapse_check)
from localmu.spaces import l2_space, linf_space, reflect


def test_choose_subdivision_examples():
    S = l2_space(2)
    assert choose_subdivision([0, 0], [1, 0], 0.3, S) == 2
    assert choose_subdivision([1, 1], [1, 1], 0.01, S) == 0
    assert choose_subdivision([0, 0], [10, 0], 0.1, S) == 7
    with pytest.raises(ValueError):
        choose_subdivision([0, 0], [1, 0], 0, S)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_choose_subdivision_matches_enumeration(length, eps):
    n = choose_subdivision([0.0], [length], eps, l2_space(1))
    first = next(k for k in range(200) if length / 2.0 ** k < eps)
    assert n == first


def test_dyadic_chain_examples():
    f, g = np.array([1.0, -2.0]), np.array([3.0, 5.0])
    c = dyadic_chain(f, g, 1)
    assert np.array_equal(c.points, [f, (f + g) / 2, g])
    c = dyadic_chain([0, 0], [4, 0], 2)
    assert c.points[:, 0].tolist() == [0, 1, 2, 3, 4]
    assert len(dyadic_chain(f, g, 10)) == 1025
    with pytest.raises(ValueError):
        dyadic_chain(f, g, 0)


def test_chain_defect_affine_and_branch():
    S = linf_space(3)
    A = Affine([[0, 1, 0], [0, 0, -1], [1, 0, 0]], [1, 2, 3], S)
    _, worst = chain_midpoint_defect(A, dyadic_chain([0, 0, 0], [5, -1, 2], 8))
    assert worst <= 1e-12
    _, T = build_example_two_balls()
    deltas, worst = chain_midpoint_defect(T, dyadic_chain([-0.5, 9.2], [0.7, 10.6], 6))
    assert worst <= 1e-12 and len(deltas) == 63


def test_chain_defect_on_sin_tail_is_positive():
    _, F = build_example_star_closed()
    deltas, worst = chain_midpoint_defect(F, dyadic_chain([0, 0], [1, 0], 3))
    # Direct evaluation: sin is strictly concave on (0, 1].
    x = np.arange(9) / 8
    oracle = np.abs(np.sin(x[:-2]) + np.sin(x[2:]) - 2 * np.sin(x[1:-1]))
    assert np.allclose(deltas, oracle, atol=1e-15)
    assert worst > 0


def test_chain_defect_names_escaping_point():
    _, T = build_example_two_balls()
    with pytest.raises(DomainError, match="h_"):
        chain_midpoint_defect(T, dyadic_chain([0, 0], [0, 10], 3))


def test_spacing_collapse_bound():
    _, F = build_example_star_closed()
    rows = spacing_collapse_check(F, dyadic_chain([0, 0], [1, 0], 6))
    assert [r["level"] for r in rows] == list(range(1, 7))
    for r in rows:
        assert r["defect"] <= r["bound"] * (1 + 1e-12) + 1e-15
    S = l2_space(2)
    A = Affine(rotation2(0.3), [1, 1], S)
    assert all(r["defect"] <= 1e-12 for r in spacing_collapse_check(A, dyadic_chain([0, 0], [3, 1], 5)))


def test_midpoint_defect_examples():
    S = l2_space(2)
    R = Affine(rotation2(0.7), [1, 2], S, domain=open_ball(S, [0, 0], 1))
    rng = np.random.default_rng(0)
    for _ in range(50):
        f, g = open_ball(S, [0, 0], 1).sample(rng, 2)
        assert midpoint_defect(R, f, g) <= 1e-12
    _, T = build_example_two_balls()
    assert midpoint_defect(T, [0.3, 9.5], [-0.8, 10.9]) == 0
    with pytest.raises(DomainError, match="r ="):
        midpoint_defect(T, [0, 0], [0, 10])


def test_segment_escape():
    U, _ = build_example_two_balls()
    r = segment_escape(U, np.array([0.0, 0.0]), np.array([0.0, 10.0]))
    assert r == pytest.approx(0.1, abs=1 / 256)


def test_certify_midpoint_ball_and_refusal():
    S = linf_space(2)
    U = open_ball(S, [0, 0], 1)
    A = Affine([[0, 1], [-1, 0]], [0.5, 0], S)
    cert = certify_midpoint(A, U, [-0.5, 0.2], [0.4, -0.3], U2=image_domain(A, U))
    assert cert.certified and cert.n >= 1 and cert.chain_max <= 1e-12
    X, F = build_example_star_closed()
    cert = certify_midpoint(F, X, [0, 0], [1, 0])
    assert not cert.certified
    assert "margin" in cert.reason


def test_certify_refuses_escaping_segment():
    U, T = build_example_two_balls()
    cert = certify_midpoint(T, U, [0, 0], [0, 10])
    assert not cert.certified and "leaves" in cert.reason


# -- fixed centres -------------------------------------------------------------

def test_sphere_set_membership_oracle():
    S = linf_space(2)
    L = SphereSet(S, [-1, 0], [1, 0], 1.0)
    # Brute force over a grid: the set is the vertical segment {0} x [-1, 1].
    g = np.linspace(-2, 2, 401)
    P = np.array(np.meshgrid(g, g)).reshape(2, -1).T
    hit = P[L.contains_fn(P)]
    assert np.all(hit[:, 0] == 0) and hit[:, 1].min() == -1 and hit[:, 1].max() == 1
    pts = L.sample(np.random.default_rng(0), 100)
    assert L.contains_fn(pts).all()


def test_fixed_center_examples():
    S = linf_space(2)
    L = SphereSet(S, [-1, 0], [1, 0], 1.0)
    flip = Affine(np.diag([1.0, -1.0]), [0, 0], S)
    assert fixed_center_check(L, [0, 0], identity(S)).value == 0
    assert fixed_center_check(L, [0, 0], flip).value == 0
    psi = Affine(-np.eye(2), [0, 0], S)
    assert fixed_center_check(L, [0, 0], psi).value == 0


def test_fixed_center_l2_pair_set_is_the_centre():
    # Strict convexity: at r = ||h - h'|| / 2 the set collapses to the midpoint.
    S = l2_space(3)
    h, hp = np.array([0, 0, -1.0]), np.array([0, 0, 1.0])
    L = SphereSet(S, h, hp, 1.0)
    pts = L.sample(np.random.default_rng(1), 20)
    assert np.allclose(pts, 0)
    for theta in (0.3, 1.1, 2.5):
        R = np.eye(3)
        R[:2, :2] = rotation2(theta)
        assert fixed_center_check(L, [0, 0, 0], Affine(R, np.zeros(3), S)).value <= 1e-12


def test_fixed_center_needs_centre_in_set():
    S = l2_space(3)
    L = SphereSet(S, [0, 0, -1.0], [0, 0, 1.0], 2.0)
    assert np.allclose(L.sample(np.random.default_rng(1), 50)[:, 2], 0, atol=1e-9)
    with pytest.raises(PreconditionError, match="not in the set"):
        fixed_center_check(L, [0, 0, 0], identity(S))


def test_fixed_center_rejects_non_invariant_map():
    S = linf_space(2)
    L = SphereSet(S, [-1, 0], [1, 0], 1.0)
    with pytest.raises(PreconditionError):
        fixed_center_check(L, [0, 0], Affine(np.eye(2), [0.5, 0], S))
    with pytest.raises(PreconditionError):
        fixed_center_check(L, [0.5, 0], identity(S))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_reflection_fixes_centre(seed):
    rng = np.random.default_rng(seed)
    S = linf_space(3)
    h = rng.normal(size=3)
    hp = rng.normal(size=3)
    c = 0.5 * (h + hp)
    L = SphereSet(S, h, hp, 0.5 * S.norm(h - hp))
    psi = Affine(-np.eye(3), 2 * c, S)
    assert np.allclose(psi(c), reflect(c, c))
    assert fixed_center_check(L, c, psi, n_samples=50, seed=seed).value <= 1e-12
