import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shadow_cover import (ConeCheckFailed, NotHyperbolic, adapted_coordinates, make_linear_system,
                          make_perturbed_system)
from shadow_cover.systems import CAT, PH3, parse_modes

from conftest import LAMBDA_CAT


def test_cat_constants_from_characteristic_polynomial(cat):
    roots = np.roots([1, -3, 1])  # t^2 - trace t + det
    lam = min(abs(roots.min()), 1 / abs(roots.max()))
    assert cat.lambda_ == pytest.approx(lam, rel=1e-12)
    assert cat.lambda_ == pytest.approx(0.3819660113, abs=1e-10)
    assert cat.proj_bound == pytest.approx(1.0, abs=1e-12)


def test_identity_is_not_hyperbolic():
    with pytest.raises(NotHyperbolic):
        make_linear_system(np.eye(2, dtype=int))


def test_ph3_needs_flag_and_has_axis_center():
    with pytest.raises(NotHyperbolic):
        make_linear_system(PH3)
    system = make_linear_system(PH3, partially_hyperbolic=True)
    np.testing.assert_allclose(system.splitting.proj_c, np.diag([0.0, 0.0, 1.0]), atol=1e-12)


def test_rejects_non_unimodular():
    with pytest.raises(Exception):
        make_linear_system([[2, 0], [0, 1]])


@pytest.mark.parametrize("L", [CAT, [[0, 1], [-1, 3]], [[3, 2], [1, 1]]])
def test_splitting_invariants(L):
    system = make_linear_system(L)
    sp = system.splitting
    n = system.dim
    np.testing.assert_allclose(sp.proj_s + sp.proj_u, np.eye(n), atol=1e-12)
    np.testing.assert_allclose(sp.proj_s @ sp.proj_s, sp.proj_s, atol=1e-12)
    np.testing.assert_allclose(sp.proj_u @ sp.proj_u, sp.proj_u, atol=1e-12)
    assert np.isfinite(sp.cond)
    D = system.derivative(np.zeros(n))
    np.testing.assert_allclose(D @ sp.proj_s, sp.proj_s @ D, atol=1e-12)


def test_zero_perturbation_matches_linear(cat):
    p0 = make_perturbed_system(CAT, 0.0)
    pts = p0.sample_points()
    np.testing.assert_array_equal(p0.apply(pts), cat.apply(pts))
    assert p0.lambda_ == pytest.approx(cat.lambda_)
    for sp in p0.splittings_at(pts[:5]):
        np.testing.assert_allclose(sp.proj_s, cat.splitting.proj_s, atol=1e-15)


def _stable_direction_by_pullback(system, x, steps=40):
    # iterate forward, then pull a generic vector back with Df^-1
    orbit = [x]
    for _ in range(steps):
        orbit.append(system.apply(orbit[-1]))
    v = np.array([0.3, -1.1])
    for y in reversed(orbit[:-1]):
        v = np.linalg.solve(system.derivative(y), v)
        v /= np.linalg.norm(v)
    return v


def test_perturbed_cat_contraction_is_below_040(perturbed):
    grid = (np.arange(12) + 0.5) / 12
    worst = 0.0
    for a in grid:
        for b in grid:
            x = np.array([a, b])
            v = _stable_direction_by_pullback(perturbed, x)
            worst = max(worst, np.linalg.norm(perturbed.derivative(x) @ v))
    assert worst <= 0.40
    assert worst <= perturbed.lambda_
    assert perturbed.lambda_ < 1


def test_perturbed_splitting_matches_pullback(perturbed):
    x = np.array([0.31, 0.77])
    v = _stable_direction_by_pullback(perturbed, x)
    sp = perturbed.splitting_at(x)
    assert np.linalg.norm(sp.proj_u @ v) < 1e-10


def test_large_perturbation_fails_cone_check():
    with pytest.raises(ConeCheckFailed):
        make_perturbed_system(CAT, 10.0)


def test_parse_modes_rejects_fractional_frequency():
    with pytest.raises(Exception):
        parse_modes([{"frequency": [0.5, 1], "amplitude": [1, 0]}])


@given(st.tuples(st.floats(-3, 3), st.floats(-3, 3)).map(np.array))
def test_inverse_round_trip(perturbed, x):
    np.testing.assert_allclose(perturbed.apply_inverse(perturbed.apply(x)), x, atol=1e-12)


def test_adapted_cat_is_rotation(cat):
    to_a, from_a = adapted_coordinates(cat)
    np.testing.assert_allclose(to_a @ from_a, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(from_a.T @ from_a, np.eye(2), atol=1e-12)
    M = to_a @ cat.linear_part @ from_a
    # diagonal in adapted coordinates with the stable entry equal to lambda
    assert abs(M[0, 1]) < 1e-12 and abs(M[1, 0]) < 1e-12
    assert min(abs(np.diag(M))) == pytest.approx(LAMBDA_CAT)


def test_adapted_diagonal_is_identity():
    to_a, from_a = adapted_coordinates(np.diag([2.0, 0.5]))
    np.testing.assert_allclose(to_a, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(from_a, np.eye(2), atol=1e-12)


def test_adapted_shear_makes_projections_orthogonal():
    L = make_linear_system([[0, 1], [-1, 3]])
    to_a, from_a = adapted_coordinates(L)
    assert not np.allclose(from_a.T @ from_a, np.eye(2))
    np.testing.assert_allclose(to_a @ from_a, np.eye(2), atol=1e-12)
    for P in (L.splitting.proj_s, L.splitting.proj_u):
        Q = to_a @ P @ from_a
        np.testing.assert_allclose(Q, Q.T, atol=1e-12)
        assert np.linalg.norm(Q, 2) == pytest.approx(1.0, abs=1e-12)
    M = to_a @ L.linear_part @ from_a
    sv = np.linalg.norm(M @ (to_a @ L.splitting.stable_basis[:, 0]))
    assert sv / np.linalg.norm(to_a @ L.splitting.stable_basis[:, 0]) == pytest.approx(L.lambda_)
