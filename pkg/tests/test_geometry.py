"""Surface geometry engine against frozen closed-form values.

The reference numbers were computed symbolically (exact rationals) for
the two-circle surface in R^6 — the real part of the doubled degree-
(1,2,3) curve — before this implementation existed:

    at (1, 0):  f  = (1, 0, 1, 0, 2/3, 0)
                f_x = (1, 0, 2, 0, 2, 0),  f_y = (0, -1, 0, -2, 0, -2)
                E = G = 9, F = 0
    Gauss curvature:  K = -8 / (1 + 2(x^2 + y^2))^4,  K(0,0) = -8
"""

import numpy as np
import pytest
import sympy as sp

from isopedal.errors import NotImmersion
from isopedal.geometry import (
    SurfaceJets,
    curvatures,
    ellipse_test,
    first_fundamental,
    first_normal_rank,
    geometry_sample,
    hodge_relation_residuals,
    intrinsic_gauss,
    isotropy_order,
    second_fundamental,
    third_form_recursive_defect,
)
from isopedal.grid import Grid
from isopedal.weierstrass import preset_curve, surface_evaluator


def holo3():
    return surface_evaluator(preset_curve("holo3"))


def closed_form_K(x, y):
    return -8.0 / (1.0 + 2.0 * (x * x + y * y)) ** 4


def test_frozen_position_and_metric_at_probe():
    ev = holo3()
    b = SurfaceJets(ev, np.array([1.0]), np.array([0.0]), 3)
    f = b.f.value().real[:, 0]
    assert np.max(np.abs(f - np.array([1, 0, 1, 0, 2 / 3, 0]))) < 1e-14
    fx = b.partial(1, 0).value().real[:, 0]
    fy = b.partial(0, 1).value().real[:, 0]
    assert np.max(np.abs(fx - np.array([1, 0, 2, 0, 2, 0]))) < 1e-14
    assert np.max(np.abs(fy - np.array([0, -1, 0, -2, 0, -2]))) < 1e-14
    E, F, G, _ = first_fundamental(ev, (1.0, 0.0))
    assert abs(E - 9) < 1e-12 and abs(G - 9) < 1e-12 and abs(F) < 1e-12


def test_gauss_curvature_closed_form_on_grid():
    ev = holo3()
    grid = Grid()
    x, y = grid.points()
    b = SurfaceJets(ev, x, y, 3)
    K = b.curvature_scalars()["K"]
    want = closed_form_K(x, y)
    assert np.max(np.abs(K - want) / np.abs(want)) < 1e-10


def test_gauss_curvature_at_origin():
    assert abs(curvatures(holo3(), (0.0, 0.0)).K + 8.0) < 1e-12
    assert abs(curvatures(holo3(), (1.0, 0.0)).K + 8.0 / 81.0) < 1e-12


def test_extrinsic_matches_intrinsic_gauss():
    ev = holo3()
    x = np.array([0.5, 0.9, 1.2])
    y = np.array([0.8, 0.35, 1.1])
    b = SurfaceJets(ev, x, y, 4)
    K_ext = b.curvature_scalars()["K"]
    K_int = intrinsic_gauss(b)
    assert np.max(np.abs(K_ext - K_int)) < 1e-8 * np.max(np.abs(K_ext))


def test_minimal_surface_has_vanishing_mean_curvature():
    ev = holo3()
    grid = Grid(nx=9, ny=9)
    x, y = grid.points()
    b = SurfaceJets(ev, x, y, 3)
    a11, a12, a22 = b.second_fundamental()
    H = (np.linalg.norm(a11.value().real + a22.value().real, axis=0)) / 2
    scale = np.linalg.norm(a11.value().real, axis=0) + np.linalg.norm(a12.value().real, axis=0)
    assert np.max(H / np.maximum(scale, 1e-300)) < 1e-12


def test_conformal_parametrization_is_isothermal():
    # real part of a holomorphic curve in isotropic position: E = G, F = 0
    ev = holo3()
    x = np.array([0.4, 1.3])
    y = np.array([0.6, 0.2])
    b = SurfaceJets(ev, x, y, 2)
    E, F, G = b.first_fundamental()
    assert np.max(np.abs(E.value().real - G.value().real)) < 1e-12 * np.max(E.value().real)
    assert np.max(np.abs(F.value().real)) < 1e-12 * np.max(E.value().real)


def test_two_circles_for_two_isotropic_preset():
    ev = holo3()
    x = np.array([0.7, 1.0])
    y = np.array([0.5, 0.9])
    order, defects = isotropy_order(ev, x, y, order=4)
    assert order == 2
    assert defects[0] < 1e-12 and defects[1] < 1e-12


def test_three_circles_for_higher_preset():
    ev = surface_evaluator(preset_curve("holo4"))
    x = np.array([0.7])
    y = np.array([0.5])
    order, _ = isotropy_order(ev, x, y, order=5)
    assert order == 3


def test_noniso_preset_has_one_circle_only():
    ev = surface_evaluator(preset_curve("noniso"))
    x = np.array([0.7, 1.1])
    y = np.array([0.5, 0.4])
    order, defects = isotropy_order(ev, x, y, order=4)
    assert order == 1
    assert defects[0] < 1e-12
    assert defects[1] > 1e-3  # genuinely elliptic second ellipse


def test_ellipse_samples_match_flag_levels():
    ev = holo3()
    s1 = ellipse_test(ev, (0.8, 0.6), s=1)
    s2 = ellipse_test(ev, (0.8, 0.6), s=2)
    assert s1.circle_defect < 1e-12
    assert s2.circle_defect < 1e-12
    assert abs(s1.lam - 1.0) < 1e-12  # circles: axis ratio 1
    assert abs(s2.lam - 1.0) < 1e-12


def test_wintgen_equality_for_superconformal_minimal():
    # K + |K_N| <= ||H||^2 with equality iff the first ellipse is a circle
    ev = holo3()
    c = curvatures(ev, (0.9, 0.4))
    assert abs(c.K + abs(c.K_N) - c.H_norm_sq) < 1e-12 * max(abs(c.K), 1.0)


def test_second_fundamental_traceless_split():
    v11, v12, v22, H, xi1, xi2 = second_fundamental(holo3(), (1.1, 0.3))
    assert np.max(np.abs(H)) < 1e-12 * np.max(np.abs(v11))
    assert np.max(np.abs(xi1 - v11)) < 1e-12 * np.max(np.abs(v11))
    # circle condition: ||xi1|| = ||xi2||, <xi1, xi2> = 0
    assert abs(np.dot(xi1, xi2)) < 1e-12 * np.dot(xi1, xi1)
    assert abs(np.dot(xi1, xi1) - np.dot(xi2, xi2)) < 1e-12 * np.dot(xi1, xi1)


def test_first_normal_rank_two_for_minimal_immersion():
    ev = holo3()
    grid = Grid(nx=5, ny=5)
    x, y = grid.points()
    b = SurfaceJets(ev, x, y, 2)
    rank, _ = first_normal_rank(b)
    assert np.all(rank == 2)


def test_hodge_relations_select_minus_convention():
    ev = holo3()
    x = np.array([0.6, 1.0, 1.2])
    y = np.array([0.8, 0.4, 1.1])
    b = SurfaceJets(ev, x, y, 4)
    res = hodge_relation_residuals(b)
    assert np.max(res["minus"]) < 1e-10
    assert np.min(res["plus"]) > 1e-1
    assert np.max(np.abs(res["lam"] - 1.0)) < 1e-10


def test_connection_omega_antisymmetric():
    ev = holo3()
    b = SurfaceJets(ev, np.array([0.7]), np.array([0.6]), 4)
    conn = b.connection_forms()
    om = conn["omega"]
    assert np.max(np.abs(om + np.swapaxes(om, 1, 2))) < 1e-12


def test_third_form_two_routes_agree():
    ev = holo3()
    x = np.array([0.5, 1.0])
    y = np.array([0.7, 1.2])
    b = SurfaceJets(ev, x, y, 4)
    assert np.max(third_form_recursive_defect(b)) < 1e-10


def test_not_immersion_raised_at_degenerate_point():
    # doubled curve with derivative vanishing at the origin
    from isopedal.weierstrass import holomorphic_curve

    ev = surface_evaluator(holomorphic_curve([[0, 0, 1]]))  # w = z^2
    with pytest.raises(NotImmersion):
        curvatures(ev, (0.0, 0.0))


def test_geometry_sample_roundtrip():
    s = geometry_sample(holo3(), (0.9, 0.9))
    assert not s.excluded
    assert abs(s.K - closed_form_K(0.9, 0.9)) < 1e-10
    assert s.circle_defect_1 < 1e-12
    assert s.circle_defect_2 is not None and s.circle_defect_2 < 1e-12
    assert abs(s.lambda_2 - 1.0) < 1e-10
    assert abs(s.E - s.G) < 1e-10 * abs(s.E) and abs(s.F) < 1e-10 * abs(s.E)
