import numpy as np
import pytest

from leastgrad.domain import Ball, Box, build_domain, build_weight
from leastgrad.errors import DegenerateElement, DomainMismatch
from leastgrad.fields import DiscreteVectorField, IndicatorSet, ScalarField
from leastgrad.geometry import (Polyline, alpha_perimeter, alpha_total_variation,
                                coarea_quadrature, conformal_mass, discrete_divergence,
                                discrete_gradient, dual_pairing_and_gap, icosphere,
                                isotropic_total_variation, make_stencil, polyline_circle,
                                stencil_for, submodularity_defect)


def single_cell():
    return build_domain(np.ones((1, 1), dtype=bool), 1.0, collar_width=3)


@pytest.mark.parametrize('ndim,neighborhood,count', [
    (2, 4, 2), (2, 8, 4), (2, 16, 8), (3, 6, 3), (3, 18, 9), (3, 26, 13),
])
def test_stencil_offsets(ndim, neighborhood, count):
    st = make_stencil(ndim, neighborhood, 0.5)
    assert len(st.offsets) == count
    assert all(w > 0 for w in st.weights)
    directed = {off for off, _ in st.directed()}
    assert all(tuple(-v for v in off) in directed for off in directed)


def test_face_stencil_weight_is_face_size():
    assert make_stencil(2, 4, 0.25).weights == (0.25, 0.25)
    assert make_stencil(3, 6, 0.5).weights == (0.25, 0.25, 0.25)


def test_eight_neighborhood_crofton_weights():
    st = make_stencil(2, 8, 1.0)
    weights = dict(zip(st.offsets, st.weights))
    assert weights[(1, 0)] == pytest.approx(np.pi / 8)
    assert weights[(1, 1)] == pytest.approx(np.pi / (8 * np.sqrt(2)))
    assert st.radius == 1
    assert make_stencil(2, 16, 1.0).radius == 2


def test_unsupported_neighborhood():
    with pytest.raises(ValueError):
        make_stencil(2, 6)


def test_single_cell_perimeter():
    dom = single_cell()
    E = IndicatorSet(dom, dom.interior)
    st = stencil_for(dom, 4)
    assert alpha_perimeter(E, None, build_weight(dom, 1.0), st) == pytest.approx(4.0)
    assert alpha_perimeter(E, None, build_weight(dom, 2.0), st) == pytest.approx(8.0)


def test_disk_perimeter_is_close_to_circumference():
    dom = build_domain(Box((-1.0, -1.0), (1.0, 1.0)), 1.0 / 128)
    centers = dom.centers()
    E = IndicatorSet(dom, np.sum(centers ** 2, axis=-1) < 0.25)
    value = alpha_perimeter(E, None, build_weight(dom, 1.0), stencil_for(dom, 16))
    assert value == pytest.approx(np.pi, rel=0.02)


def test_ball_perimeter_is_close_to_sphere_area():
    dom = build_domain(Box((-0.75,) * 3, (0.75,) * 3), 1.0 / 32)
    centers = dom.centers()
    E = IndicatorSet(dom, np.sum(centers ** 2, axis=-1) < 0.25)
    value = alpha_perimeter(E, None, build_weight(dom, 1.0), stencil_for(dom))
    assert value == pytest.approx(np.pi, rel=0.03)


def test_cube_of_cells_with_face_neighborhood():
    dom = build_domain(np.ones((2, 2, 2), dtype=bool), 1.0, collar_width=3)
    E = IndicatorSet(dom, dom.interior)
    assert alpha_perimeter(E, None, build_weight(dom, 1.0), stencil_for(dom, 6)) == pytest.approx(24.0)


def test_perimeter_is_zero_for_constant_sets(unit_square):
    w, st = build_weight(unit_square, 1.0), stencil_for(unit_square)
    full = IndicatorSet(unit_square, np.ones(unit_square.shape, dtype=bool))
    empty = IndicatorSet(unit_square, np.zeros(unit_square.shape, dtype=bool))
    assert alpha_perimeter(full, None, w, st) == 0.0
    assert alpha_perimeter(empty, unit_square.interior, w, st) == 0.0


def test_perimeter_rejects_foreign_stencil(unit_square):
    E = IndicatorSet(unit_square, unit_square.interior)
    with pytest.raises(DomainMismatch):
        alpha_perimeter(E, None, build_weight(unit_square, 1.0), make_stencil(2, 16, 0.5))


def test_weight_monotonicity(unit_square, rng):
    st = stencil_for(unit_square)
    low = build_weight(unit_square, 1.0)
    high = build_weight(unit_square, lambda p: 1.0 + np.sum(p ** 2, axis=-1))
    for _ in range(10):
        E = IndicatorSet(unit_square, rng.random(unit_square.shape) < 0.5)
        assert alpha_perimeter(E, None, low, st) <= alpha_perimeter(E, None, high, st)


def test_linear_ramp_variation_is_area_times_slope(unit_square):
    dom = unit_square
    u = ScalarField(dom, dom.centers()[..., 0])
    tv = alpha_total_variation(u, dom.interior, build_weight(dom, 1.0), stencil_for(dom, 4))
    assert tv == pytest.approx(1.0, abs=1e-12)


def test_variation_of_constant_and_indicator(unit_square, rng):
    dom = unit_square
    w, st = build_weight(dom, 1.5), stencil_for(dom)
    assert alpha_total_variation(ScalarField(dom, np.full(dom.shape, 3.0)), None, w, st) == 0.0
    E = IndicatorSet(dom, rng.random(dom.shape) < 0.3)
    assert alpha_total_variation(E.as_field(), dom.interior, w, st) == pytest.approx(
        alpha_perimeter(E, dom.interior, w, st), rel=1e-12)


def test_variation_is_positively_homogeneous(unit_square, rng):
    dom = unit_square
    w, st = build_weight(dom, rng.uniform(1.0, 3.0, dom.shape)), stencil_for(dom)
    u = ScalarField(dom, rng.standard_normal(dom.shape))
    base = alpha_total_variation(u, dom.interior, w, st)
    for lam in (0.0, 0.5, 3.0):
        assert alpha_total_variation(u.scaled(lam), dom.interior, w, st) == pytest.approx(
            lam * base, rel=1e-12, abs=1e-12)


def test_variation_rejects_non_finite_halo(unit_square):
    dom = unit_square
    values = np.where(dom.interior, 1.0, np.nan)
    with pytest.raises(ValueError):
        alpha_total_variation(ScalarField(dom, values), dom.interior, build_weight(dom, 1.0),
                              stencil_for(dom), closure=True)


def test_coarea_of_indicator(unit_square):
    dom = unit_square
    w, st = build_weight(dom, 1.0), stencil_for(dom)
    E = IndicatorSet(dom, dom.centers()[..., 1] > 0.4)
    tv, co, used = coarea_quadrature(E.as_field(), None, w, st)
    assert used == 1
    assert tv == pytest.approx(alpha_perimeter(E, None, w, st), rel=1e-12)
    assert co == pytest.approx(tv, rel=1e-12)


def test_coarea_with_three_values(unit_square):
    dom = unit_square
    w, st = build_weight(dom, lambda p: 2.0 + np.sin(3 * p[..., 0])), stencil_for(dom)
    x = dom.centers()[..., 0]
    u = ScalarField(dom, np.select([x < 0.3, x < 0.7], [-1.0, 0.25], 2.0))
    tv, co, used = coarea_quadrature(u, dom.interior, w, st, closure=True)
    assert used == 2
    assert abs(tv - co) <= 1e-10 * max(1.0, tv)


def test_coarea_identity_on_random_fields(rng):
    dom = build_domain(Box((0.0, 0.0), (1.0, 1.0)), 1.0 / 16)
    st = stencil_for(dom)
    for _ in range(5):
        w = build_weight(dom, rng.uniform(1.0, 3.0, dom.shape))
        u = ScalarField(dom, rng.standard_normal(dom.shape))
        tv, co, _ = coarea_quadrature(u, dom.interior, w, st)
        assert abs(tv - co) <= 1e-10 * max(1.0, tv)


def test_submodularity_of_nested_and_separated_sets(unit_square):
    dom = unit_square
    w, st = build_weight(dom, 1.0), stencil_for(dom)
    x, y = dom.centers()[..., 0], dom.centers()[..., 1]
    inner = IndicatorSet(dom, (x > 0.3) & (x < 0.6) & (y > 0.3) & (y < 0.6))
    outer = IndicatorSet(dom, (x > 0.2) & (x < 0.8) & (y > 0.2) & (y < 0.8))
    assert abs(submodularity_defect(inner, outer, None, w, st)) <= 1e-12
    left = IndicatorSet(dom, (x < 0.25) & (y < 0.5))
    right = IndicatorSet(dom, (x > 0.75) & (y < 0.5))
    assert abs(submodularity_defect(left, right, None, w, st)) <= 1e-12


def test_overlapping_squares_defect_is_nonnegative():
    dom = build_domain(np.ones((8, 8), dtype=bool), 1.0)
    w, st = build_weight(dom, 1.0), stencil_for(dom, 4)
    a = np.zeros(dom.shape, dtype=bool)
    b = np.zeros(dom.shape, dtype=bool)
    a[5:8, 5:8] = True
    b[7:10, 7:10] = True
    defect = submodularity_defect(IndicatorSet(dom, a), IndicatorSet(dom, b), None, w, st)
    assert defect >= -1e-12


def test_submodularity_on_random_pairs(unit_square, rng):
    dom = unit_square
    w, st = build_weight(dom, rng.uniform(1.0, 3.0, dom.shape)), stencil_for(dom)
    for _ in range(50):
        E1 = IndicatorSet(dom, rng.random(dom.shape) < 0.5)
        E2 = IndicatorSet(dom, rng.random(dom.shape) < 0.5)
        assert submodularity_defect(E1, E2, dom.interior, w, st) >= -1e-12


def test_divergence_is_negative_adjoint_of_gradient(rng):
    u = rng.standard_normal((7, 9))
    Y = rng.standard_normal((7, 9, 2))
    lhs = np.sum(discrete_gradient(u, 0.3) * Y)
    rhs = -np.sum(u * discrete_divergence(Y, 0.3))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def _inner_vector_field(dom, rng, scale):
    Y = rng.standard_normal(dom.shape + (2,))
    Y[0], Y[-1], Y[:, 0], Y[:, -1] = 0.0, 0.0, 0.0, 0.0
    norms = np.linalg.norm(Y, axis=-1)
    return Y * (scale / np.maximum(norms, 1e-300))[..., None]


def test_zero_dual_field(unit_square):
    dom = unit_square
    u = ScalarField(dom, dom.centers()[..., 0])
    Y = DiscreteVectorField(dom, np.zeros(dom.shape + (2,)))
    assert dual_pairing_and_gap(u, Y, build_weight(dom, 1.0)) == (0.0, 0.0)


def test_infeasible_dual_field_reports_violation(unit_square, rng):
    dom = unit_square
    w = build_weight(dom, 1.0)
    Y = _inner_vector_field(dom, rng, 1.0)
    Y[5, 5] = (2.0, 0.0)
    _, violation = dual_pairing_and_gap(ScalarField(dom, np.zeros(dom.shape)), Y, w)
    assert violation == pytest.approx(1.0)


def test_dual_field_must_vanish_on_outer_layer(unit_square):
    dom = unit_square
    Y = np.zeros(dom.shape + (2,))
    Y[0, 3] = (0.5, 0.0)
    with pytest.raises(ValueError):
        dual_pairing_and_gap(ScalarField(dom, np.zeros(dom.shape)), Y, build_weight(dom, 1.0))


def test_weak_duality(unit_square, rng):
    dom = unit_square
    w = build_weight(dom, lambda p: 1.0 + p[..., 0] ** 2)
    for _ in range(10):
        u = ScalarField(dom, rng.standard_normal(dom.shape))
        Y = _inner_vector_field(dom, rng, 1.0) * rng.random(dom.shape)[..., None]
        pairing, violation = dual_pairing_and_gap(u, Y, w)
        assert violation == 0.0
        assert pairing <= isotropic_total_variation(u, w) + 1e-10


def test_circle_length_with_unit_weight():
    curve = polyline_circle((0.0, 0.0), 0.5, 2000)
    weighted, riemannian = conformal_mass(curve, lambda p: np.ones(p.shape[:-1]), n=2, sigma=2)
    assert weighted == pytest.approx(np.pi, abs=1e-6)
    assert riemannian == pytest.approx(np.pi, abs=1e-6)


def test_circle_mass_with_radial_weight():
    curve = polyline_circle((0.0, 0.0), 0.5, 2000)
    weighted, riemannian = conformal_mass(curve, lambda p: 1.0 + np.sum(p ** 2, axis=-1),
                                          n=2, sigma=2)
    assert weighted == pytest.approx(1.25 * np.pi, abs=1e-6)
    assert riemannian == pytest.approx(weighted, rel=1e-10)


def test_sphere_mass_with_constant_weight():
    mesh = icosphere(radius=1.0, subdivisions=4)
    weighted, riemannian = conformal_mass(mesh, lambda p: np.full(p.shape[:-1], 4.0), n=3, sigma=1)
    assert weighted == pytest.approx(16 * np.pi, abs=1e-4)
    assert riemannian == pytest.approx(weighted, rel=1e-10)


def test_flat_polygon_underestimates_circle():
    curve = polyline_circle((0.0, 0.0), 1.0, 6, project=False)
    weighted, riemannian = conformal_mass(curve, lambda p: np.ones(p.shape[:-1]), n=2, sigma=2)
    assert weighted == pytest.approx(6.0)
    assert riemannian == pytest.approx(6.0)


def test_degenerate_segment_is_rejected():
    curve = Polyline(points=np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]), closed=False)
    with pytest.raises(DegenerateElement):
        conformal_mass(curve, lambda p: np.ones(p.shape[:-1]), n=2, sigma=2)


def test_zero_exponent_is_rejected():
    with pytest.raises(ValueError):
        conformal_mass(polyline_circle((0.0, 0.0), 1.0, 8), lambda p: np.ones(p.shape[:-1]),
                       n=2, sigma=0)
