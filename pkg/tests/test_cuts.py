import numpy as np
import pytest

from leastgrad.domain import Box, build_domain, build_weight, superlevel_exterior
from leastgrad.errors import BallCoversDomain, BallTooSmall, TooLarge
from leastgrad.fields import IndicatorSet
from leastgrad.geometry import alpha_perimeter, stencil_for
from leastgrad.solvers import (barrier_check, barrier_margin, build_cut_problem, enumerate_optima,
                               exhaustive_min, lattice_closed, local_minimality_check, solve_star)


def tiny_square(side):
    return build_domain(Box((0.0, 0.0), (side * 0.25, side * 0.25)), 0.25)


def empty(dom):
    return IndicatorSet(dom, np.zeros(dom.shape, dtype=bool))


def test_full_exterior_keeps_everything(coarse_disk):
    dom = coarse_disk
    pair = solve_star(dom, build_weight(dom, 1.0), stencil_for(dom),
                      IndicatorSet(dom, dom.collar))
    assert pair.E_max.values.all()
    assert pair.value == 0.0


def test_empty_exterior_gives_empty_set(coarse_disk):
    dom = coarse_disk
    pair = solve_star(dom, build_weight(dom, 1.0), stencil_for(dom), empty(dom))
    assert not pair.E_max.values.any()
    assert pair.units == 0


def test_exhaustive_on_empty_exterior():
    dom = tiny_square(3)
    pair = exhaustive_min(dom, build_weight(dom, 1.0), stencil_for(dom), empty(dom))
    assert not pair.E_max.values.any()
    assert pair.value == 0.0


def test_exhaustive_with_full_exterior():
    dom = tiny_square(2)
    pair = exhaustive_min(dom, build_weight(dom, 1.0), stencil_for(dom),
                          IndicatorSet(dom, dom.collar))
    assert np.array_equal(pair.E_max.values & dom.interior, dom.interior)
    assert pair.value == 0.0


def test_exhaustive_refuses_large_problems():
    dom = tiny_square(5)
    with pytest.raises(TooLarge):
        exhaustive_min(dom, build_weight(dom, 1.0), stencil_for(dom), empty(dom))


def test_flow_matches_exhaustive_oracle(rng):
    dom = tiny_square(3)
    st = stencil_for(dom)
    for _ in range(20):
        w = build_weight(dom, rng.uniform(1.0, 3.0, dom.shape))
        L_t = IndicatorSet(dom, dom.collar & (rng.random(dom.shape) < 0.5))
        fast = solve_star(dom, w, st, L_t)
        slow = exhaustive_min(dom, w, st, L_t)
        assert fast.units == slow.units
        assert fast.E_max == slow.E_max
        assert fast.E_min == slow.E_min


def test_tied_single_cell_gives_distinct_extremes():
    dom = tiny_square(1)
    W = dom.collar_width
    pinned = np.zeros(dom.shape, dtype=bool)
    pinned[W - 1, W] = pinned[W, W - 1] = True
    L_t = IndicatorSet(dom, pinned)
    w, st = build_weight(dom, 1.0), stencil_for(dom, 4)
    pair = solve_star(dom, w, st, L_t)
    assert pair.E_max.values[W, W]
    assert not pair.E_min.values[W, W]
    assert pair.value == pytest.approx(2 * dom.h)
    oracle = exhaustive_min(dom, w, st, L_t)
    assert (pair.E_min, pair.E_max, pair.units) == (oracle.E_min, oracle.E_max, oracle.units)


def test_unit_weight_ties_match_the_oracle(rng):
    dom = tiny_square(3)
    w, st = build_weight(dom, 1.0), stencil_for(dom, 4)
    for _ in range(20):
        L_t = IndicatorSet(dom, dom.collar & (rng.random(dom.shape) < 0.5))
        fast = solve_star(dom, w, st, L_t)
        slow = exhaustive_min(dom, w, st, L_t)
        assert fast.units == slow.units
        assert fast.E_max == slow.E_max
        assert fast.E_min == slow.E_min


def test_optimal_sets_form_a_lattice(rng):
    dom = tiny_square(3)
    st = stencil_for(dom, 4)
    for _ in range(10):
        L_t = IndicatorSet(dom, dom.collar & (rng.random(dom.shape) < 0.5))
        problem = build_cut_problem(dom, build_weight(dom, 1.0), st, dom.interior, L_t.values)
        _, codes = enumerate_optima(problem)
        assert lattice_closed(codes)


def test_minimizers_are_optimal_and_ordered(disk_cos):
    dom, w, st, bd = disk_cos
    pair = solve_star(dom, w, st, superlevel_exterior(bd, 0.3))
    assert pair.E_min.issubset(pair.E_max)
    for E in (pair.E_min, pair.E_max):
        perimeter = alpha_perimeter(E, dom.interior, w, st, closure=True)
        assert perimeter == pytest.approx(pair.value, rel=1e-8)
        assert np.array_equal(E.values & dom.collar, superlevel_exterior(bd, 0.3).values)


def test_pinned_capacity_exceeds_every_cut(unit_square):
    dom = unit_square
    st = stencil_for(dom)
    problem = build_cut_problem(dom, build_weight(dom, 1.0), st, dom.interior, dom.collar)
    assert problem.pin_units > problem.units.sum()
    assert problem.pin_units < 2 ** 53
    assert np.all(problem.units > 0)
    assert problem.n_free == dom.interior.sum()
    assert not np.any(problem.pinned & dom.interior)


def test_constraint_monotonicity(disk_cos, rng):
    dom, w, st, _ = disk_cos
    for _ in range(3):
        L_s = dom.collar & (dom.centers()[..., 0] > rng.uniform(-0.5, 0.5))
        L_t = L_s & (rng.random(dom.shape) < 0.7)
        big = solve_star(dom, w, st, IndicatorSet(dom, L_s))
        small = solve_star(dom, w, st, IndicatorSet(dom, L_t))
        assert small.E_max.issubset(big.E_max)


def test_solve_is_deterministic(disk_cos):
    dom, w, st, bd = disk_cos
    L = superlevel_exterior(bd, -0.2)
    a, b = solve_star(dom, w, st, L), solve_star(dom, w, st, L)
    assert a.units == b.units
    assert a.E_max == b.E_max
    assert a.E_min == b.E_min


def test_zero_level_cut_follows_the_vertical_chord(disk_cos):
    dom, w, st, bd = disk_cos
    E = solve_star(dom, w, st, superlevel_exterior(bd, 0.0)).E_max.values
    x = dom.centers()[..., 0]
    slack = 3 * dom.h
    assert np.all(E[dom.interior & (x >= slack)])
    assert not np.any(E[dom.interior & (x <= -slack)])


def test_global_minimizer_is_locally_minimal(disk_cos):
    dom, w, st, bd = disk_cos
    E = solve_star(dom, w, st, superlevel_exterior(bd, 0.25)).E_max
    report = local_minimality_check(E, dom.interior, w, st, radius=3)
    assert report['passed']
    assert report['checked'] > 0


def test_half_plane_is_locally_minimal_in_face_metric(unit_square):
    dom = unit_square
    E = IndicatorSet(dom, dom.centers()[..., 0] >= 0.5)
    report = local_minimality_check(E, dom.interior, build_weight(dom, 1.0), stencil_for(dom, 4))
    assert report['passed']
    assert report['checked'] > 0


def test_flipped_cell_fails_local_minimality(unit_square):
    dom = unit_square
    values = np.array(dom.centers()[..., 0] >= 0.5)
    W = dom.collar_width
    values[W + 6, W + 4] = False
    report = local_minimality_check(IndicatorSet(dom, values), dom.interior,
                                    build_weight(dom, 1.0), stencil_for(dom, 4))
    assert not report['passed']
    assert report['failures'][0]['improved'] < report['failures'][0]['current']


def test_local_region_must_lie_in_interior(unit_square):
    dom = unit_square
    with pytest.raises(ValueError):
        local_minimality_check(empty(dom), np.ones(dom.shape, dtype=bool),
                               build_weight(dom, 1.0), stencil_for(dom, 4))


def _nearest_boundary_cell(dom, point):
    cells = np.flatnonzero(dom.boundary.ravel())
    centers = dom.centers().reshape(-1, dom.ndim)[cells]
    return int(cells[np.argmin(np.linalg.norm(centers - np.asarray(point), axis=1))])


def test_flat_edge_fails_the_barrier_condition():
    dom = build_domain(Box((0.0, 0.0), (1.0, 1.0)), 1.0 / 16)
    w, st = build_weight(dom, 1.0), stencil_for(dom, 4)
    x0 = _nearest_boundary_cell(dom, (0.5, 0.0))
    verdict, V_star = barrier_check(dom, w, st, x0, 0.3)
    assert not verdict['passed']
    assert x0 in verdict['witness_cells']
    assert np.array_equal(V_star.values, dom.interior)
    assert verdict['removed_cells'] == 0


def test_barrier_set_keeps_the_far_interior(coarse_disk):
    dom = coarse_disk
    w, st = build_weight(dom, 1.0), stencil_for(dom)
    x0 = _nearest_boundary_cell(dom, (1.0, 0.0))
    verdict, V_star = barrier_check(dom, w, st, x0, 0.4)
    far = dom.interior & ~dom.ball(x0, 0.4)
    assert np.all(V_star.values[far])
    assert not np.any(V_star.values[dom.collar])
    assert verdict['margin'] == pytest.approx(0.2)
    assert verdict['passed']
    assert not V_star.values.ravel()[x0]
    assert verdict['removed_cells'] > 0
    assert verdict['contacts_minimal'] <= verdict['contacts_maximal']


def test_barrier_margin_is_a_cell_shell():
    fine = build_domain(Box((0.0, 0.0), (1.0, 1.0)), 1.0 / 64)
    assert barrier_margin(fine, 0.3) == pytest.approx(8 / 64)
    assert barrier_margin(fine, 0.1) == pytest.approx(0.05)


def test_flat_edge_fails_for_either_selection():
    dom = build_domain(Box((0.0, 0.0), (1.0, 1.0)), 1.0 / 16)
    w, st = build_weight(dom, 1.0), stencil_for(dom)
    x0 = _nearest_boundary_cell(dom, (1.0, 0.5))
    for select in ('minimal', 'maximal'):
        verdict, V_star = barrier_check(dom, w, st, x0, 0.3, select=select)
        assert not verdict['passed']
        assert verdict['select'] == select
        assert np.array_equal(V_star.values, dom.interior)


def test_barrier_rejects_bad_options(coarse_disk):
    dom = coarse_disk
    w, st = build_weight(dom, 1.0), stencil_for(dom)
    x0 = _nearest_boundary_cell(dom, (1.0, 0.0))
    with pytest.raises(ValueError):
        barrier_check(dom, w, st, x0, 0.4, select='largest')
    with pytest.raises(ValueError):
        barrier_check(dom, w, st, x0, 0.4, margin=0.4)


def test_barrier_ball_limits():
    dom = tiny_square(3)
    w, st = build_weight(dom, 1.0), stencil_for(dom, 4)
    x0 = _nearest_boundary_cell(dom, (0.0, 0.0))
    with pytest.raises(BallTooSmall):
        barrier_check(dom, w, st, x0, 2 * dom.h)
    with pytest.raises(BallCoversDomain):
        barrier_check(dom, w, st, x0, 5.0)
    center = int(np.ravel_multi_index((dom.collar_width + 1,) * 2, dom.shape))
    with pytest.raises(ValueError):
        barrier_check(dom, w, st, center, 0.6)
