import numpy as np
import pytest

from leastgrad.domain import (Ball, Box, Union, build_domain, build_weight, extend_boundary_data,
                              extension_mismatch, modulus_of_continuity, nearest_boundary_index,
                              superlevel_exterior)
from leastgrad.errors import DisconnectedBoundary, DisconnectedInterior, EmptyInterior
from leastgrad.utils.grid_utils import label_components

from conftest import cos_theta


def test_unit_disk_cell_count_and_boundary_loop():
    dom = build_domain(Ball((0.0, 0.0), 1.0), 1.0 / 32, collar_width=4)
    expected = np.pi * 32 ** 2
    assert abs(dom.interior.sum() - expected) <= 0.05 * expected
    assert not np.any(dom.boundary & ~dom.interior)
    _, loops = label_components(dom.boundary, full=True)
    assert loops == 1


def test_collar_surrounds_interior():
    dom = build_domain(Ball((0.0, 0.0), 1.0), 0.125, collar_width=4)
    for axis in range(2):
        occupied = np.flatnonzero(dom.interior.any(axis=1 - axis))
        assert occupied.min() >= 4
        assert occupied.max() <= dom.shape[axis] - 5


def test_square_at_half_spacing_is_all_boundary():
    dom = build_domain(Box((0.0, 0.0), (1.0, 1.0)), 0.5, collar_width=3)
    assert dom.interior.sum() == 4
    assert np.array_equal(dom.boundary, dom.interior)
    assert dom.shape == (8, 8)


def test_two_disjoint_disks_are_rejected():
    shape = Union((Ball((-2.0, 0.0), 0.5), Ball((2.0, 0.0), 0.5)))
    with pytest.raises(DisconnectedInterior):
        build_domain(shape, 0.125)


def test_shape_missing_every_center_is_empty():
    with pytest.raises(EmptyInterior):
        build_domain(Ball((0.0, 0.0), 0.01), 0.5)


def test_hole_disconnects_the_boundary():
    mask = np.ones((7, 7), dtype=bool)
    mask[3, 3] = False
    with pytest.raises(DisconnectedBoundary):
        build_domain(mask, 0.1)


def test_collar_width_below_three_is_rejected():
    with pytest.raises(ValueError):
        build_domain(Box((0.0, 0.0), (1.0, 1.0)), 0.25, collar_width=2)


def test_raster_mask_is_padded_by_the_collar():
    mask = np.ones((3, 2), dtype=bool)
    dom = build_domain(mask, 0.5, collar_width=3)
    assert dom.shape == (9, 8)
    assert dom.origin == (-1.5, -1.5)
    assert np.array_equal(dom.interior[3:6, 3:5], mask)


def test_build_is_deterministic():
    a = build_domain(Ball((0.1, -0.2), 0.8), 1.0 / 16)
    b = build_domain(Ball((0.1, -0.2), 0.8), 1.0 / 16)
    assert a.fingerprint == b.fingerprint
    assert np.array_equal(a.interior, b.interior)
    assert np.array_equal(a.boundary, b.boundary)


def test_constant_weight_and_lower_bound(unit_square):
    w = build_weight(unit_square, 2.0)
    assert np.all(w.cell == 2.0)
    assert w.alpha == 2.0
    assert all(np.all(f == 2.0) for f in w.faces)


def test_face_samples_use_the_analytic_weight(unit_square):
    dom = unit_square
    w = build_weight(dom, lambda p: 1.0 + p[..., 0] ** 2)
    centers = dom.centers()
    mid = 0.5 * (centers[2, 5] + centers[3, 5])
    assert w.faces[0][2, 5] == pytest.approx(1.0 + mid[0] ** 2)
    assert w.faces[1].shape == (dom.shape[0], dom.shape[1] - 1)


def test_nonpositive_weight_is_rejected(unit_square):
    with pytest.raises(ValueError):
        build_weight(unit_square, lambda p: p[..., 0])


def test_claimed_bound_above_samples_is_rejected(unit_square):
    with pytest.raises(ValueError):
        build_weight(unit_square, 1.0, alpha=1.5)


def test_constant_data_extends_constantly(coarse_disk):
    bd = extend_boundary_data(coarse_disk, 5.0)
    assert np.all(bd.G[coarse_disk.collar] == 5.0)
    assert bd.is_constant
    assert np.all(np.isnan(bd.G[coarse_disk.interior]))
    assert np.all(np.isnan(bd.g[coarse_disk.interior & ~coarse_disk.boundary]))


def test_cos_theta_extension_matches_boundary(coarse_disk):
    dom = coarse_disk
    bd = extend_boundary_data(dom, cos_theta)
    assert extension_mismatch(bd) <= modulus_of_continuity(bd, 2.0 * dom.h * (1 + 1e-9))
    assert bd.lower == pytest.approx(-1.0, abs=0.01)
    assert bd.upper == pytest.approx(1.0, abs=0.01)


def test_missing_boundary_value_is_rejected(unit_square):
    first = int(np.flatnonzero(unit_square.boundary.ravel())[0])
    with pytest.raises(ValueError):
        extend_boundary_data(unit_square, {first: 1.0})


def test_nearest_boundary_tie_goes_to_lowest_index():
    W = 3
    mask = np.ones((5, 3), dtype=bool)
    mask[2, 2] = False
    dom = build_domain(mask, 1.0, collar_width=W)
    nearest = nearest_boundary_index(dom, dom.collar)
    # the notch touches three boundary cells at distance one
    assert nearest[W + 2, W + 2] == np.ravel_multi_index((W + 1, W + 2), dom.shape)
    assert nearest[W + 1, W + 1] == -1


def test_superlevel_exterior_extremes(coarse_disk):
    bd = extend_boundary_data(coarse_disk, cos_theta)
    assert np.array_equal(superlevel_exterior(bd, bd.lower - 1.0).values, coarse_disk.collar)
    assert not superlevel_exterior(bd, bd.upper + 1e-9).values.any()
    with pytest.raises(ValueError):
        superlevel_exterior(bd, float('nan'))


def test_superlevel_exterior_is_monotone(coarse_disk):
    bd = extend_boundary_data(coarse_disk, cos_theta)
    levels = np.linspace(-1.0, 1.0, 21)
    sets = [superlevel_exterior(bd, t) for t in levels]
    for low, high in zip(sets[:-1], sets[1:]):
        assert high.issubset(low)


def test_zero_level_splits_collar_by_sign(coarse_disk):
    dom = coarse_disk
    bd = extend_boundary_data(dom, cos_theta)
    L0 = superlevel_exterior(bd, 0.0).values
    x = dom.centers()[..., 0]
    slack = 4 * dom.h
    assert np.all(L0[dom.collar & (x >= slack)])
    assert not np.any(L0[dom.collar & (x <= -slack)])
