import numpy as np
import pytest

from leastgrad.domain import Ball, Box, build_domain, build_weight, extend_boundary_data
from leastgrad.geometry import stencil_for


def cos_theta(points):
    return points[..., 0] / np.linalg.norm(points, axis=-1)


def x1(points):
    return points[..., 0]


@pytest.fixture
def unit_square():
    """[0, 1]^2 at h = 1/8: an 8 x 8 interior."""
    return build_domain(Box((0.0, 0.0), (1.0, 1.0)), 0.125)


@pytest.fixture
def coarse_disk():
    """Unit disk at h = 1/16."""
    return build_domain(Ball((0.0, 0.0), 1.0), 1.0 / 16)


@pytest.fixture
def square_x1(unit_square):
    """Unit square with g = x1, unit weight and the 4-neighborhood."""
    dom = unit_square
    return dom, build_weight(dom, 1.0), stencil_for(dom, 4), extend_boundary_data(dom, x1)


@pytest.fixture
def disk_cos(coarse_disk):
    """Coarse disk with g = cos(theta), unit weight and the 16-neighborhood."""
    dom = coarse_disk
    return dom, build_weight(dom, 1.0), stencil_for(dom), extend_boundary_data(dom, cos_theta)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
