import math

import numpy as np
import pytest

from symineq.fields import GridField, make_grid
from symineq.geometry import boundary_discretize, preset
from symineq.potentials import (
    KernelPlan,
    boundary_potential,
    riesz_at,
    riesz_potential,
    self_cell_constant,
)


def test_self_cell_constant():
    assert self_cell_constant() == pytest.approx(4 * math.log(1 + math.sqrt(2)), rel=1e-14)


def test_fft_matches_direct(lshape, rng):
    g, m = make_grid(lshape, 32)
    f = GridField(g, m, np.where(m, rng.normal(size=m.shape), 0.0))
    a = riesz_potential(f, KernelPlan("fft")).values
    b = riesz_potential(f, KernelPlan("direct")).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))
    cells = np.argwhere(m)[:5]
    np.testing.assert_allclose(riesz_at(f, KernelPlan(), cells), b[m][:5], rtol=1e-12)


def test_potential_zero_off_mask(lshape):
    g, m = make_grid(lshape, 16)
    out = riesz_potential(GridField(g, m, m.astype(float)))
    assert np.all(out.values[~m] == 0) and np.all(out.values[m] > 0)


def test_disk_indicator_center():
    # int_{|y|<R} dy/|y| = 2 pi R
    N, R = 128, 0.25
    g, m = make_grid(preset("square"), N)
    c = g.centers()
    disk = np.hypot(c[..., 0] - 0.5, c[..., 1] - 0.5) < R
    val = riesz_potential(GridField(g, m, disk.astype(float))).values[N // 2, N // 2]
    assert val == pytest.approx(2 * math.pi * R, rel=0.01)


def test_potential_errors(square):
    g, m = make_grid(square, 8)
    with pytest.raises(ValueError):
        riesz_potential(GridField(g, np.zeros_like(m), np.zeros(m.shape)))
    with pytest.raises(ValueError):
        riesz_potential(GridField(g, m, np.zeros((2,) + m.shape)))
    with pytest.raises(ValueError):
        KernelPlan("multipole")


@pytest.mark.parametrize("name,x", [("square", (0.3, 0.6)), ("L-shape", (0.2, 0.8)), ("star", (0.5, 0.5))])
def test_T_of_one(name, x):
    d = preset(name)
    assert boundary_potential(lambda z: np.ones(len(z)), d, x, 256) == pytest.approx(2 * math.pi, rel=1e-12)


def test_T_right_edge(square):
    # seen from the center, the right edge subtends pi/2
    val = boundary_potential(lambda z: (z[:, 0] > 1 - 1e-12).astype(float), square, (0.5, 0.5), 256)
    assert val == pytest.approx(math.pi / 2, rel=0.005)


def test_T_nodal_linear(square):
    nodes = boundary_discretize(square, 1 / 32)
    g = nodes.points[:, 0]
    exact = boundary_potential(lambda z: z[:, 0], square, (0.4, 0.4), 128)
    nodal = boundary_potential(g, square, (0.4, 0.4), 128, nodes=nodes)
    assert nodal == pytest.approx(exact, rel=1e-12)
    with pytest.raises(ValueError):
        boundary_potential(g, square, (0.4, 0.4), 128)
    with pytest.raises(ValueError):
        boundary_potential(g, square, (0.4, 0.4), 8, nodes=nodes)


def test_T_vector_values_use_magnitude(square):
    v = boundary_potential(lambda z: np.tile([3.0, 4.0], (len(z), 1)), square, (0.5, 0.5), 64)
    assert v == pytest.approx(10 * math.pi)
