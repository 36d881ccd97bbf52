import numpy as np
import pytest

from wavekin import ConfigurationError, build_grid


def test_paper_grid_layout():
    g = build_grid(30.0, 0.5)
    assert g.ncells == 60
    assert g.M == 59
    assert g.midpoints[0] == 0.25
    assert g.midpoints[-1] == 29.75
    assert g.edges[0] == 0.0
    assert g.edges[-1] == 30.0


def test_two_cell_grid():
    g = build_grid(1.0, 0.5)
    assert g.ncells == 2
    np.testing.assert_allclose(g.midpoints, [0.25, 0.75])


def test_non_divisible_rejected():
    with pytest.raises(ConfigurationError):
        build_grid(30.0, 0.7)


@pytest.mark.parametrize("L,dk", [(0.0, 0.5), (-1.0, 0.5), (30.0, 0.0), (30.0, -0.5)])
def test_non_positive_rejected(L, dk):
    with pytest.raises(ConfigurationError):
        build_grid(L, dk)


def test_single_cell_rejected():
    with pytest.raises(ConfigurationError):
        build_grid(0.5, 0.5)


def test_decimal_widths_tolerated():
    g = build_grid(30.0, 0.1)  # 0.1 is not exactly representable
    assert g.ncells == 300


@pytest.mark.parametrize("L,dk", [(30.0, 0.5), (1.0, 0.25), (200.0, 0.05), (7.0, 0.1)])
def test_widths_cover_domain(L, dk):
    g = build_grid(L, dk)
    assert abs(g.ncells * g.dk - L) <= 1e-12 * L
    np.testing.assert_allclose(np.diff(g.edges), g.dk, rtol=1e-12)
    assert np.all(np.diff(g.midpoints) > 0)
    assert abs(g.midpoints[0] - g.dk / 2) < 1e-15
    assert abs(g.midpoints[-1] - (L - g.dk / 2)) < 1e-12 * L


def test_arrays_immutable():
    g = build_grid(2.0, 0.5)
    with pytest.raises(ValueError):
        g.midpoints[0] = 99.0
    with pytest.raises(ValueError):
        g.edges[0] = 99.0
