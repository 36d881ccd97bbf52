"""Collision-flux kernels: fixtures, dual-route equivalence, Jacobian checks."""

import numpy as np
import pytest

from wavekin import (
    CollisionKernel,
    build_grid,
    flux_divergence,
    flux_half,
    rhs,
    rhs_jacobian,
)
from wavekin.collision import flux_half_all

# hand-worked one-hot fixture: dk=1, M=3, u = (0,1,0,0)
FIXTURE_GRID = (4.0, 1.0)
FIXTURE_U = np.array([0.0, 1.0, 0.0, 0.0])
FIXTURE_DIVERGENCE = np.array([0.0, -54.0, 18.0, 27.0])
FIXTURE_HALF = {-1: 0.0, 0: 0.0, 1: -54.0, 2: -36.0, 3: -9.0}


def random_states(rng, n, count):
    """Non-negative states, some with sparse support."""
    for trial in range(count):
        u = rng.random(n)
        if trial % 3 == 0:
            u[rng.random(n) < 0.5] = 0.0
        yield u


def test_kernel_tables_symmetric():
    grid = build_grid(10.0, 0.5)
    kern = CollisionKernel(grid)
    for table in kern.tables():
        np.testing.assert_array_equal(table, table.T)
    np.testing.assert_allclose(kern.diff2[2, 5], (grid.midpoints[2] - grid.midpoints[5]) ** 2)
    np.testing.assert_allclose(kern.prod[0, 3], grid.midpoints[0] * grid.midpoints[3])


class TestFluxHalf:
    def test_zero_state(self, backend):
        grid = build_grid(*FIXTURE_GRID)
        assert all(flux_half(np.zeros(4), i, grid) == 0.0 for i in range(-1, 4))

    def test_one_hot_fixture(self, backend):
        grid = build_grid(*FIXTURE_GRID)
        for i, expected in FIXTURE_HALF.items():
            assert flux_half(FIXTURE_U, i, grid) == pytest.approx(expected, abs=1e-13)

    def test_left_ghost_regression(self, backend):
        # only the truncated first term survives at the left ghost edge
        grid = build_grid(*FIXTURE_GRID)
        assert flux_half(np.ones(4), -1, grid) == pytest.approx(40.0, rel=1e-14)

    def test_index_contract(self, backend):
        grid = build_grid(*FIXTURE_GRID)
        with pytest.raises(IndexError):
            flux_half(FIXTURE_U, -2, grid)
        with pytest.raises(IndexError):
            flux_half(FIXTURE_U, 4, grid)

    def test_all_matches_scalar(self, backend, rng):
        grid = build_grid(6.0, 0.5)
        u = rng.random(grid.ncells)
        edges = flux_half_all(u, grid)
        for i in range(-1, grid.ncells):
            assert edges[i + 1] == pytest.approx(flux_half(u, i, grid), rel=1e-14)


class TestFluxDivergence:
    def test_zero_state(self, backend):
        grid = build_grid(*FIXTURE_GRID)
        np.testing.assert_array_equal(flux_divergence(np.zeros(4), grid), 0.0)

    def test_one_hot_fixture(self, backend):
        grid = build_grid(*FIXTURE_GRID)
        np.testing.assert_allclose(flux_divergence(FIXTURE_U, grid), FIXTURE_DIVERGENCE,
                                   rtol=0, atol=1e-13)

    @pytest.mark.parametrize("M", [8, 50, 200])
    def test_matches_direct_difference(self, backend, rng, M):
        grid = build_grid((M + 1) * 0.5, 0.5)
        for u in random_states(rng, M + 1, 10):
            d = flux_divergence(u, grid)
            edges = flux_half_all(u, grid)
            scale = np.abs(edges).max()
            assert np.abs(np.diff(edges) - d).max() <= 1e-12 * scale

    @pytest.mark.parametrize("M", [8, 50, 200])
    def test_telescoping_balance(self, backend, rng, M):
        grid = build_grid((M + 1) * 0.5, 0.5)
        for u in random_states(rng, M + 1, 10):
            d = flux_divergence(u, grid)
            lo = flux_half(u, -1, grid)
            hi = flux_half(u, M, grid)
            assert d.sum() == pytest.approx(hi - lo, rel=1e-12, abs=1e-12 * max(abs(hi), 1.0))


class TestRhs:
    def test_zero_equilibrium(self, backend):
        grid = build_grid(10.0, 0.5)
        np.testing.assert_array_equal(rhs(np.zeros(grid.ncells), grid), 0.0)

    def test_fixture_value(self, backend):
        grid = build_grid(*FIXTURE_GRID)
        assert rhs(FIXTURE_U, grid)[1] == pytest.approx(-54.0)

    def test_quadratic_homogeneity(self, backend, rng):
        grid = build_grid(20.0, 0.5)
        u = rng.random(grid.ncells)
        base = rhs(u, grid)
        for c in (0.0, 0.5, 3.0):
            np.testing.assert_allclose(rhs(c * u, grid), c**2 * base, rtol=1e-12,
                                       atol=1e-14 * np.abs(base).max())


class TestJacobian:
    def test_zero_state(self, backend):
        grid = build_grid(10.0, 0.5)
        np.testing.assert_array_equal(rhs_jacobian(np.zeros(grid.ncells), grid), 0.0)

    def test_linear_in_state(self, backend, rng):
        grid = build_grid(15.0, 0.5)
        u = rng.random(grid.ncells)
        J = rhs_jacobian(u, grid)
        np.testing.assert_allclose(rhs_jacobian(2.5 * u, grid), 2.5 * J, rtol=1e-12,
                                   atol=1e-13 * np.abs(J).max())

    def test_central_difference(self, backend, rng):
        grid = build_grid(25.0, 0.5)
        n = grid.ncells
        for u in random_states(rng, n, 5):
            v = rng.standard_normal(n)
            h = 1e-6 * (np.linalg.norm(u) + 1e-30) / np.linalg.norm(v)
            fd = (rhs(u + h * v, grid) - rhs(u - h * v, grid)) / (2 * h)
            Jv = rhs_jacobian(u, grid) @ v
            assert np.linalg.norm(fd - Jv) <= 1e-6 * np.linalg.norm(Jv)

    def test_quadratic_exactness(self, backend, rng):
        # for a quadratic map, q(u+v) - q(u) - q(v) = J(u) v exactly
        grid = build_grid(12.0, 0.5)
        u = rng.random(grid.ncells)
        v = rng.standard_normal(grid.ncells) * 0.1
        lhs = rhs(u + v, grid) - rhs(u, grid) - rhs(v, grid)
        Jv = rhs_jacobian(u, grid) @ v
        np.testing.assert_allclose(lhs, Jv, rtol=1e-10, atol=1e-10 * np.abs(Jv).max())

    def test_tables_equivalent(self, rng):
        grid = build_grid(15.0, 0.5)
        u = rng.random(grid.ncells)
        with_tables = rhs_jacobian(u, grid, kernel=CollisionKernel(grid))
        without = rhs_jacobian(u, grid)
        np.testing.assert_allclose(with_tables, without, rtol=1e-14, atol=0)


def test_backend_parity(rng):
    from wavekin import _kernels

    if len(_kernels.available_backends()) < 2:
        pytest.skip("compiled backend not built")
    grid = build_grid(30.0, 0.5)
    u = rng.random(grid.ncells)
    results = {}
    for name in _kernels.available_backends():
        with _kernels.use_backend(name):
            results[name] = (flux_divergence(u, grid), rhs_jacobian(u, grid),
                             flux_half_all(u, grid))
    a, b = results.values()
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-13 * np.abs(x).max())
