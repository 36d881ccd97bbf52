"""Initial distributions: pointwise values, projection accuracy, invariants."""

import numpy as np
import pytest
from scipy.integrate import quad

from wavekin import ConfigurationError, build_grid, eval_g0, get_scenario, project_initial
from wavekin.scenarios import SCENARIOS, load_tabulated, tabulated_scenario


class TestPointwise:
    def test_bump_centre(self):
        sc = get_scenario("mollifier")
        assert eval_g0(sc, 15.0) == pytest.approx(np.exp(-0.1), rel=1e-12)

    def test_bump_support(self):
        sc = get_scenario("mollifier")
        assert eval_g0(sc, 16.0) == 0.0
        assert eval_g0(sc, 13.99) == 0.0
        assert eval_g0(sc, 15.999) > 0.0

    def test_ramp_values(self):
        sc = get_scenario("disc_line")
        assert eval_g0(sc, 20.0) == 1.0
        assert eval_g0(sc, 150.0) == 0.0
        assert eval_g0(sc, 19.999) == 0.0
        assert eval_g0(sc, 85.0) == pytest.approx(0.5, rel=1e-12)

    def test_three_bumps_value(self):
        sc = get_scenario("triple_bump")
        assert eval_g0(sc, 50.0) == pytest.approx(0.1000965, abs=5e-8)
        # oracle recomputed from the closed form
        expected = 0.1 * (1.0 + 0.5 * np.exp(-6.25) + np.exp(-25.0))
        assert eval_g0(sc, 50.0) == pytest.approx(expected, rel=1e-14)

    def test_vectorised(self):
        sc = get_scenario("triple_bump")
        k = np.array([50.0, 75.0, 100.0])
        out = eval_g0(sc, k)
        assert out.shape == (3,)

    def test_unknown_name(self):
        with pytest.raises(ConfigurationError):
            get_scenario("nope")


class TestProjection:
    def test_zero_cells(self):
        sc = get_scenario("mollifier")  # support is [14, 16]
        grid = build_grid(30.0, 0.5)
        state = project_initial(sc, grid)
        assert state.t == 0.0
        assert np.all(state.u[grid.midpoints < 13.5] == 0.0)
        assert np.all(state.u[grid.midpoints > 16.5] == 0.0)

    def test_affine_cells_hit_midpoint(self):
        # cell average of an affine density equals its midpoint value
        sc = get_scenario("disc_line")
        grid = build_grid(200.0, 0.5)
        u = project_initial(sc, grid).u
        inside = (grid.midpoints > 20.5) & (grid.midpoints < 149.5)
        expected = 1.0 - (grid.midpoints[inside] - 20.0) / 130.0
        np.testing.assert_allclose(u[inside], expected, rtol=1e-13)

    def test_bump_mass_matches_adaptive_quadrature(self):
        sc = get_scenario("mollifier")
        grid = build_grid(30.0, 0.5)
        u = project_initial(sc, grid).u
        ref, _ = quad(lambda x: float(eval_g0(sc, x)), 14.0, 16.0,
                      epsabs=1e-14, epsrel=1e-13, limit=200)
        assert np.sum(u * grid.dk) == pytest.approx(ref, rel=1e-6)

    @pytest.mark.parametrize("name", sorted(SCENARIOS))
    def test_non_negative(self, name):
        sc = get_scenario(name)
        grid = build_grid(max(sc.L_values), 0.5)
        assert project_initial(sc, grid).u.min() >= 0.0

    def test_mass_refinement_order_smooth(self):
        sc = get_scenario("mollifier")
        ref, _ = quad(lambda x: float(eval_g0(sc, x)), 14.0, 16.0,
                      epsabs=1e-14, epsrel=1e-13, limit=200)
        errs = []
        for dk in (0.5, 0.25):
            grid = build_grid(30.0, dk)
            errs.append(abs(np.sum(project_initial(sc, grid).u * dk) - ref))
        order = np.log2(errs[0] / errs[1])
        assert order >= 2.0

    def test_mass_refinement_order_discontinuous(self):
        # jumps misaligned with cell edges: first-order cell-local error
        sc = get_scenario("disc_line")
        ref = 0.5 * 130.0  # triangle area of the ramp
        errs = []
        for dk in (0.7, 0.35):
            grid = build_grid(210.0, dk)
            errs.append(abs(np.sum(project_initial(sc, grid).u * dk) - ref))
        order = np.log2(errs[0] / errs[1])
        assert order >= 1.0


class TestTabulated:
    def test_interpolates_and_zeroes_outside(self):
        sc = tabulated_scenario([1.0, 2.0, 3.0], [0.0, 2.0, 0.0])
        assert eval_g0(sc, 1.5) == pytest.approx(1.0)
        assert eval_g0(sc, 0.5) == 0.0
        assert eval_g0(sc, 3.5) == 0.0

    def test_loader_roundtrip(self, tmp_path):
        path = tmp_path / "table.csv"
        np.savetxt(path, np.column_stack([[1.0, 2.0, 3.0], [0.0, 2.0, 0.0]]), delimiter=",")
        sc = load_tabulated(path)
        assert eval_g0(sc, 2.0) == pytest.approx(2.0)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            tabulated_scenario([1.0], [1.0])
        with pytest.raises(ConfigurationError):
            tabulated_scenario([1.0, 0.5], [1.0, 1.0])
        with pytest.raises(ConfigurationError):
            tabulated_scenario([1.0, 2.0], [1.0, -1.0])
