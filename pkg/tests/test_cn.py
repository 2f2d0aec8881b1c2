import numpy as np
import pytest

from lapbs import cn, fem1d, fem2d
from lapbs.analytic import bs_put, l2_error, reduction_rate
from lapbs.experiments import EX3_CONTOUR
from lapbs.inversion import invert_at
from lapbs.parallel import ProblemSpec, solve_ensemble

MARKET = fem1d.Market1D(0.05, 0.3, 50.0, 1.0, 200.0)
BASKET = fem2d.Basket2D(0.05, 0.09, 0.09, -0.018, 100.0, 1.0, 300.0, 300.0)


def exact(x):
    return bs_put(x, 1.0, 50.0, 0.05, 0.3)


class TestMarch1D:
    def test_config_validation(self):
        with pytest.raises(ValueError):
            cn.MarchConfig(0)

    def test_zero_data_stays_zero(self):
        mesh = fem1d.Mesh1D(200.0, 20)
        u = cn.march1d(mesh, MARKET, cn.MarchConfig(10),
                       u0=lambda x: 0.0 * x,
                       left_value=lambda t: 0.0,
                       right_value=lambda t: 0.0)
        np.testing.assert_allclose(u, 0.0, atol=1e-14)

    def test_second_order_convergence(self):
        errs = []
        for m in (80, 160, 320):
            mesh = fem1d.Mesh1D(200.0, m)
            u = cn.march1d(mesh, MARKET, cn.MarchConfig(m))
            errs.append(l2_error(u, exact, mesh))
        assert reduction_rate(errs[0], errs[1]) == pytest.approx(2.0, abs=0.01)
        assert reduction_rate(errs[1], errs[2]) == pytest.approx(2.0, abs=0.01)

    def test_fine_mesh_accuracy(self):
        mesh = fem1d.Mesh1D(200.0, 320)
        u = cn.march1d(mesh, MARKET, cn.MarchConfig(320))
        assert l2_error(u, exact, mesh) < 3.1e-3

    def test_stability_envelope(self):
        # the put price never exceeds the discounted strike nor goes negative
        mesh = fem1d.Mesh1D(200.0, 160)
        u = cn.march1d(mesh, MARKET, cn.MarchConfig(160))
        assert np.max(u) <= MARKET.strike * 1.0 + 1e-9
        assert np.max(u) == pytest.approx(50.0 * np.exp(-0.05), rel=1e-10)
        assert np.min(u) >= -1e-9

    def test_boundary_values_imposed(self):
        mesh = fem1d.Mesh1D(200.0, 80)
        u = cn.march1d(mesh, MARKET, cn.MarchConfig(80))
        assert u[0] == pytest.approx(50.0 * np.exp(-0.05), rel=1e-12)
        assert u[-1] == 0.0


class TestMarch2D:
    def test_zero_data_stays_zero(self):
        mesh = fem2d.Mesh2D(300.0, 300.0, 8, 8)
        u = cn.march2d(mesh, BASKET, cn.MarchConfig(5),
                       u0=lambda x1, x2: 0.0 * x1)
        np.testing.assert_allclose(u, 0.0, atol=1e-14)

    def test_swap_symmetry(self):
        mesh = fem2d.Mesh2D(300.0, 300.0, 16, 16)
        u = cn.march2d(mesh, BASKET, cn.MarchConfig(20)).reshape(17, 17)
        np.testing.assert_allclose(u, u.T, rtol=1e-10, atol=1e-12)

    def test_agrees_with_transform_method_on_matched_mesh(self):
        # both discretizations share the spatial matrices, so on one mesh
        # they must agree to the time-stepping/quadrature accuracy
        mesh = fem2d.Mesh2D(300.0, 300.0, 32, 32)
        u_cn = cn.march2d(mesh, BASKET, cn.MarchConfig(200))
        spec = ProblemSpec("basket2d", BASKET, 32, edges=fem2d.EdgeSpec())
        ensemble, _ = solve_ensemble(spec, EX3_CONTOUR, workers=1)
        u_lap = invert_at(ensemble, 1.0)
        rel = np.linalg.norm(u_lap - u_cn) / np.linalg.norm(u_cn)
        assert rel < 1e-5

    def test_stability_envelope(self):
        mesh = fem2d.Mesh2D(300.0, 300.0, 16, 16)
        u = cn.march2d(mesh, BASKET, cn.MarchConfig(50))
        assert np.max(u) <= BASKET.strike + 1e-9
        # small kink undershoot is expected of Crank-Nicolson on coarse grids
        assert np.min(u) >= -1e-3 * BASKET.strike
