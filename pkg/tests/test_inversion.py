import math

import numpy as np
import pytest

from lapbs.contour import ContourParams, quadrature_nodes
from lapbs.inversion import (TransformEnsemble, direct_trapezoid, invert_at,
                             invert_many)

TABLE3 = {
    3: (13.48, 12.42, 0.16500),
    6: (26.95, 24.84, 0.09385),
    9: (40.43, 37.26, 0.06809),
    15: (67.38, 62.09, 0.04556),
}


def contour(n):
    g, nu, tau = TABLE3[n]
    return ContourParams(g, nu, 0.4213, tau, n)


class TestEnsemble:
    def test_from_evaluator_shape(self):
        ens = TransformEnsemble.from_evaluator(contour(15), lambda z: 1.0 / z)
        assert ens.values.shape == (15, 1)
        assert [q.j for q in ens.nodes] == list(range(15))

    def test_length_mismatch_rejected(self):
        c = contour(15)
        half = [q for q in quadrature_nodes(c) if q.j >= 0]
        with pytest.raises(ValueError):
            TransformEnsemble(c, half[:-1], np.ones((14, 1), dtype=complex))
        with pytest.raises(ValueError):
            TransformEnsemble(c, half, np.ones((14, 1), dtype=complex))


class TestInvertAt:
    def test_exponential_pairs(self):
        # transform 1/(z+a) <-> e^{-a t}
        c = contour(15)
        for a in (0.05, 1.0, 5.0):
            ens = TransformEnsemble.from_evaluator(c, lambda z: 1.0 / (z + a))
            got = invert_at(ens, 1.0)
            assert abs(got - math.exp(-a)) <= 1e-6 * math.exp(-a)

    def test_ramp_pair(self):
        # transform 1/z^2 <-> t
        ens = TransformEnsemble.from_evaluator(contour(15), lambda z: z**-2.0)
        assert invert_at(ens, 1.0) == pytest.approx(1.0, abs=1e-6)

    def test_error_decays_with_node_count(self):
        errs = []
        for n in (3, 6, 9, 15):
            ens = TransformEnsemble.from_evaluator(
                contour(n), lambda z: 1.0 / (z + 1.0))
            errs.append(abs(invert_at(ens, 1.0) - math.exp(-1.0)))
        assert all(a > b for a, b in zip(errs[:-1], errs[1:]))
        # super-algebraic: N=15 beats N=3 by far more than (15/3)^2
        assert errs[0] / errs[-1] > 1e4

    def test_zero_transform(self):
        ens = TransformEnsemble.from_evaluator(contour(15), lambda z: 0.0)
        assert invert_at(ens, 1.0) == 0.0

    def test_vector_values(self):
        c = contour(15)
        half = [q for q in quadrature_nodes(c) if q.j >= 0]
        vals = np.array([[1.0 / (q.z + 1.0), 1.0 / (q.z + 5.0)] for q in half])
        ens = TransformEnsemble(c, half, vals)
        got = invert_at(ens, 1.0)
        assert got[0] == pytest.approx(math.exp(-1.0), abs=1e-6)
        assert got[1] == pytest.approx(math.exp(-5.0), abs=1e-6)

    def test_nonpositive_time_rejected(self):
        ens = TransformEnsemble.from_evaluator(contour(15), lambda z: 1.0 / z)
        with pytest.raises(ValueError):
            invert_at(ens, 0.0)

    def test_residual_diagnostics_recorded(self):
        ens = TransformEnsemble.from_evaluator(
            contour(15), lambda z: 1.0 / (z + 1.0))
        _, res = invert_at(ens, 1.0, return_residual=True)
        assert res >= 0.0
        assert ens.diagnostics[1.0] == res

    def test_invert_many_matches_single_calls(self):
        ens = TransformEnsemble.from_evaluator(
            contour(15), lambda z: 1.0 / (z + 1.0))
        times = [0.5, 1.0, 1.5]
        many = invert_many(ens, times)
        assert many == [invert_at(ens, t) for t in times]


class TestDirectTrapezoid:
    def test_exponential_tolerance(self):
        got = direct_trapezoid(0.5, 4.0, 10_000, lambda z: 1.0 / (z + 1.0), 1.0)
        assert abs(got - math.exp(-1.0)) <= 1e-3 * math.exp(-1.0)

    def test_slow_algebraic_improvement(self):
        errs = []
        for n in (100, 1_000, 10_000):
            got = direct_trapezoid(0.5, 4.0, n, lambda z: 1.0 / (z + 1.0), 1.0)
            errs.append(abs(got - math.exp(-1.0)))
        assert errs[0] > errs[1] > errs[2]
        # nowhere near the contour method's decay
        assert errs[0] / errs[2] < 1e6

    def test_time_outside_window_rejected(self):
        with pytest.raises(ValueError):
            direct_trapezoid(0.5, 4.0, 100, lambda z: 1.0 / z, 5.0)
        with pytest.raises(ValueError):
            direct_trapezoid(0.5, 4.0, 100, lambda z: 1.0 / z, 0.0)
