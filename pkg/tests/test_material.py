import math

import numpy as np
import pytest

from vdwbem import DrudeModel, eps_imaginary, half_space_reflection, lambda_of_eps
from vdwbem.errors import MaterialError

TWO_PI = 2.0 * math.pi


class TestEpsImaginary:
    def test_gold_at_1ev(self, gold):
        # 1 + 81 / (1 * 1.035)
        assert eps_imaginary(gold, 1.0) == pytest.approx(1.0 + 81.0 / 1.035, rel=1e-12)
        assert eps_imaginary(gold, 1.0) == pytest.approx(79.261, abs=5e-4)

    def test_large_xi_limit(self, gold):
        eps = eps_imaginary(gold, 1e6)
        assert 1.0 < eps < 1.0 + 1e-9

    def test_strictly_decreasing(self, gold):
        e = [eps_imaginary(gold, x) for x in (0.1, 1.0, 10.0)]
        assert e[0] > e[1] > e[2]

    def test_positive_domain(self, gold):
        with pytest.raises(MaterialError):
            eps_imaginary(gold, 0.0)
        with pytest.raises(MaterialError):
            eps_imaginary(gold, -1.0)

    def test_vectorized(self, gold):
        xi = np.array([0.5, 2.0])
        eps = eps_imaginary(gold, xi)
        assert eps.shape == (2,)
        assert eps[0] == eps_imaginary(gold, 0.5)

    def test_model_validation(self):
        with pytest.raises(MaterialError):
            DrudeModel(-9.0, 0.035)
        with pytest.raises(MaterialError):
            DrudeModel(9.0, -0.1)


class TestLambda:
    def test_metal_limit(self):
        assert lambda_of_eps(1e14) == pytest.approx(TWO_PI, rel=1e-12)

    def test_froehlich_sphere_value(self):
        # eps = -2 is the l=1 sphere plasmon condition
        assert lambda_of_eps(-2.0) == pytest.approx(TWO_PI / 3.0, rel=1e-14)

    def test_eps_three(self):
        assert lambda_of_eps(3.0) == pytest.approx(4.0 * math.pi, rel=1e-14)

    def test_singular_at_vacuum(self):
        with pytest.raises(MaterialError):
            lambda_of_eps(1.0)


class TestReflection:
    def test_vacuum(self):
        assert half_space_reflection(1.0) == 0.0

    def test_metal_limit(self):
        assert half_space_reflection(1e14) == pytest.approx(1.0, abs=1e-12)

    def test_gold_value(self):
        assert half_space_reflection(79.261) == pytest.approx(0.97508, abs=1e-5)

    def test_singular(self):
        with pytest.raises(MaterialError):
            half_space_reflection(-1.0)


class TestImaginaryAxisProperties:
    def test_response_ranges_over_frequency_sweep(self, gold):
        xi = np.logspace(-3, 4, 60)
        eps = eps_imaginary(gold, xi)
        lam = lambda_of_eps(eps)
        r = half_space_reflection(eps)
        assert np.all(eps > 1.0)
        assert np.all(lam > TWO_PI)
        assert np.all((r > 0.0) & (r < 1.0))

    def test_limits(self, gold):
        # xi -> 0+: lambda -> 2 pi from above, r -> 1-; xi -> inf: lambda -> inf, r -> 0+
        lam_lo = lambda_of_eps(eps_imaginary(gold, 1e-6))
        lam_hi = lambda_of_eps(eps_imaginary(gold, 1e6))
        assert lam_lo == pytest.approx(TWO_PI, rel=1e-8)
        assert lam_hi > 1e9
        assert half_space_reflection(eps_imaginary(gold, 1e-6)) > 1.0 - 1e-8
        assert half_space_reflection(eps_imaginary(gold, 1e6)) < 1e-8
