import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bkapprox.model import (
    Kernel,
    ModelParams,
    bridge_covariance,
    bridge_kl_basis,
    bridge_variance,
    drift_integral,
    kl_eigenfunction_value,
    load_model,
    ou_covariance,
    ou_kl_basis,
    ou_variance,
    rbar,
    save_model,
)
from bkapprox.numerics import legendre_rule

b_values = st.floats(0.005, 3.0)
horizons = st.floats(0.1, 20.0)


def _apply_kernel(kernel, f, s, tau, nodes=128):
    """``int_0^tau K(s, t) f(t) dt`` split at the kink ``t = s`` (256 Gauss points in total)."""
    out = []
    for si in np.atleast_1d(s):
        t1, w1 = legendre_rule(0.0, si, nodes)
        t2, w2 = legendre_rule(si, tau, nodes)
        out.append(kernel(si, t1) @ (w1 * f(t1)) + kernel(si, t2) @ (w2 * f(t2)))
    return np.array(out)


class TestModelParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(0.0, 0.1, 0.03)
        with pytest.raises(ValueError):
            ModelParams(0.2, 0.1, 0.03, ((1.0, 0.0),))
        with pytest.raises(ValueError):
            ModelParams(0.2, 0.1, 0.03, ((0.0, 0.0), (0.0, 1.0)))

    def test_round_trip_file(self, tmp_path, base_params):
        path = tmp_path / "m.json"
        save_model(base_params, path)
        assert load_model(path) == base_params
        assert set(json.loads(path.read_text())) == {"sigma", "b", "r0", "a"}

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            ModelParams.from_dict({"sigma": 0.2, "b": 0.1, "r0": 0.03, "a": [{"t": 0, "level": 0}], "x": 1})


class TestDrift:
    def test_zero_horizon(self, base_params):
        assert drift_integral(base_params, 2.0, 0.0) == 0.0

    @given(st.floats(0.0, 10.0), st.floats(0.0, 30.0))
    def test_constant_closed_form(self, u, v):
        p = ModelParams(0.2, 0.3, 0.03, ((0.0, -0.7),))
        assert drift_integral(p, u, v) == pytest.approx((-0.7 / 0.3) * (1 - math.exp(-0.3 * v)), abs=1e-13)

    def test_mean_level_example(self):
        p = ModelParams.with_mean_level(0.25, 0.1, 0.03, 0.03)
        assert drift_integral(p, 0.0, 10.0) == pytest.approx(math.log(0.03) * (1 - math.exp(-1.0)), rel=1e-13)
        assert drift_integral(p, 0.0, 10.0) == pytest.approx(-2.2166, abs=1e-3)

    def test_piecewise_matches_quadrature(self):
        p = ModelParams(0.2, 0.15, 0.03, ((0.0, -0.5), (1.5, -0.2), (4.0, -0.9)))
        for u, v in [(0.0, 6.0), (1.0, 2.0), (2.0, 0.7), (3.5, 5.0)]:
            ref = 0.0
            for lo, hi, level in [(0.0, 1.5, -0.5), (1.5, 4.0, -0.2), (4.0, np.inf, -0.9)]:
                lo, hi = max(lo, u), min(hi, u + v)
                if hi > lo:
                    t, w = legendre_rule(lo, hi, 32)
                    ref += level * (w @ np.exp(-0.15 * (u + v - t)))
            assert drift_integral(p, u, v) == pytest.approx(ref, abs=1e-13)

    def test_rbar_limits(self):
        p = ModelParams.with_mean_level(0.25, 0.1, 0.03, 0.03)
        assert rbar(p, 0.05, 1.0, 0.0) == pytest.approx(0.05)
        assert rbar(p, 0.03, 0.0, 5.0) == pytest.approx(0.03, rel=1e-13)
        fast = ModelParams.with_mean_level(0.25, 200.0, 0.01, 0.04)
        assert rbar(fast, 0.01, 0.0, 1.0) == pytest.approx(0.04, rel=1e-12)


class TestKernels:
    def test_ou_values(self):
        assert np.all(ou_covariance(0.1, 0.0, np.linspace(0, 5, 6)) == 0.0)
        assert float(ou_variance(0.1, 0.0)) == 0.0
        assert float(ou_variance(0.1, 1.0)) == pytest.approx((1 - math.exp(-0.2)) / 0.2, rel=1e-14)
        assert float(ou_variance(0.1, 1.0)) == pytest.approx(0.906346, abs=1e-6)

    def test_bridge_pinned(self):
        t = np.linspace(0, 2, 9)
        np.testing.assert_allclose(bridge_covariance(0.1, 2.0, 2.0, t), 0.0, atol=1e-15)
        assert float(bridge_variance(0.1, 2.0, 0.0)) == 0.0

    @given(st.floats(0.01, 2.0), st.floats(0.2, 10.0), st.floats(0.0, 1.0))
    def test_bridge_variance_closed_form(self, b, T, frac):
        s = frac * T
        conditional = float(ou_variance(b, s)) - float(ou_covariance(b, s, T)) ** 2 / float(ou_variance(b, T))
        got = float(bridge_variance(b, T, s))
        assert got == pytest.approx(conditional, abs=1e-12)
        assert got >= -1e-15

    def test_bridge_example(self):
        expected = float(ou_variance(0.1, 1.0)) - float(ou_covariance(0.1, 1.0, 2.0)) ** 2 / float(ou_variance(0.1, 2.0))
        assert float(bridge_variance(0.1, 2.0, 1.0)) == pytest.approx(expected, rel=1e-13)
        assert 0 < expected < float(ou_variance(0.1, 1.0))

    def test_kernel_object(self):
        k = Kernel(0.2, 3.0, "bridge")
        assert k(1.0, 2.0) == pytest.approx(bridge_covariance(0.2, 3.0, 1.0, 2.0))
        assert k.variance(1.0) == pytest.approx(bridge_variance(0.2, 3.0, 1.0))


@pytest.mark.property
class TestOUBasis:
    def test_frequency_brackets(self):
        basis = ou_kl_basis(0.1, 1.0, 4)
        n = np.arange(4)
        assert np.all(basis.omegas > (n + 0.5) * math.pi) and np.all(basis.omegas < (n + 1) * math.pi)
        w = basis.omegas[0]
        assert abs(w / math.tan(w) + 0.1) <= 1e-10

    def test_frequency_limits(self):
        small = ou_kl_basis(1e-9, 1.0, 3).omegas
        np.testing.assert_allclose(small, (np.arange(3) + 0.5) * math.pi, rtol=1e-8)
        big = ou_kl_basis(1e6, 1.0, 3).omegas
        assert np.all(big < (np.arange(3) + 1) * math.pi)
        np.testing.assert_allclose(big, (np.arange(3) + 1) * math.pi, rtol=1e-5)

    def test_eigenfunction_value(self):
        basis = ou_kl_basis(0.1, 1.0, 2)
        assert kl_eigenfunction_value(basis, 0, 0.0) == 0.0
        assert kl_eigenfunction_value(basis, 0, 1.0) == pytest.approx(basis.norm_constants[0] * math.sin(basis.omegas[0]))
        with pytest.raises(IndexError):
            kl_eigenfunction_value(basis, 2, 0.5)

    @given(b_values, horizons)
    def test_fredholm_residual(self, b, tau):
        basis = ou_kl_basis(b, tau, 4)
        kernel = Kernel(b, tau, "ou")
        s = np.linspace(0.0, tau, 7)[1:]
        for n in range(4):
            f = lambda t, n=n: basis.eigenfunctions(t)[n]
            lhs = _apply_kernel(kernel, f, s, tau)
            assert np.max(np.abs(lhs - basis.lambdas[n] * f(s))) <= 1e-8

    @given(b_values, horizons)
    def test_orthonormal(self, b, tau):
        basis = ou_kl_basis(b, tau, 6)
        t, w = legendre_rule(0.0, tau, 256)
        f = basis.eigenfunctions(t)
        gram = (f * w) @ f.T
        assert np.max(np.abs(gram - np.eye(6))) <= 1e-8

    @given(st.floats(0.02, 1.0), st.floats(0.5, 10.0))
    def test_variance_reconstruction(self, b, tau):
        basis = ou_kl_basis(b, tau, 400)
        t = np.linspace(0.0, tau, 11)
        partial = np.sum(basis.scaled_eigenfunctions(t) ** 2, axis=0)
        full = ou_variance(b, t)
        assert np.all(partial <= full + 1e-12)
        # Tail of sum lambda_n f_n^2 decays like 1 / (n pi / tau)^2 per term.
        assert np.max(full - partial) <= 2.0 * tau / (math.pi**2 * 400)

    @given(b_values, horizons)
    def test_kernel_ode(self, b, tau):
        """``g = K f`` solves ``g'' = b^2 g - f`` inside and ``g'(tau) = -b g(tau)``."""
        basis = ou_kl_basis(b, tau, 1)
        kernel = Kernel(b, tau, "ou")
        f = lambda t: basis.eigenfunctions(t)[0]
        g = lambda s: _apply_kernel(kernel, f, s, tau, 64)
        h = 1e-3 * tau
        s = np.array([0.3, 0.6]) * tau
        second = (g(s + h) - 2 * g(s) + g(s - h)) / h**2
        assert np.max(np.abs(second - (b * b * g(s) - f(s)))) <= 1e-4 * max(1.0, tau)
        end = tau - np.array([0.0, h, 2 * h])
        ge = g(end)
        slope = (3 * ge[0] - 4 * ge[1] + ge[2]) / (2 * h)
        assert slope == pytest.approx(-b * ge[0], abs=1e-5 * max(1.0, tau))


@pytest.mark.property
class TestBridgeBasis:
    def test_eigenvalue_examples(self):
        assert bridge_kl_basis(0.0, math.pi, 1).lambdas[0] == pytest.approx(1.0)
        assert bridge_kl_basis(0.1, 1.0, 1).lambdas[0] == pytest.approx(1 / (0.01 + math.pi**2), rel=1e-14)
        assert 1 / (0.01 + math.pi**2) == pytest.approx(0.101217, abs=2e-6)

    def test_vanishes_at_ends(self):
        basis = bridge_kl_basis(0.3, 2.0, 5)
        np.testing.assert_allclose(basis.eigenfunctions(np.array([0.0, 2.0])), 0.0, atol=1e-14)
        assert basis.eigenfunctions(1.0)[1] == pytest.approx(0.0, abs=1e-15)

    @given(b_values, st.floats(0.1, 10.0))
    def test_fredholm_residual(self, b, T):
        basis = bridge_kl_basis(b, T, 3)
        kernel = Kernel(b, T, "bridge")
        s = np.linspace(0.0, T, 6)[1:-1]
        for n in range(3):
            f = lambda t, n=n: basis.eigenfunctions(t)[n]
            lhs = _apply_kernel(kernel, f, s, T)
            assert np.max(np.abs(lhs - basis.lambdas[n] * f(s))) <= 1e-8

    @given(b_values, st.floats(0.1, 10.0))
    def test_orthonormal(self, b, T):
        basis = bridge_kl_basis(b, T, 6)
        t, w = legendre_rule(0.0, T, 256)
        f = basis.eigenfunctions(t)
        assert np.max(np.abs((f * w) @ f.T - np.eye(6))) <= 1e-8
