import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from heatreach.errors import NonConvergent
from heatreach.numerics import (
    Grid,
    QuadratureSpec,
    default_spec,
    erf,
    erf_diff,
    erfc,
    integrate,
    l2_norm_halfline,
)

mpmath.mp.dps = 40


def erf_series(x):
    """Maclaurin series of erf summed in 40-digit arithmetic."""
    x = mpmath.mpf(x)
    total, term, n = mpmath.mpf(0), x, 0
    while True:
        contrib = term / (2 * n + 1)
        total += contrib
        if abs(contrib) < mpmath.mpf(10) ** -35:
            break
        n += 1
        term *= -x * x / n
    return 2 / mpmath.sqrt(mpmath.pi) * total


class TestErf:
    def test_known_values(self):
        assert erf(0.0) == 0.0
        assert_allclose(erf(1.0), 0.8427007929497149, rtol=1e-15)
        assert_allclose(erf(-1.0), -0.8427007929497149, rtol=1e-15)

    @pytest.mark.parametrize("x", [1e-8, 0.1, 0.5, 1.0, 2.0, 3.5, 5.0])
    def test_against_series(self, x):
        assert_allclose(erf(x), float(erf_series(x)), rtol=1e-15, atol=0)
        assert_allclose(erfc(x), float(1 - erf_series(x)), rtol=2e-14, atol=0)

    def test_odd(self, rng):
        x = rng.uniform(-10, 10, 500)
        assert np.all(erf(x) + erf(-x) == 0.0)

    @pytest.mark.parametrize(
        "a,b",
        [(0.3, 0.3 + 1e-9), (1.0, 1.001), (4.0, 4.5), (-0.2, 0.1), (2.0, math.inf), (-math.inf, -3.0), (6.0, 6.2)],
    )
    def test_erf_diff(self, a, b):
        ref = mpmath.erf(mpmath.mpf(b)) - mpmath.erf(mpmath.mpf(a))
        assert_allclose(erf_diff(a, b), float(ref), rtol=1e-13, atol=1e-300)

    def test_erf_diff_antisymmetric(self):
        assert erf_diff(1.2, 0.7) == -erf_diff(0.7, 1.2)

    def test_erf_diff_exact_gap(self):
        # endpoints x / 2 sqrt(1 - a) with a tiny time step, gap supplied analytically
        x, a, b = 1.0, 0.002, 0.003
        lo, hi = x / (2 * math.sqrt(1 - a)), x / (2 * math.sqrt(1 - b))
        ra, rb = math.sqrt(1 - a), math.sqrt(1 - b)
        gap = x / 2 * (b - a) / (ra * rb * (ra + rb))
        ref = mpmath.erf(x / (2 * mpmath.sqrt(1 - mpmath.mpf(b)))) - mpmath.erf(x / (2 * mpmath.sqrt(1 - mpmath.mpf(a))))
        assert_allclose(erf_diff(lo, hi, gap), float(ref), rtol=1e-14)


class TestIntegrate:
    def test_gaussian(self):
        value, err = integrate(lambda x: np.exp(-x * x), (0.0, math.inf))
        assert_allclose(value, math.sqrt(math.pi) / 2, rtol=1e-14)
        assert err < 1e-10

    def test_first_moment(self):
        assert_allclose(integrate(lambda x: x * np.exp(-x * x), (0.0, math.inf))[0], 0.5, rtol=1e-14)

    def test_moment_normalisation_against_closed_form(self):
        # int_0^inf x^3 * x exp(-x^2/4) dx = 3 Gamma(1/2) 2^4 / 4 ... via Gamma(5/2) 2^5 / 2
        value, _ = integrate(lambda x: x ** 3 * x * np.exp(-x * x / 4), (0.0, math.inf))
        assert_allclose(value, 0.5 * 4 ** 2.5 * math.gamma(2.5), rtol=1e-12)

    @pytest.mark.parametrize("n", range(11))
    def test_odd_moments(self, n):
        value, _ = integrate(lambda x: x ** (2 * n + 1) * np.exp(-x * x), (0.0, math.inf))
        assert_allclose(value, math.factorial(n) / 2, rtol=1e-10)

    def test_full_line(self):
        value, _ = integrate(lambda x: np.exp(-((x - 1.0) ** 2)), (-math.inf, math.inf))
        assert_allclose(value, math.sqrt(math.pi), rtol=1e-13)

    def test_left_infinite(self):
        value, _ = integrate(lambda x: np.exp(x), (-math.inf, 0.0))
        assert_allclose(value, 1.0, rtol=1e-13)

    def test_algebraic_tail(self):
        value, _ = integrate(lambda x: 1.0 / (1.0 + x * x), (0.0, math.inf))
        assert_allclose(value, math.pi / 2, rtol=1e-10)

    def test_reversed_interval(self):
        assert_allclose(integrate(np.sin, (math.pi, 0.0))[0], -2.0, rtol=1e-14)

    def test_break_points(self):
        value, _ = integrate(np.abs, (-1.0, 2.0), points=[0.0])
        assert_allclose(value, 2.5, rtol=1e-14)

    def test_scalar_only_callable(self):
        value, _ = integrate(lambda x: math.exp(-x), (0.0, 3.0))
        assert_allclose(value, 1 - math.exp(-3.0), rtol=1e-14)

    def test_complex_integrand(self):
        value, _ = integrate(lambda x: np.exp(1j * x) * np.exp(-x), (0.0, math.inf))
        assert_allclose(value, 1.0 / (1.0 - 1j), rtol=1e-12)

    def test_gauss_kronrod_rule(self):
        spec = QuadratureSpec(rule="gauss-kronrod")
        value, _ = integrate(lambda x: np.exp(-x * x), (0.0, math.inf), spec)
        assert_allclose(value, math.sqrt(math.pi) / 2, rtol=1e-12)

    def test_nonconvergence_raises(self):
        spec = QuadratureSpec(max_refinement_depth=2, abs_tol=1e-15, rel_tol=1e-15)
        with pytest.raises(NonConvergent) as info:
            integrate(lambda x: np.sin(200 * x) ** 2, (0.0, 1.0), spec)
        assert info.value.value is not None

    def test_non_finite_integrand(self):
        with pytest.raises(NonConvergent):
            integrate(lambda x: np.full_like(x, np.nan), (0.0, 1.0))


class TestSpec:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("HEATREACH_QUAD_TOL", raising=False)
        spec = default_spec()
        assert (spec.rule, spec.abs_tol, spec.rel_tol, spec.max_refinement_depth) == ("tanh-sinh", 1e-12, 1e-10, 20)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("HEATREACH_QUAD_TOL", "1e-9")
        assert default_spec().abs_tol == 1e-9

    @pytest.mark.parametrize(
        "kwargs", [{"rule": "simpson"}, {"abs_tol": -1.0}, {"abs_tol": 0.0, "rel_tol": 0.0}, {"max_refinement_depth": 0}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureSpec(**kwargs)


class TestGrid:
    def test_linspace_half_line(self):
        g = Grid.linspace(0.0, 1.0, 5)
        assert g.domain == "half-line" and len(g) == 5

    @pytest.mark.parametrize(
        "points,domain,bounds",
        [([], "full-line", None), ([1.0, 0.5], "full-line", None), ([-1.0, 0.0], "half-line", None), ([0.0, 2.0], "interval", (0.0, 1.0))],
    )
    def test_invalid(self, points, domain, bounds):
        with pytest.raises(ValueError):
            Grid(np.array(points), domain, bounds)


class TestL2Norm:
    def test_basis_element(self):
        f = lambda x: 2 * (x / math.sqrt(2)) * np.exp(-x * x / 4)
        assert_allclose(l2_norm_halfline(f), math.sqrt(2 * math.sqrt(2 * math.pi)), rtol=1e-12)

    def test_zero(self):
        assert l2_norm_halfline(lambda x: np.zeros_like(x)) == 0.0

    def test_gaussian(self):
        assert_allclose(l2_norm_halfline(lambda x: np.exp(-x * x / 2)), math.pi ** 0.25, rtol=1e-13)

    def test_samples(self):
        g = Grid.linspace(0.0, 12.0, 2001)
        assert_allclose(l2_norm_halfline(np.exp(-g.points ** 2 / 2), grid=g), math.pi ** 0.25, rtol=1e-9)

    def test_samples_shape_mismatch(self):
        with pytest.raises(ValueError):
            l2_norm_halfline(np.ones(3), grid=Grid.linspace(0.0, 1.0, 4))

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-1e3, 1e3, allow_nan=False).filter(lambda c: abs(c) > 1e-6))
    def test_homogeneous(self, c):
        f = lambda x: x * np.exp(-x * x)
        assert_allclose(l2_norm_halfline(lambda x: c * f(x)), abs(c) * l2_norm_halfline(f), rtol=1e-12)
