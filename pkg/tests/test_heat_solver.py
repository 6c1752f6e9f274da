import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import special

from heatreach import heat_solver as hs
from heatreach.controls import StepControl
from heatreach.hermite_basis import psi_T
from heatreach.numerics import Grid, integrate
from heatreach.reach_synth import step_control

SQ = math.sqrt(2 / math.pi)


def control_term_by_quadrature(u, x):
    """Direct quadrature of the boundary-source integral in the lag variable."""
    T = u.T
    total = 0.0
    for a, b, c in u.pieces():
        f = lambda s: math.sqrt(2 / math.pi) * x * np.exp(-x * x / (4 * s)) / (2 * s) ** 1.5
        total += c * integrate(f, (T - b, T - a))[0]
    return total


CORPUS = [
    StepControl.constant(1.0, 1.0),
    StepControl([0.0, 0.3, 0.7, 1.0], [1.0, -2.0, 0.5], 1.0),
    StepControl([0.0, 0.5, 2.0], [0.0, 3.0], 2.0),
    step_control(1, 10, 1.0),
    step_control(2, 100, 1.0),
]


class TestForwardX:
    def test_constant_control_is_erfc(self):
        x = np.linspace(0.0, 6.0, 601)
        for T in (0.5, 1.0, 3.0):
            u = StepControl.constant(1.0, T)
            assert_allclose(hs.end_state_x(u, None, x), special.erfc(x / (2 * math.sqrt(T))), rtol=0, atol=1e-12)

    def test_erfc_at_two(self):
        assert_allclose(hs.end_state_x(StepControl.constant(1.0, 1.0), None, 2.0), 0.157299207050285, rtol=1e-14)

    def test_zero_control(self):
        assert np.all(hs.end_state_x(StepControl.zero(1.0), None, np.linspace(0, 5, 11)) == 0.0)

    def test_boundary_value(self):
        u = StepControl([0.0, 0.5, 1.0], [2.0, -1.0], 1.0)
        assert hs.end_state_x(u, None, 0.0) == -1.0
        assert_allclose(hs.end_state_x(u, None, 1e-9), -1.0, atol=1e-8)

    @pytest.mark.parametrize("t", [0.2, 0.45, 0.8])
    def test_boundary_trace_at_interior_times(self, t):
        u = StepControl([0.0, 0.3, 0.6, 1.0], [1.0, -2.0, 0.5], 1.0)
        assert abs(hs.end_state_x(u, None, 1e-6, t) - u(t)) <= 1e-4

    @pytest.mark.parametrize("u", CORPUS[:3])
    @pytest.mark.parametrize("x", [0.1, 0.8, 2.5])
    def test_against_quadrature(self, u, x):
        assert_allclose(hs.control_term_x(u, x), control_term_by_quadrature(u, x), rtol=1e-9, atol=1e-13)

    def test_odd(self):
        u = CORPUS[1]
        x = np.linspace(0.1, 3, 9)
        assert_allclose(hs.control_term_x(u, -x), -hs.control_term_x(u, x))

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3),
        st.lists(st.floats(-5, 5, allow_nan=False), min_size=2, max_size=2),
        st.floats(-2, 2),
        st.floats(-2, 2),
    )
    def test_linear_in_control(self, l1, l2, alpha, beta):
        u1 = StepControl([0.0, 0.2, 0.5, 1.0], l1, 1.0)
        u2 = StepControl([0.0, 0.6, 1.0], l2, 1.0)
        x = np.linspace(0.05, 4.0, 15)
        lhs = hs.end_state_x(alpha * u1 + beta * u2, None, x)
        rhs = alpha * hs.end_state_x(u1, None, x) + beta * hs.end_state_x(u2, None, x)
        assert_allclose(lhs, rhs, rtol=0, atol=1e-12)


class TestForwardSigma:
    def test_constant_control(self):
        u = StepControl.constant(1.0, 1.0)
        assert_allclose(hs.end_state_sigma(u, None, 1.0), -1j * SQ * (1 - math.exp(-1)), rtol=1e-15)

    def test_zero_frequency(self):
        assert hs.end_state_sigma(CORPUS[1], None, 0.0) == 0

    def test_continuous_at_zero(self):
        u = CORPUS[1]
        s = np.array([1e-12, 1e-9, 1e-6, 1e-4])
        # V(sigma) ~ -sqrt(2/pi) i sigma int u: slope at the origin
        slope = hs.end_state_sigma(u, None, s) / s
        assert_allclose(slope, -1j * SQ * sum((b - a) * c for a, b, c in u.pieces()), rtol=1e-7)

    def test_taylor_branch_matches_exact(self):
        u = CORPUS[1]
        s = np.array([0.9e-4, 1.1e-4])  # straddles the branch switch sigma^2 T = 1e-8
        v = hs.end_state_sigma(u, None, s)
        assert_allclose(v[1] / s[1], v[0] / s[0], rtol=1e-7)

    @pytest.mark.parametrize("u", CORPUS)
    def test_envelope(self, u):
        sigma = np.geomspace(1e-3, 1e3, 200)
        assert np.all(np.abs(hs.end_state_sigma(u, None, sigma)) <= hs.linfty_envelope(u, sigma, u.T) + 1e-12)

    def test_envelope_values(self):
        u = StepControl.constant(1.0, 1.0)
        assert_allclose(hs.linfty_envelope(u, 1.0, 1.0), SQ * (1 - math.exp(-1)), rtol=1e-15)
        assert hs.linfty_envelope(StepControl.zero(1.0), 1.0, 1.0) == 0.0
        big = np.array([1e6])
        assert_allclose(hs.linfty_envelope(u, big, 1.0) * big, SQ, rtol=1e-12)

    def test_restricted_time(self):
        u = CORPUS[1]
        assert_allclose(hs.end_state_sigma(u, None, 1.3, t=0.5), hs.end_state_sigma(u.restrict(0.5), None, 1.3))


class TestStates:
    def test_polynomial_targets_match_definition(self):
        # v(s) = s: W(x) = sqrt(2/pi) x int_0^1 exp(-x^2/4s) v(s) / (2s)^{3/2} ds
        for state, v in ((hs.example1(), lambda s: s), (hs.example2(), lambda s: 1 - s)):
            for x in (0.3, 1.0, 2.7):
                f = lambda s: SQ * x * np.exp(-x * x / (4 * s)) * v(s) / (2 * s) ** 1.5
                assert_allclose(state(x), integrate(f, (0.0, 1.0))[0], rtol=1e-11)

    @pytest.mark.parametrize("state", [hs.example1(), hs.example2(), hs.example3(), hs.example3(2.0)])
    def test_closed_form_fourier(self, state):
        sigma = np.array([0.05, 0.5, 1.0, 2.5])
        assert_allclose(state.fourier(sigma), hs.OddState.fourier(state, sigma), rtol=1e-9, atol=1e-13)

    def test_example3_coefficients(self):
        W = hs.example3(1.0)
        x = np.linspace(0, 8, 50)
        approx = sum(w * psi_T(n, x, 1.0) for n, w in enumerate(W.omegas(10)))
        assert_allclose(approx, W(x), atol=1e-12)

    def test_polynomial_moments(self):
        assert_allclose(hs.example1().moments(3), [1 / 2, 1 / 3, 1 / 4, 1 / 5])
        assert_allclose(hs.example2().moments(2), [1 / 2, 1 / 6, 1 / 12])

    def test_combination(self):
        W = hs.example1() - 2.0 * hs.example2()
        x = np.array([0.4, 1.5])
        assert_allclose(W(x), hs.example1()(x) - 2.0 * hs.example2()(x))
        assert_allclose(W.fourier(x), hs.example1().fourier(x) - 2.0 * hs.example2().fourier(x))

    def test_grid_state(self):
        g = Grid.linspace(0.0, 10.0, 2001)
        W = hs.GridState(g, hs.example3()(g.points), T=1.0)
        x = np.linspace(0.1, 6, 13)
        assert_allclose(W(x), hs.example3()(x), atol=1e-10)
        assert W(12.0) == 0.0
        with pytest.raises(ValueError):
            hs.GridState(g, np.ones(3))

    def test_heat_evolution_of_basis_element(self):
        # the heat flow maps psi_T to a rescaled Hermite function: check via Fourier
        W0 = hs.basis_state(1, 0.5)
        t = 0.5
        x = np.array([0.3, 1.2, 2.0])
        sigma_side = lambda xx: integrate(
            lambda s: 2 * np.imag(np.exp(-t * s * s) * W0.fourier(s)) * np.sin(s * xx) * -1, (0.0, math.inf)
        )[0] / math.sqrt(2 * math.pi)
        assert_allclose(hs.heat_evolve_x(W0, x, t), [sigma_side(v) for v in x], rtol=1e-9)

    def test_controlled_from_initial_state(self):
        W0 = hs.example3()
        u = CORPUS[1]
        state = hs.ControlledState(u, W0)
        assert_allclose(state.l2_norm(), hs.l2_norm_halfline(lambda s: state.fourier(s)), rtol=1e-8)


class TestNorms:
    def test_zero_distance(self):
        assert hs.error_norm(hs.example1(), hs.example1()) == 0.0

    def test_basis_norm(self):
        assert_allclose(hs.error_norm(hs.basis_state(0, 1.0), hs.ZeroState()), math.sqrt(2 * math.sqrt(2 * math.pi)), rtol=1e-12)

    @pytest.mark.parametrize("u", CORPUS)
    def test_plancherel(self, u):
        target = hs.example3(u.T)
        state = hs.ControlledState(u)
        nx = hs.error_norm(target, state, side="x")
        ns = hs.error_norm(target, state, side="sigma")
        assert_allclose(nx, ns, rtol=1e-6)

    def test_profiles(self):
        grid = Grid.linspace(0.0, 12.0, 4001)
        V = hs.SpectralProfile.of_state(hs.example3())
        sampled = hs.SpectralProfile.from_samples(grid, V(grid.points))
        assert hs.error_norm(V, sampled) < 1e-8
        assert_allclose(hs.error_norm(sampled, hs.SpectralProfile("zero", np.zeros_like)), hs.example3().l2_norm(), rtol=1e-9)
        assert (V - sampled).kind == "difference"

    def test_mixed_sides_rejected(self):
        with pytest.raises(TypeError):
            hs.error_norm(hs.SpectralProfile.of_state(hs.example3()), hs.example3())
        with pytest.raises(ValueError):
            hs.error_norm(hs.example1(), hs.example2(), side="z")
