"""
Forward evaluation of the boundary-controlled heat equation on a half-axis.

States are odd functions on the real line (the odd extension of a state on
``(0, inf)``).  A control ``u`` applied at ``x = 0`` over ``[0, T]`` moves an
initial state ``W0`` to::

    W(x, T) = (heat kernel at time T) * W0
              + sqrt(2/pi) x int_0^T exp(-x^2 / 4s) u(T - s) / (2s)^(3/2) ds

and, with the unitary Fourier transform ``F f(sigma) = (2 pi)^(-1/2) int f(x)
exp(-i sigma x) dx``,::

    V(sigma, T) = exp(-T sigma^2) V0(sigma)
                  - sqrt(2/pi) i sigma int_0^T exp(-(T - t) sigma^2) u(t) dt.

For step controls both control terms are evaluated in closed form, piece by
piece (error-function differences in ``x``, exponentials in ``sigma``).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import interpolate, special

from .controls import StepControl
from .errors import QuadratureFailure, NonConvergent
from .hermite_basis import HermiteExpansion
from .numerics import Grid, QuadratureSpec, default_spec, erf_diff, integrate, l2_norm_halfline

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
SQRT_PI = math.sqrt(math.pi)
TAYLOR_SWITCH = 1e-8


# -- states -------------------------------------------------------------------

class OddState:
    """An odd function of ``x``; subclasses define it on ``x >= 0``.

    Calling the state evaluates it (vectorised, odd extension included);
    :meth:`fourier` returns its Fourier image, by quadrature unless a
    subclass knows a closed form.
    """

    kind = "custom"
    T = None

    def _half(self, x):
        raise NotImplementedError

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        out = np.zeros(ax.shape)
        pos = ax > 0
        if np.any(pos):
            out[pos] = self._half(ax[pos])
        out = np.where(x < 0, -out, out)
        return out if out.ndim else float(out)

    def _fourier_half(self, sigma, spec):
        values = []
        for s in np.atleast_1d(sigma):
            v, _ = integrate(lambda x: self(x) * np.sin(s * x), (0.0, math.inf), spec)
            values.append(v)
        return -1j * SQRT_2_OVER_PI * np.array(values, dtype=float)

    def fourier(self, sigma, spec: QuadratureSpec | None = None):
        """Fourier image ``V(sigma)``; purely imaginary and odd for real states."""
        sigma = np.asarray(sigma, dtype=float)
        flat = sigma.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        nz = flat != 0
        if np.any(nz):
            out[nz] = np.sign(flat[nz]) * self._fourier_half(np.abs(flat[nz]), spec)
        out = out.reshape(sigma.shape)
        return out if out.ndim else complex(out)

    def _fourier_closed(self, sigma):
        return self._fourier_half(sigma, None)

    # arithmetic builds lazy linear combinations
    def __add__(self, other):
        if not isinstance(other, OddState):
            return NotImplemented
        return CombinationState([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        if not isinstance(other, OddState):
            return NotImplemented
        return CombinationState([(1.0, self), (-1.0, other)])

    def __mul__(self, c):
        return CombinationState([(float(c), self)])

    __rmul__ = __mul__

    def __neg__(self):
        return CombinationState([(-1.0, self)])

    def l2_norm(self, spec=None):
        return l2_norm_halfline(self, spec)


class ClosedFormOddState(OddState):
    """An odd state whose Fourier image is known analytically."""

    def _sigma(self, sigma):
        raise NotImplementedError

    def fourier(self, sigma, spec=None):
        sigma = np.asarray(sigma, dtype=float)
        out = np.asarray(self._sigma(sigma), dtype=complex)
        return out if out.ndim else complex(out)


class ZeroState(ClosedFormOddState):
    kind = "zero"

    def _half(self, x):
        return np.zeros_like(x)

    def _sigma(self, sigma):
        return np.zeros(sigma.shape, dtype=complex)


class CombinationState(ClosedFormOddState):
    """Finite linear combination ``sum c_i W_i``."""

    kind = "combination"

    def __init__(self, terms):
        flat = []
        for c, s in terms:
            if isinstance(s, CombinationState):
                flat.extend((c * c2, s2) for c2, s2 in s.terms)
            else:
                flat.append((c, s))
        self.terms = tuple(flat)
        Ts = {s.T for _, s in self.terms if s.T is not None}
        self.T = Ts.pop() if len(Ts) == 1 else None

    def _half(self, x):
        return sum(c * s._half(x) for c, s in self.terms)

    def fourier(self, sigma, spec=None):
        sigma = np.asarray(sigma, dtype=float)
        out = sum(c * np.asarray(s.fourier(sigma, spec), dtype=complex) for c, s in self.terms)
        out = np.asarray(out, dtype=complex) * np.ones(sigma.shape)
        return out if out.ndim else complex(out)


class ExpansionState(ClosedFormOddState):
    """Finite sum ``sum omega_n psi_T(n, x, T)``; also covers single basis elements."""

    kind = "expansion"

    def __init__(self, expansion: HermiteExpansion):
        self.expansion = expansion
        self.T = expansion.T

    def _half(self, x):
        return self.expansion(x)

    def _sigma(self, sigma):
        return self.expansion.fourier(sigma)


def basis_state(n, T, scale=1.0):
    """The basis element ``scale * psi_T(n, ., T)`` as a state."""
    coeffs = [0.0] * n + [scale]
    state = ExpansionState(HermiteExpansion(T, coeffs))
    state.kind = "basis-element"
    return state


def _reversed_power_integrals(k_max, s, T):
    """``int_0^T xi^k exp(-s xi) d xi`` for k = 0..k_max, s >= 0 (array)."""
    s = np.asarray(s, dtype=float)
    out = np.empty((k_max + 1,) + s.shape)
    small = s * T < 1.0
    for k in range(k_max + 1):
        col = np.empty(s.shape)
        if np.any(small):
            ss = s[small]
            acc = np.zeros(ss.shape)
            term = np.full(ss.shape, T ** (k + 1))
            for m in range(40):
                acc = acc + term / (k + m + 1)
                term = term * (-ss * T) / (m + 1)
            col[small] = acc
        big = ~small
        if np.any(big):
            sb = s[big]
            col[big] = math.factorial(k) * special.gammainc(k + 1, sb * T) / sb ** (k + 1)
        out[k] = col
    return out


class PolynomialControlState(ClosedFormOddState):
    """State reached from zero under the reversed-time control ``v(s) = sum a_k s^k``.

    Here ``v(s) = u(T - s)``; :func:`example1` and :func:`example2` use
    ``v(s) = s`` and ``v(s) = 1 - s``.
    """

    kind = "polynomial-control"

    def __init__(self, coeffs, T=1.0):
        self.coeffs = tuple(float(a) for a in coeffs)
        self.T = float(T)

    def _half(self, x):
        z = x * x / (4.0 * self.T)
        rz = np.sqrt(z)
        ez = np.exp(-z)
        g = SQRT_PI * special.erfc(rz)
        total = self.coeffs[0] * g
        for k in range(1, len(self.coeffs)):
            g = (rz * ez - z * g) / (k - 0.5)
            total = total + self.coeffs[k] * self.T ** k * g
        return total / SQRT_PI

    def _sigma(self, sigma):
        s = sigma * sigma
        ints = _reversed_power_integrals(len(self.coeffs) - 1, s, self.T)
        acc = sum(a * ints[k] for k, a in enumerate(self.coeffs))
        return -1j * SQRT_2_OVER_PI * sigma * acc

    def moments(self, N):
        """Exact power moments ``int_0^T s^n v(s) ds`` for n = 0..N."""
        return np.array(
            [sum(a * self.T ** (n + k + 1) / (n + k + 1) for k, a in enumerate(self.coeffs)) for n in range(N + 1)]
        )

    def control(self):
        """The reversed-time profile ``v`` as a plain function."""
        return lambda s: sum(a * np.asarray(s, dtype=float) ** k for k, a in enumerate(self.coeffs))


def example1(T=1.0):
    """Target reached by ``v(s) = s``."""
    state = PolynomialControlState([0.0, 1.0], T)
    state.kind = "example1"
    return state


def example2(T=1.0):
    """Target reached by ``v(s) = 1 - s``."""
    state = PolynomialControlState([1.0, -1.0], T)
    state.kind = "example2"
    return state


class Example3State(ClosedFormOddState):
    """``2 sqrt(2/pi) e^(1/4) exp(-x^2/4T) sin(x / sqrt(2T))``."""

    kind = "example3"

    def __init__(self, T=1.0):
        self.T = float(T)

    def _half(self, x):
        T = self.T
        return 2.0 * SQRT_2_OVER_PI * math.exp(0.25) * np.exp(-x * x / (4 * T)) * np.sin(x / math.sqrt(2 * T))

    def _sigma(self, sigma):
        T = self.T
        r = math.sqrt(2 * T)
        # exp(-T s^2) sinh(r s) with the exponents merged so neither factor overflows
        damped = 0.5 * (np.exp(-T * sigma * sigma + r * sigma) - np.exp(-T * sigma * sigma - r * sigma))
        return -4j * math.sqrt(T / math.pi) * math.exp(-0.25) * damped

    def omegas(self, N):
        """Analytic expansion coefficients in the basis ``psi_T(n, ., T)``."""
        return np.array(
            [SQRT_2_OVER_PI * (-1) ** n / (4.0 ** n * math.factorial(2 * n + 1)) for n in range(N + 1)]
        )


def example3(T=1.0):
    return Example3State(T)


class GridState(OddState):
    """State known by samples on the half-line; cubic interpolation, zero past the grid."""

    kind = "grid"

    def __init__(self, grid: Grid, values, T=None):
        x = np.asarray(grid.points, dtype=float)
        y = np.asarray(values, dtype=float)
        if x.shape != y.shape:
            raise ValueError("values do not match the grid")
        if x[0] < 0:
            raise ValueError("grid states are sampled on x >= 0")
        if x[0] > 0:
            x = np.concatenate([[0.0], x])
            y = np.concatenate([[0.0], y])
        self.grid = grid
        self.x_max = float(x[-1])
        self._spline = interpolate.CubicSpline(x, y)
        self.T = T

    def _half(self, x):
        return np.where(x <= self.x_max, self._spline(np.minimum(x, self.x_max)), 0.0)


class ControlledState(ClosedFormOddState):
    """End state produced by a step control from an initial state."""

    kind = "controlled"

    def __init__(self, u: StepControl, W0: OddState | None = None, spec=None):
        self.u = u
        self.W0 = W0 if W0 is not None else ZeroState()
        self.T = u.T
        self.spec = spec

    def _half(self, x):
        return end_state_x(self.u, self.W0, x, spec=self.spec)

    def _sigma(self, sigma):
        return end_state_sigma(self.u, self.W0, sigma, spec=self.spec)


# -- forward map --------------------------------------------------------------

def _active_pieces(u):
    pieces = [(a, b, c) for a, b, c in u.pieces() if c != 0.0]
    if not pieces:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    a, b, c = (np.array(v) for v in zip(*pieces))
    return a, b, c


def control_term_x(u: StepControl, x):
    """Control contribution to ``W(x, T)``, odd in ``x``.

    A level ``c`` held on ``(a, b)`` contributes
    ``c * (erf(x / 2 sqrt(T - b)) - erf(x / 2 sqrt(T - a)))`` for ``x > 0``.
    At ``x = 0`` the limit from the right is returned, i.e. the boundary
    value ``u(T-)``.
    """
    x = np.asarray(x, dtype=float)
    flat = np.abs(x.ravel())
    a, b, c = _active_pieces(u)
    out = np.zeros(flat.shape)
    pos = np.isfinite(flat)
    if a.size and np.any(pos):
        xp = flat[pos][:, None]
        far = u.T - a  # larger lag
        near = u.T - b  # smaller lag, may be zero
        root_far = np.sqrt(far)
        root_near = np.sqrt(np.maximum(near, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            lo = xp / (2.0 * root_far)[None, :]
            hi = np.where(near[None, :] > 0, xp / (2.0 * root_near)[None, :], np.inf)
            # hi - lo written without subtracting the rounded endpoints
            gap = xp / 2.0 * ((b - a) / (root_far * root_near * (root_far + root_near)))[None, :]
        out[pos] = erf_diff(lo, hi, gap) @ c
    out = out.reshape(x.shape) * np.where(x < 0, -1.0, 1.0)
    return out if out.ndim else float(out)


_GH_LOW = np.polynomial.hermite.hermgauss(64)
_GH_HIGH = np.polynomial.hermite.hermgauss(128)


def heat_evolve_x(W0: OddState, x, t, spec=None):
    """``(heat kernel at time t) * W0`` evaluated at ``x``.

    Uses the substitution ``y = x + 2 sqrt(t) s`` and Gauss-Hermite nodes; if
    64 and 128 nodes disagree the adaptive integrator takes over.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(W0, ZeroState):
        return np.zeros(x.shape) if x.ndim else 0.0
    spec = spec or default_spec()
    r = 2.0 * math.sqrt(t)
    flat = x.ravel()

    def gh(rule):
        nodes, weights = rule
        return W0(flat[:, None] + r * nodes[None, :]) @ weights / SQRT_PI

    lo, hi = gh(_GH_LOW), gh(_GH_HIGH)
    bad = np.abs(lo - hi) > np.maximum(spec.abs_tol, spec.rel_tol * np.abs(hi)) * 1e3
    out = hi
    for i in np.nonzero(bad)[0]:
        xi = flat[i]
        try:
            v, _ = integrate(lambda s: np.exp(-s * s) * W0(xi + r * s), (-math.inf, math.inf), spec)
        except NonConvergent as exc:
            raise QuadratureFailure(f"heat-kernel convolution failed at x={xi}") from exc
        out[i] = v / SQRT_PI
    out = out.reshape(x.shape)
    return out if out.ndim else float(out)


def end_state_x(u: StepControl, W0: OddState | None, x, t=None, spec=None):
    """``W(x, t)`` under control ``u`` (``t`` defaults to the horizon ``u.T``).

    This is the half-line solution: at ``x = 0`` it returns the boundary
    trace rather than the zero of the odd extension.
    """
    if t is not None and t != u.T:
        u = u.restrict(t)
    out = control_term_x(u, x)
    if W0 is not None and not isinstance(W0, ZeroState):
        out = out + heat_evolve_x(W0, x, u.T, spec)
    return out


def control_term_sigma(u: StepControl, sigma):
    """``-sqrt(2/pi) i sigma int_0^T exp(-(T - t) sigma^2) u(t) dt`` in closed form."""
    sigma = np.asarray(sigma, dtype=float)
    flat = sigma.ravel()
    a, b, c = _active_pieces(u)
    T = u.T
    if a.size == 0:
        out = np.zeros(flat.shape, dtype=complex)
    else:
        s = (flat * flat)[:, None]
        width = (b - a)[None, :]
        lag = (T - b)[None, :]
        small = s * T < TAYLOR_SWITCH
        with np.errstate(divide="ignore", invalid="ignore"):
            exact = np.exp(-lag * s) * (-np.expm1(-width * s)) / s
        taylor = width * (1.0 - (T - 0.5 * (a + b))[None, :] * s)
        integral = np.where(small, taylor, exact) @ c
        out = -1j * SQRT_2_OVER_PI * flat * integral
    out = out.reshape(sigma.shape)
    return out if out.ndim else complex(out)


def end_state_sigma(u: StepControl, W0: OddState | None, sigma, t=None, spec=None):
    """``V(sigma, t)``, the Fourier image of the state at time ``t``."""
    if t is not None and t != u.T:
        u = u.restrict(t)
    out = control_term_sigma(u, sigma)
    if W0 is not None and not isinstance(W0, ZeroState):
        sigma = np.asarray(sigma, dtype=float)
        out = out + np.exp(-u.T * sigma * sigma) * W0.fourier(sigma, spec)
    return out


def linfty_envelope(u: StepControl, sigma, t):
    """Upper bound ``sqrt(2/pi) |u|_inf (1 - exp(-t sigma^2)) / |sigma|`` on ``|V(sigma, t)|``."""
    sigma = np.asarray(sigma, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = SQRT_2_OVER_PI * u.linf_norm * (-np.expm1(-t * sigma * sigma)) / np.abs(sigma)
    out = np.where(sigma == 0, 0.0, out)
    return out if out.ndim else float(out)


# -- norms ----------------------------------------------------------------------

class SpectralProfile:
    """A function of ``sigma`` on the Fourier side, tagged with what it is.

    ``kind`` names the closed form (``"phi"``, ``"phi_l"``, ``"psi_hat"``,
    ``"state-image"``, ``"samples"`` ...) and ``params`` records its
    parameters; ``func`` evaluates it on arrays.
    """

    def __init__(self, kind, func, **params):
        self.kind = kind
        self.func = func
        self.params = params

    def __call__(self, sigma):
        return self.func(np.asarray(sigma, dtype=float))

    @classmethod
    def of_state(cls, state: OddState, spec=None):
        return cls("state-image", lambda s: state.fourier(s, spec), state=state)

    @classmethod
    def from_samples(cls, grid: Grid, values):
        values = np.asarray(values, dtype=complex)
        re = interpolate.CubicSpline(grid.points, values.real)
        im = interpolate.CubicSpline(grid.points, values.imag)
        lo, hi = grid.points[0], grid.points[-1]

        def f(s):
            inside = (s >= lo) & (s <= hi)
            sc = np.clip(s, lo, hi)
            return np.where(inside, re(sc) + 1j * im(sc), 0.0)

        return cls("samples", f, grid=grid)

    def __sub__(self, other):
        return SpectralProfile("difference", lambda s: self(s) - other(s), left=self, right=other)


def error_norm(Wa, Wb, spec: QuadratureSpec | None = None, side="x"):
    """L2(R) norm of ``Wa - Wb`` for odd states or spectral profiles.

    For two states ``side`` picks where the norm is computed (``"x"`` or
    ``"sigma"``); by Plancherel both must agree.  Two spectral profiles are
    always compared on the sigma side.
    """
    if isinstance(Wa, SpectralProfile) or isinstance(Wb, SpectralProfile):
        if not (isinstance(Wa, SpectralProfile) and isinstance(Wb, SpectralProfile)):
            raise TypeError("both arguments must live on the same side")
        sampled = [p for p in (Wa, Wb) if p.kind == "samples"]
        if sampled:
            # interpolated samples are only piecewise smooth: integrate on their grid
            grid = sampled[0].params["grid"]
            half = grid.points[grid.points >= 0]
            return l2_norm_halfline(Wa(half) - Wb(half), grid=Grid(half, "half-line"))
        return l2_norm_halfline(lambda s: Wa(s) - Wb(s), spec)
    if side == "x":
        return l2_norm_halfline(lambda x: Wa(x) - Wb(x), spec)
    if side == "sigma":
        return l2_norm_halfline(lambda s: Wa.fourier(s, spec) - Wb.fourier(s, spec), spec)
    raise ValueError(f"unknown side {side!r}")
