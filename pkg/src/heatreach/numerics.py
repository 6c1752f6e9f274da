"""
Special functions and quadrature used throughout the package.

Everything here is generic: error functions, a tanh-sinh integrator with
Gaussian-tail truncation for semi-infinite ranges, a Gauss-Kronrod fallback,
and L2 norms of odd functions known on the half-line.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
from scipy import special

from .errors import NonConvergent

__all__ = [
    "Grid",
    "QuadratureSpec",
    "default_spec",
    "erf",
    "erfc",
    "erf_diff",
    "integrate",
    "l2_norm_halfline",
]

HALF_LINE = "half-line"
FULL_LINE = "full-line"
INTERVAL = "interval"

TANH_SINH = "tanh-sinh"
GAUSS_KRONROD = "gauss-kronrod"

TOL_ENV_VAR = "HEATREACH_QUAD_TOL"
_ROUNDING_FLOOR = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class Grid:
    """Ordered abscissae tagged with the domain they live on.

    ``domain`` is ``"half-line"`` (x >= 0), ``"full-line"`` or ``"interval"``;
    the interval case needs ``bounds=(a, b)``.
    """

    points: np.ndarray
    domain: str = FULL_LINE
    bounds: tuple[float, float] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("grid needs a non-empty 1-d array of points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        if pts.size > 1 and np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if self.domain == HALF_LINE:
            if pts[0] < 0:
                raise ValueError("half-line grid has a negative point")
        elif self.domain == INTERVAL:
            if self.bounds is None:
                raise ValueError("interval grid needs bounds")
            a, b = self.bounds
            if pts[0] < a or pts[-1] > b:
                raise ValueError("grid points fall outside the interval")
        elif self.domain != FULL_LINE:
            raise ValueError(f"unknown domain tag {self.domain!r}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def linspace(cls, start, stop, num, domain=None):
        if domain is None:
            domain = HALF_LINE if start >= 0 else FULL_LINE
        bounds = (start, stop) if domain == INTERVAL else None
        return cls(np.linspace(start, stop, num), domain, bounds)

    def __len__(self):
        return self.points.size


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and rule for :func:`integrate`."""

    rule: str = TANH_SINH
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_refinement_depth: int = 20

    def __post_init__(self):
        if self.rule not in (TANH_SINH, GAUSS_KRONROD):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one tolerance must be positive")
        if self.max_refinement_depth < 1:
            raise ValueError("max_refinement_depth must be >= 1")

    def tolerance(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))


def default_spec() -> QuadratureSpec:
    """Package defaults; ``HEATREACH_QUAD_TOL`` overrides the absolute tolerance."""
    override = os.environ.get(TOL_ENV_VAR)
    if override:
        return QuadratureSpec(abs_tol=float(override))
    return QuadratureSpec()


# -- error function ----------------------------------------------------------

def erf(x):
    """Error function (Cephes implementation via scipy), odd in ``x``."""
    return special.erf(x)


def erfc(x):
    return special.erfc(x)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def erf_diff(a, b, gap=None):
    """``erf(b) - erf(a)`` without cancellation when ``a`` and ``b`` are close.

    Short intervals are integrated directly with 24-point Gauss-Legendre
    (the integrand ``exp(-s^2)`` is entire, so this is exact to rounding);
    long ones fall back to the complementary function on the side where it
    is small.  Infinite endpoints are allowed.

    ``gap``, if given, is an accurately computed ``b - a``; it replaces the
    subtraction, which loses digits when ``a`` and ``b`` are themselves
    rounded results.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    out = np.empty(a.shape, dtype=float)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    sign = np.where(b >= a, 1.0, -1.0)
    if gap is None:
        width = hi - lo
    else:
        width = np.abs(np.broadcast_to(np.asarray(gap, dtype=float), a.shape))
    with np.errstate(invalid="ignore"):
        short = np.isfinite(width) & (width * np.maximum(1.0, np.maximum(abs(lo), abs(hi))) < 0.5)
    if np.any(short):
        mid = 0.5 * (lo[short] + hi[short])
        half = 0.5 * width[short]
        s = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        vals = np.exp(-s * s) @ _GL_WEIGHTS
        out[short] = (2.0 / math.sqrt(math.pi)) * half * vals
    rest = ~short
    if np.any(rest):
        l, h = lo[rest], hi[rest]
        pos = l >= 0
        neg = h <= 0
        mixed = ~(pos | neg)
        r = np.empty(l.shape)
        r[pos] = special.erfc(l[pos]) - special.erfc(h[pos])
        r[neg] = special.erfc(-h[neg]) - special.erfc(-l[neg])
        r[mixed] = special.erf(h[mixed]) - special.erf(l[mixed])
        out[rest] = r
    out *= sign
    return out if out.ndim else float(out)


# -- quadrature --------------------------------------------------------------

def _vectorize(f):
    """Return a callable that maps float arrays to arrays of the same shape."""

    def g(x):
        try:
            y = np.asarray(f(x))
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([f(float(t)) for t in x])

    return g


def _tanh_sinh(f, a, b, spec):
    """Tanh-sinh on the finite interval [a, b] with step halving."""
    d = 0.5 * (b - a)
    if d == 0:
        return 0.0, 0.0
    t_max = 4.0

    def nodes(t):
        u = 0.5 * math.pi * np.sinh(t)
        w = d * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
        # distance from the nearer endpoint, computed without cancellation
        gap = 2.0 * d / (1.0 + np.exp(2.0 * np.abs(u)))
        x = np.where(t < 0, a + gap, b - gap)
        keep = (x > a) & (x < b) & (w > 0)
        return x[keep], w[keep]

    def level_sum(t):
        x, w = nodes(t)
        if x.size == 0:
            return 0.0, 0.0
        y = f(x)
        if not np.all(np.isfinite(y)):
            raise NonConvergent("integrand produced non-finite values")
        return np.sum(w * y), float(np.sum(w * np.abs(y)))

    h = 1.0
    k = np.arange(-int(t_max), int(t_max) + 1, dtype=float)
    total, total_abs = level_sum(k * h)
    estimate = h * total
    err = math.inf
    for _ in range(spec.max_refinement_depth):
        h *= 0.5
        m = int(round(t_max / h))
        odd = np.arange(-m + 1, m, 2, dtype=float) * h
        s, s_abs = level_sum(odd)
        total = total + s
        total_abs += s_abs
        new = h * total
        err = abs(new - estimate)
        estimate = new
        # cancellation among large terms puts a floor under attainable accuracy
        floor = _ROUNDING_FLOOR * h * total_abs
        if err <= max(spec.tolerance(new), floor) and h <= 0.25:
            return estimate, err
    raise NonConvergent(
        f"tanh-sinh did not converge on [{a}, {b}] (error estimate {err:.3g})",
        value=estimate,
        err_estimate=err,
    )


def _gaussian_cutoff(f, a, direction, spec):
    """Distance from ``a`` past which |f| stays below the truncation threshold.

    The integrand is probed on geometrically growing segments.  Returns
    ``None`` when the decay is too slow for truncation to be safe (the
    caller then maps the infinite range onto a finite one instead).
    """
    threshold = spec.abs_tol / 1000.0
    edges = [0.0] + [2.0 ** k for k in range(0, 64)]
    peak = 0.0
    last_above = 0.0
    quiet = 0
    tail = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        s = np.linspace(lo, hi, 65)[1:]
        y = np.abs(f(a + direction * s))
        if not np.all(np.isfinite(y)):
            return None
        peak = max(peak, float(np.max(y)))
        thr = threshold if threshold > 0 else spec.rel_tol * peak / 1000.0
        above = np.nonzero(y >= thr)[0]
        if above.size:
            idx = min(above[-1] + 1, s.size - 1)
            last_above = float(s[idx])
            quiet = 0
            tail = 0.0
        else:
            quiet += 1
            # |f(s)| * s bounds the tail of anything decaying like 1/s^2 or faster
            tail = max(tail, float(np.max(y * s)))
            if quiet >= 3:
                if tail > 1000.0 * thr:
                    return None
                return max(last_above, 1.0)
    return None


def _rational_map(f, a, direction):
    """Integrand on [0, 1) equivalent to f over [a, inf) via x = a + t / (1 - t)."""

    def g(t):
        one_minus = 1.0 - t
        x = a + direction * t / one_minus
        return f(x) / (one_minus * one_minus)

    return g


def integrate(
    f: Callable,
    interval: tuple[float, float],
    spec: QuadratureSpec | None = None,
    points: Sequence[float] | None = None,
):
    """Integrate ``f`` over ``interval`` which may be semi- or fully infinite.

    ``f`` should accept a numpy array; scalar-only callables still work but are
    evaluated point by point.  Complex integrands are supported by the
    tanh-sinh rule.  ``points`` are interior break points (kinks) at which
    the finite range is split.

    Returns ``(value, err_estimate)``.  Raises :class:`NonConvergent` when the
    refinement depth is exhausted.
    """
    spec = spec or default_spec()
    a, b = map(float, interval)
    if a == b:
        return 0.0, 0.0
    if a > b:
        value, err = integrate(f, (b, a), spec, points)
        return -value, err
    g = _vectorize(f)

    if spec.rule == GAUSS_KRONROD:
        return _gauss_kronrod(g, a, b, spec, points)

    if math.isinf(a) and math.isinf(b):
        left, e1 = integrate(g, (-math.inf, 0.0), spec, points)
        right, e2 = integrate(g, (0.0, math.inf), spec, points)
        return left + right, e1 + e2
    if math.isinf(a) or math.isinf(b):
        anchor, direction = (a, 1.0) if math.isinf(b) else (b, -1.0)
        cutoff = _gaussian_cutoff(g, anchor, direction, spec)
        if cutoff is None:
            v, e = _tanh_sinh(_rational_map(g, anchor, direction), 0.0, 1.0, spec)
            return (complex(v) if np.iscomplexobj(v) and np.imag(v) != 0 else float(np.real(v))), float(e)
        if direction > 0:
            b = a + cutoff
        else:
            a = b - cutoff

    cuts = [a] + sorted(p for p in (points or ()) if a < p < b) + [b]
    value, err = 0.0, 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        v, e = _tanh_sinh(g, lo, hi, spec)
        value += v
        err += e
    if np.iscomplexobj(value) and np.imag(value) == 0:
        value = np.real(value)
    value = complex(value) if np.iscomplexobj(value) else float(value)
    return value, float(err)


def _gauss_kronrod(g, a, b, spec, points):
    limit = max(50, 10 * spec.max_refinement_depth)
    finite = not (math.isinf(a) or math.isinf(b))

    def run(fun):
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.integrate.IntegrationWarning)
            try:
                return scipy.integrate.quad(
                    lambda x: float(fun(np.array([x]))[0]),
                    a,
                    b,
                    epsabs=spec.abs_tol,
                    epsrel=spec.rel_tol,
                    limit=limit,
                    points=list(points) if (points and finite) else None,
                )
            except scipy.integrate.IntegrationWarning as exc:
                raise NonConvergent(f"adaptive Gauss-Kronrod failed: {exc}") from exc

    probe = g(np.array([0.5 * (a + b) if finite else a + 1.0 if not math.isinf(a) else 0.0]))
    if np.iscomplexobj(probe):
        re, e1 = run(lambda x: np.real(g(x)))
        im, e2 = run(lambda x: np.imag(g(x)))
        return complex(re, im), float(e1 + e2)
    value, err = run(g)
    return float(value), float(err)


def l2_norm_halfline(f, spec: QuadratureSpec | None = None, grid: Grid | None = None) -> float:
    """L2(R) norm of an odd function given on the half-line.

    ``f`` is either a callable (real or complex valued) or, together with
    ``grid``, an array of samples on ``grid`` (composite Simpson in that case).
    """
    if grid is not None:
        samples = np.abs(np.asarray(f)) ** 2
        if samples.shape != grid.points.shape:
            raise ValueError("samples do not match the grid")
        return math.sqrt(2.0 * scipy.integrate.simpson(samples, x=grid.points))
    g = _vectorize(f)
    # normalise by a probed peak so absolute tolerances act relative to |f|
    probe = np.abs(g(np.concatenate([np.linspace(0.0, 1.0, 33)[1:], np.geomspace(1.0, 1e3, 64)[1:]])))
    scale = float(np.max(probe[np.isfinite(probe)], initial=0.0))
    if scale == 0.0:
        scale = 1.0
    value, _ = integrate(lambda x: (np.abs(g(x)) / scale) ** 2, (0.0, math.inf), spec)
    return scale * math.sqrt(2.0 * max(value, 0.0))
