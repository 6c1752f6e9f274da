"""
Power-moment formulation of exact reachability from rest.

A target ``W_T`` is reachable from zero with ``|v| <= L`` exactly when some
such ``v`` on ``[0, T]`` has the power moments::

    int_0^T s^n v(s) ds = omega_n = n! / (2n+1)! int_0^inf x^(2n+1) W_T(x) dx

for all n.  Truncating at ``N = 2P - 1`` and looking for a bang-bang
``v in {0, L}`` with ``P`` "on" intervals gives a square nonlinear system in the
switching points, solved here by damped Newton.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .controls import StepControl
from .errors import DegreeTooLarge, InfeasibleOrdering, NoConvergence, NonConvergent
from .hermite_basis import hermite_poly
from .numerics import QuadratureSpec, integrate

MU_MAX_INDEX = 10


@dataclass(frozen=True)
class MomentVector:
    """Power moments ``omegas[n]`` for n = 0..N with horizon ``T`` and bound ``L``."""

    T: float
    L: float
    omegas: np.ndarray = field(default_factory=lambda: np.zeros(1))

    def __post_init__(self):
        if not self.T > 0 or not self.L > 0:
            raise ValueError("T and L must be positive")
        om = np.array(self.omegas, dtype=float)
        if om.ndim != 1 or om.size == 0:
            raise ValueError("need at least one moment")
        om.setflags(write=False)
        object.__setattr__(self, "omegas", om)

    @property
    def N(self):
        return self.omegas.size - 1

    def trivial_bounds(self):
        """``L T^(n+1) / (n+1)``, the largest moment any ``|v| <= L`` can produce."""
        n = np.arange(self.N + 1)
        return self.L * self.T ** (n + 1) / (n + 1)

    def satisfies_trivial_bound(self, rtol=1e-12):
        return bool(np.all(np.abs(self.omegas) <= self.trivial_bounds() * (1 + rtol)))

    def truncated(self, N):
        return MomentVector(self.T, self.L, self.omegas[: N + 1])


def moments_of_target(W_T, N, T, L=1.0, spec: QuadratureSpec | None = None) -> MomentVector:
    """Moments of an odd target by half-line quadrature."""
    omegas = []
    for n in range(N + 1):
        value, _ = integrate(lambda x: x ** (2 * n + 1) * W_T(x), (0.0, math.inf), spec)
        omegas.append(math.exp(math.lgamma(n + 1) - math.lgamma(2 * n + 2)) * value)
    return MomentVector(T, L, omegas)


def moments_of_control(v: StepControl, N, L=None) -> MomentVector:
    """Exact moments ``int_0^T s^n v(s) ds`` of a step control."""
    omegas = np.zeros(N + 1)
    for a, b, c in v.pieces():
        for n in range(N + 1):
            omegas[n] += c * (b ** (n + 1) - a ** (n + 1)) / (n + 1)
    bound = L if L is not None else max(v.linf_norm, np.finfo(float).tiny)
    return MomentVector(v.T, bound, omegas)


# -- necessary condition --------------------------------------------------------

@dataclass(frozen=True)
class NecessaryCondition:
    lhs: float
    rhs: float
    satisfied: bool


def necessary_bound(T, L, T_star):
    """``L sqrt(T*/pi) ln((sqrt(T*) + sqrt(T)) / (sqrt(T*) - sqrt(T)))``."""
    if not T_star > T:
        raise ValueError("T_star must exceed T")
    rs, rt = math.sqrt(T_star), math.sqrt(T)
    return L * math.sqrt(T_star / math.pi) * math.log((rs + rt) / (rs - rt))


def necessary_condition(W_T, T, L, T_star, spec: QuadratureSpec | None = None, tol=1e-10):
    """Check ``int_0^inf exp(x^2 / 4T*) |W_T| dx <= necessary_bound(T, L, T*)``.

    If the weighted integral diverges and the integrand is seen to grow
    monotonically, ``lhs`` is reported as infinite and the condition fails.
    """
    rhs = necessary_bound(T, L, T_star)

    def weighted(x):
        w = np.abs(W_T(x))
        with np.errstate(over="ignore", invalid="ignore"):
            # an underflowed target must not meet an overflowed weight
            return np.where(w == 0.0, 0.0, w * np.exp(x * x / (4.0 * T_star)))

    try:
        lhs, _ = integrate(weighted, (0.0, math.inf), spec)
    except NonConvergent:
        probe = weighted(np.geomspace(1.0, 1e3, 200))
        finite = probe[np.isfinite(probe)]
        tail = finite[-50:]
        if tail.size >= 10 and np.all(np.diff(tail) >= 0):
            return NecessaryCondition(math.inf, rhs, False)
        raise
    return NecessaryCondition(lhs, rhs, lhs <= rhs + tol)


# -- bang-bang solver -------------------------------------------------------------

@dataclass(frozen=True)
class BangBangSolution:
    """Switching points ``0 <= nu_1 <= ... <= nu_2P <= T`` of a {0, L} control.

    The control equals ``L`` on each ``[nu_(2p-1), nu_2p]`` and 0 elsewhere.
    ``residuals`` are the achieved moment errors.
    """

    nu: np.ndarray
    T: float
    L: float
    residuals: np.ndarray
    iterations: int = 0

    @property
    def P(self):
        return self.nu.size // 2

    @property
    def residual_inf(self):
        return float(np.max(np.abs(self.residuals)))

    def control(self) -> StepControl:
        """The solved ``v`` (reversed time, as in the moment equations)."""
        pieces = [(self.nu[2 * p], self.nu[2 * p + 1], self.L) for p in range(self.P)]
        return StepControl.from_pieces(pieces, self.T)

    def boundary_control(self) -> StepControl:
        """``u(t) = v(T - t)``, the control to apply at the boundary."""
        return self.control().reverse()


def _moment_map(nu, n_eq):
    """Scaled moments of the {0, 1} control on [0, 1] with switching points ``nu``."""
    powers = np.arange(1, n_eq + 1)
    on, off = nu[0::2], nu[1::2]
    return ((off[None, :] ** powers[:, None] - on[None, :] ** powers[:, None]).sum(axis=1)) / powers


def _jacobian(nu, n_eq):
    n = np.arange(n_eq)[:, None]
    J = nu[None, :] ** n
    J[:, 0::2] *= -1.0
    return J


def _project(nu):
    return np.sort(np.clip(nu, 0.0, 1.0))


def _starting_points(P, n_starts, seed):
    k = 2 * P
    starts = []
    cheb = 0.5 * (1.0 - np.cos((2 * np.arange(1, k + 1) - 1) * math.pi / (2 * k)))
    starts.append(cheb)
    lob = 0.5 * (1.0 - np.cos(np.arange(1, k + 1) * math.pi / (k + 1)))
    starts.append(lob)
    starts.append(np.arange(1, k + 1) / (k + 1))
    rng = np.random.default_rng(seed)
    while len(starts) < n_starts:
        starts.append(np.sort(rng.uniform(0.0, 1.0, k)))
    return starts


def _newton(target, nu, tol, max_iter):
    n_eq = target.size
    nu = _project(nu)
    res = _moment_map(nu, n_eq) - target
    norm = np.linalg.norm(res)
    clipped = False
    for it in range(1, max_iter + 1):
        if np.max(np.abs(res)) <= tol:
            return nu, res, it - 1, clipped
        J = _jacobian(nu, n_eq)
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -res, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        alpha = 1.0
        while alpha > 1e-10:
            trial_raw = nu + alpha * step
            trial = _project(trial_raw)
            trial_res = _moment_map(trial, n_eq) - target
            trial_norm = np.linalg.norm(trial_res)
            if trial_norm < (1.0 - 1e-4 * alpha) * norm:
                clipped = bool(np.any(trial != trial_raw))
                break
            alpha *= 0.5
        else:
            break
        nu, res, norm = trial, trial_res, trial_norm
    return nu, res, max_iter, clipped


def solve_bang_bang(target: MomentVector, P, init=None, tol=1e-10, max_iter=100, n_starts=64, seed=0):
    """Switching points of a {0, L} control matching ``2P`` moments.

    ``target`` must hold exactly ``2P`` moments (``N = 2P - 1``).  Damped
    Newton runs from ``init`` (if given) and then from Chebyshev, Lobatto,
    uniform and seeded random starts until the moment residual drops below
    ``tol``.  Coinciding switching points are kept; :meth:`BangBangSolution.control`
    drops the empty intervals they produce.
    """
    if P < 1:
        raise ValueError("P must be at least 1")
    if target.N + 1 != 2 * P:
        raise ValueError(f"{2 * P} moments are needed for P={P}, got {target.N + 1}")
    T, L = target.T, target.L
    n = np.arange(2 * P)
    scale = L * T ** (n + 1)
    scaled = target.omegas / scale
    scaled_tol = tol / np.max(scale) * 1e-2

    starts = _starting_points(P, n_starts, seed)
    if init is not None:
        init = np.asarray(init, dtype=float)
        if init.size != 2 * P:
            raise ValueError("init must hold 2P switching points")
        starts.insert(0, init / T)

    best = None
    for start in starts:
        nu, res, iters, clipped = _newton(scaled, start, scaled_tol, max_iter)
        residuals = res * scale
        candidate = BangBangSolution(nu * T, T, L, residuals, iters)
        if best is None or candidate.residual_inf < best[0].residual_inf:
            best = (candidate, clipped)
        if candidate.residual_inf <= tol:
            return candidate
    solution, clipped = best
    if clipped:
        raise InfeasibleOrdering(
            f"Newton iterates stayed on the simplex boundary (residual {solution.residual_inf:.3g})", best=solution
        )
    raise NoConvergence(f"no start reached residual {tol:g} (best {solution.residual_inf:.3g})", best=solution)


# -- mu_m cross-check -------------------------------------------------------------

def mu_closed_form(m, xi, T_star):
    """``(-1)^m (2m+1)!/m! 2 sqrt(2) T* / (T* - xi)^(3/2) ((T* + xi)/(T* - xi))^m``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m > MU_MAX_INDEX:
        raise DegreeTooLarge(f"m={m} exceeds {MU_MAX_INDEX}")
    if not 0 <= xi < T_star:
        raise ValueError("need 0 <= xi < T_star")
    d = T_star - xi
    return (-1) ** m * math.factorial(2 * m + 1) / math.factorial(m) * 2.0 * math.sqrt(2.0) * T_star / d ** 1.5 * (
        (T_star + xi) / d
    ) ** m


def mu_quadrature(m, xi, T_star, spec: QuadratureSpec | None = None):
    """``2 i sqrt(2/pi) int_0^inf sigma exp(xi sigma^2) psi_hat_T(m, sigma, T*) d sigma`` by quadrature."""
    if m > MU_MAX_INDEX:
        raise DegreeTooLarge(f"m={m} exceeds {MU_MAX_INDEX}")
    if not 0 <= xi < T_star:
        raise ValueError("need 0 <= xi < T_star")

    r = math.sqrt(2.0 * T_star)

    def integrand(s):
        # psi_hat_T = i (-1)^(m+1) r H_(2m+1)(r s) exp(-T* s^2); merge the exponentials
        return (-1) ** (m + 1) * r * s * hermite_poly(2 * m + 1, r * s) * np.exp(-(T_star - xi) * s * s)

    value, _ = integrate(integrand, (0.0, math.inf), spec)
    return -2.0 * math.sqrt(2.0 / math.pi) * value
