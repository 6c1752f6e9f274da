"""
Constructive approximate reachability with staircase controls.

The staircase ``u_l^n`` (height ``(-1)^(n-j) C(n, j) l^(n+1)`` on
``(j/l, (j+1)/l)``) is a finite-difference stand-in for the n-th derivative
of a Dirac pulse at ``t = 0``.  Its image on the Fourier side is
``sqrt(2/pi) i phi_n^l`` with::

    phi_n(sigma)   = sigma^(2n+1) exp(-T sigma^2)
    phi_n^l(sigma) = phi_n(sigma) ((exp(sigma^2/l) - 1) / (sigma^2/l))^(n+1)

Since every ``psi_hat_T(n)`` is ``i sum_p h_p^n phi_p``, a truncated
expansion ``sum omega_n psi_T(n)`` is approached by the control
``u_N = -sqrt(pi/2) sum_p g_p u_(l_p)^p`` with ``g_p = sum_(n>=p) omega_n h_p^n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controls import StepControl, superpose
from .errors import DegreeTooLarge, SupportExceedsHorizon
from .heat_solver import SpectralProfile, control_term_sigma
from .hermite_basis import MAX_INDEX, HermiteExpansion
from .numerics import Grid, QuadratureSpec, integrate

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

# (N, l) rows of the reference error table at T = 1
TABLE_ROWS = ((1, 10), (1, 100), (2, 100), (2, 1000))


def step_control(n, l, T) -> StepControl:
    """The staircase ``u_l^n`` on ``[0, T]``."""
    if n < 0 or l < 1:
        raise ValueError("need n >= 0 and l >= 1")
    if (n + 1) / l > T * (1 + 1e-15):
        raise SupportExceedsHorizon(f"support (n+1)/l = {(n + 1) / l} exceeds T = {T}")
    bp = [j / l for j in range(n + 2)]
    levels = [(-1) ** (n - j) * math.comb(n, j) * float(l) ** (n + 1) for j in range(n + 1)]
    if bp[-1] < T:
        bp.append(T)
        levels.append(0.0)
    else:
        bp[-1] = T
    return StepControl(bp, levels, T)


def h_coeff(p, n, T):
    """``(-1)^(p+1) 2^(2p+1) (2T)^(p+1) (2n+1)! / ((n-p)! (2p+1)!)``."""
    if not 0 <= p <= n:
        raise ValueError("need 0 <= p <= n")
    if n > MAX_INDEX:
        raise DegreeTooLarge(f"n={n} exceeds {MAX_INDEX}")
    if n > 8:
        log_mag = (
            (2 * p + 1) * math.log(2.0)
            + (p + 1) * math.log(2.0 * T)
            + math.lgamma(2 * n + 2)
            - math.lgamma(n - p + 1)
            - math.lgamma(2 * p + 2)
        )
        return (-1) ** (p + 1) * math.exp(log_mag)
    return (
        (-1) ** (p + 1)
        * 2 ** (2 * p + 1)
        * (2 * T) ** (p + 1)
        * math.factorial(2 * n + 1)
        / (math.factorial(n - p) * math.factorial(2 * p + 1))
    )


def _log_sinhc(w):
    """``log(sinh(w) / w)`` for ``w >= 0`` without cancellation or overflow."""
    w = np.asarray(w, dtype=float)
    out = np.empty(w.shape)
    small = w < 1e-2
    ws = w[small] ** 2
    out[small] = ws / 6.0 - ws * ws / 180.0 + ws ** 3 / 2835.0
    mid = (~small) & (w < 20.0)
    out[mid] = np.log(np.sinh(w[mid]) / w[mid])
    big = w >= 20.0
    wb = w[big]
    out[big] = wb + np.log1p(-np.exp(-2.0 * wb)) - np.log(2.0 * wb)
    return out


def _log_relative_factor(sigma, l, n):
    """``(n+1) log((exp(z) - 1) / z)`` with ``z = sigma^2 / l``."""
    z = np.asarray(sigma, dtype=float) ** 2 / l
    return (n + 1) * (0.5 * z + _log_sinhc(0.5 * z))


def phi(n, sigma, T):
    """``sigma^(2n+1) exp(-T sigma^2)``."""
    sigma = np.asarray(sigma, dtype=float)
    out = sigma ** (2 * n + 1) * np.exp(-T * sigma * sigma)
    return out if out.ndim else float(out)


def phi_l(n, l, sigma, T):
    """``phi(n) ((exp(sigma^2/l) - 1) / (sigma^2/l))^(n+1)``, evaluated in log space."""
    sigma = np.asarray(sigma, dtype=float)
    log_factor = _log_relative_factor(sigma, l, n)
    out = sigma ** (2 * n + 1) * np.exp(-T * sigma * sigma + log_factor)
    return out if out.ndim else float(out)


def phi_l_minus_phi(n, l, sigma, T):
    """``phi_l - phi`` computed without subtracting nearly equal numbers."""
    sigma = np.asarray(sigma, dtype=float)
    log_factor = _log_relative_factor(sigma, l, n)
    decay = -T * sigma * sigma
    with np.errstate(over="ignore"):
        # expm1 where the factor is near 1, merged exponents where it is large
        rel = np.where(log_factor < 1.0, np.exp(decay) * np.expm1(np.minimum(log_factor, 1.0)),
                       np.exp(decay + log_factor) - np.exp(decay))
    out = sigma ** (2 * n + 1) * rel
    return out if out.ndim else float(out)


def phi_profile(n, T):
    return SpectralProfile("phi", lambda s: phi(n, s, T), n=n, T=T)


def phi_l_profile(n, l, T):
    return SpectralProfile("phi_l", lambda s: phi_l(n, l, s, T), n=n, l=l, T=T)


def phi_distance(n, l, T, spec: QuadratureSpec | None = None):
    """``||phi_n - phi_n^l||`` over the real line, by quadrature."""
    value, _ = integrate(lambda s: phi_l_minus_phi(n, l, s, T) ** 2, (0.0, math.inf), spec)
    return math.sqrt(2.0 * value)


def phi_distance_bound(p, l, T):
    """``(1/(2 pi T))^(1/4) sqrt(p+2)/l 2^(p+1/2) / T^(p+3/2) (p+2)!``, valid for (p+1)/l < T/4."""
    return (
        (1.0 / (2.0 * math.pi * T)) ** 0.25
        * math.sqrt(p + 2)
        / l
        * 2 ** (p + 0.5)
        / T ** (p + 1.5)
        * math.factorial(p + 2)
    )


def envelope_condition(n, l, T):
    """``l > (2n + 2) / T``, under which ``|phi_n^l| <= sigma^(2n+1) exp(-T sigma^2 / 2)``."""
    return l > (2 * n + 2) / T


def resolution_suffices(p, l, N, eps, target_norm, T, spec=None):
    """Whether ``l`` is fine enough for index ``p`` in an ``eps``-accurate synthesis.

    Sufficient condition from the convergence argument::

        ||phi_p - phi_p^l|| < (pi^3 / (T e^2))^(1/4) eps
                              / (||V_T|| sqrt(N+2) cosh(2 sqrt(2T(N+2))))
    """
    threshold = (
        (math.pi ** 3 / (T * math.e ** 2)) ** 0.25
        * eps
        / (target_norm * math.sqrt(N + 2) * math.cosh(2.0 * math.sqrt(2.0 * T * (N + 2))))
    )
    return phi_distance(p, l, T, spec) < threshold


@dataclass(frozen=True)
class SynthesisPlan:
    """Resolution per index and the combined weights ``g_p`` of a synthesis."""

    N: int
    l_per_p: tuple
    T: float
    g: tuple

    def profile(self):
        """``V_N^l = i sum_p g_p phi_p^l``, the Fourier image the control produces."""
        return SpectralProfile(
            "synthesized",
            lambda s: 1j * sum(gp * phi_l(p, l, s, self.T) for p, (gp, l) in enumerate(zip(self.g, self.l_per_p))),
            plan=self,
        )

    def ideal_profile(self):
        """``V_N = i sum_p g_p phi_p``, the limit as every ``l_p`` grows."""
        return SpectralProfile(
            "truncated", lambda s: 1j * sum(gp * phi(p, s, self.T) for p, gp in enumerate(self.g)), plan=self
        )


def g_coefficients(expansion: HermiteExpansion):
    """``g_p = sum_(n=p..N) omega_n h_p^n`` for p = 0..N."""
    N, T = expansion.N, expansion.T
    return tuple(sum(expansion.coeffs[n] * h_coeff(p, n, T) for n in range(p, N + 1)) for p in range(N + 1))


def synthesize(expansion: HermiteExpansion, l_per_p):
    """Build the approximating control for a truncated expansion.

    ``l_per_p`` is one resolution per index ``p = 0..N`` or a single integer
    broadcast to all.  Returns ``(plan, u_N)`` with ``u_N`` merged onto the
    common breakpoint refinement.
    """
    N, T = expansion.N, expansion.T
    if np.isscalar(l_per_p):
        l_per_p = [int(l_per_p)] * (N + 1)
    l_per_p = tuple(int(l) for l in l_per_p)
    if len(l_per_p) != N + 1:
        raise ValueError(f"need {N + 1} resolutions, got {len(l_per_p)}")
    g = g_coefficients(expansion)
    parts = [step_control(p, l, T) for p, l in enumerate(l_per_p)]
    weights = [-math.sqrt(math.pi / 2.0) * gp for gp in g]
    u = superpose(parts, weights)
    return SynthesisPlan(N, l_per_p, T, g), u


def step_control_image(n, l, T, sigma):
    """Fourier image of ``Phi_T u_l^n``: minus the end-state image of ``u_l^n`` from rest."""
    return -control_term_sigma(step_control(n, l, T), sigma)


def verify_identity_phi(n, l, T, sigma_grid):
    """Max deviation between the image of ``u_l^n`` and ``sqrt(2/pi) i phi_n^l`` on a grid."""
    s = sigma_grid.points if isinstance(sigma_grid, Grid) else np.asarray(sigma_grid, dtype=float)
    lhs = step_control_image(n, l, T, s)
    rhs = SQRT_2_OVER_PI * 1j * phi_l(n, l, s, T)
    return float(np.max(np.abs(lhs - rhs)))


def epsilon_bounds(N, l, T=1.0):
    """Truncation and discretisation bounds ``(eps1, eps2)`` for the sine-Gaussian target.

    ``eps1 = sqrt(8) (2T/pi)^(1/4) sqrt(cosh(1/2) / (2^(2N+3) (2N+3)!))`` bounds the
    Hermite truncation; ``eps2 = 2^(11/4) (T^3 pi^3 e)^(-1/4) / l
    sum_p 2^(2p) sqrt(p+2) (p+2)! / (2p+1)!`` bounds replacing ``phi_p`` by ``phi_p^l``.
    """
    if N < 0 or l < 1:
        raise ValueError("need N >= 0 and l >= 1")
    if N > MAX_INDEX:
        raise DegreeTooLarge(f"N={N} exceeds {MAX_INDEX}")
    log_den = (2 * N + 3) * math.log(2.0) + math.lgamma(2 * N + 4)
    eps1 = math.sqrt(8.0) * (2.0 * T / math.pi) ** 0.25 * math.sqrt(math.cosh(0.5) * math.exp(-log_den))
    total = sum(4.0 ** p * math.sqrt(p + 2) * math.factorial(p + 2) / math.factorial(2 * p + 1) for p in range(N + 1))
    eps2 = 2 ** 2.75 * (1.0 / (T ** 3 * math.pi ** 3 * math.e)) ** 0.25 / l * total
    return eps1, eps2


def g_bound(p, T):
    """``2 sqrt(2/pi) (2T)^(p+1) / (2p+1)! e^(-1/4)``: the limit of ``|g_p^N|`` as N grows for the sine-Gaussian target.

    For finite ``N`` the magnitude carries the partial sum
    ``sum_(k=0..N-p) (-1/4)^k / k!`` instead of ``e^(-1/4)``.  Those partial
    sums alternate around the limit, so the bound holds exactly when ``N - p``
    is odd; see :func:`g_magnitude`.
    """
    return 2.0 * SQRT_2_OVER_PI * (2.0 * T) ** (p + 1) / math.factorial(2 * p + 1) * math.exp(-0.25)


def g_magnitude(p, N, T):
    """``|g_p^N|`` for the sine-Gaussian target in closed form."""
    partial = sum((-0.25) ** k / math.factorial(k) for k in range(N - p + 1))
    return 2.0 * SQRT_2_OVER_PI * (2.0 * T) ** (p + 1) / math.factorial(2 * p + 1) * abs(partial)
