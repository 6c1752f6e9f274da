"""
Odd Hermite-function basis scaled to a time horizon.

For a horizon ``T`` the basis functions are::

    psi_T(n, x) = psi(2n + 1, x / sqrt(2T)),   psi(k, x) = H_k(x) exp(-x^2 / 2)

with ``H_k`` the physicists' Hermite polynomials.  They are mutually
orthogonal on the real line, and their (unitary, ``exp(-i sigma x)``)
Fourier images are available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeTooLarge
from .numerics import QuadratureSpec, integrate

MAX_DEGREE = 200
MAX_INDEX = 12


def _check_degree(n):
    if n < 0:
        raise ValueError("Hermite degree must be non-negative")
    if n > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {n} exceeds the recurrence cap {MAX_DEGREE}")


def _check_index(n):
    if n < 0:
        raise ValueError("basis index must be non-negative")
    if n > MAX_INDEX:
        raise DegreeTooLarge(f"basis index {n} exceeds the double-precision cap {MAX_INDEX}")


def hermite_poly(n, x):
    """Physicists' Hermite polynomial by the three-term recurrence."""
    _check_degree(n)
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def hermite_poly_sum(n, x):
    """Explicit factorial-sum form of ``H_n``; used as a cross-check for small n."""
    _check_degree(n)
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for m in range(n // 2 + 1):
        total = total + (-1) ** m / (math.factorial(m) * math.factorial(n - 2 * m)) * (2 * x) ** (n - 2 * m)
    total = math.factorial(n) * total
    return total if total.ndim else float(total)


def psi(n, x):
    """Hermite function ``H_n(x) exp(-x^2/2)``."""
    x = np.asarray(x, dtype=float)
    return hermite_poly(n, x) * np.exp(-0.5 * x * x)


def psi_T(n, x, T):
    """Odd basis element ``psi_{2n+1}(x / sqrt(2T))``."""
    if T <= 0:
        raise ValueError("horizon T must be positive")
    _check_degree(2 * n + 1)
    return psi(2 * n + 1, np.asarray(x, dtype=float) / math.sqrt(2.0 * T))


def psi_hat_T(n, sigma, T):
    """Fourier image of :func:`psi_T`: ``(-1)^(n+1) i sqrt(2T) psi_{2n+1}(sqrt(2T) sigma)``."""
    if T <= 0:
        raise ValueError("horizon T must be positive")
    _check_degree(2 * n + 1)
    s = math.sqrt(2.0 * T)
    return (-1) ** (n + 1) * 1j * s * psi(2 * n + 1, s * np.asarray(sigma, dtype=float))


def log_gram_diagonal(n, T):
    """log of ``sqrt(2 pi T) 2^(2n+1) (2n+1)!``."""
    return 0.5 * math.log(2.0 * math.pi * T) + (2 * n + 1) * math.log(2.0) + math.lgamma(2 * n + 2)


def gram_diagonal(n, T):
    """Squared norm of ``psi_T(n, ., T)`` over the real line."""
    if n > 8:
        return math.exp(log_gram_diagonal(n, T))
    return math.sqrt(2.0 * math.pi * T) * 2 ** (2 * n + 1) * math.factorial(2 * n + 1)


def basis_gram(n, m, T, spec: QuadratureSpec | None = None):
    """Inner product of two basis elements over the real line, by quadrature."""
    _check_index(n)
    _check_index(m)
    # the product of two odd functions is even: integrate the half-line and double
    value, _ = integrate(lambda x: psi_T(n, x, T) * psi_T(m, x, T), (0.0, math.inf), spec)
    return 2.0 * value


@dataclass(frozen=True)
class HermiteExpansion:
    """Coefficients ``omegas[n]`` of a target in the basis ``psi_T(n, ., T)``."""

    T: float
    coeffs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("horizon T must be positive")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if len(self.coeffs) == 0:
            raise ValueError("an expansion needs at least one coefficient")
        _check_index(self.N)

    @property
    def N(self):
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return sum(c * psi_T(n, x, self.T) for n, c in enumerate(self.coeffs))

    def fourier(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        return sum(c * psi_hat_T(n, sigma, self.T) for n, c in enumerate(self.coeffs))


def expand_target(W_T, N, T, spec: QuadratureSpec | None = None) -> HermiteExpansion:
    """Project an odd target onto the first ``N + 1`` basis elements.

    ``W_T`` is any callable odd function of ``x`` (an ``OddState`` or a plain
    function).  Inner products are taken by half-line quadrature.
    """
    _check_index(N)
    coeffs = []
    for n in range(N + 1):
        inner, _ = integrate(lambda x: W_T(x) * psi_T(n, x, T), (0.0, math.inf), spec)
        coeffs.append(2.0 * inner / gram_diagonal(n, T))
    return HermiteExpansion(T, coeffs)


def tail_energy(expansion: HermiteExpansion, start=0):
    """``sqrt(2 pi T) sum_{n >= start} |omega_n|^2 2^(2n+1) (2n+1)!`` over stored terms."""
    if start < 0 or start > expansion.N + 1:
        raise ValueError("start index out of range")
    total = 0.0
    for n in range(start, expansion.N + 1):
        c = expansion.coeffs[n]
        total += c * c * gram_diagonal(n, expansion.T)
    return total
