"""Gamma-function helpers and the constants consumed by the bound formulas.

The kernel constant ``c_{n,s}`` of the fractional Laplacian is obtained from
its integral definition,

    c_{n,s} = ( int_{R^n} (1 - cos z_1) / |z|^{n+2s} dz )^{-1},

by splitting the integral into a radial factor and an angular factor and
integrating each adaptively.  The Gamma closed form is kept separately as an
independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DomainError

__all__ = [
    "KernelConstant",
    "log_gamma",
    "gamma",
    "unit_ball_volume",
    "unit_sphere_area",
    "normalization_constant",
    "normalization_constant_closed_form",
]

_QUAD_RTOL = 1e-8


def _check_dim(n):
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def _check_order(s):
    if not 0.0 < s < 1.0:
        raise DomainError(f"fractional order must lie in (0, 1), got {s!r}")
    return float(s)


def log_gamma(x: float) -> float:
    """Natural logarithm of Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def gamma(x: float) -> float:
    """Gamma(x) for x > 0, routed through :func:`log_gamma`."""
    return math.exp(log_gamma(x))


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n, pi^{n/2} / Gamma(1 + n/2)."""
    n = _check_dim(n)
    return math.exp(0.5 * n * math.log(math.pi) - log_gamma(1.0 + 0.5 * n))


def unit_sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1}, 2 pi^{n/2} / Gamma(n/2)."""
    n = _check_dim(n)
    return 2.0 * math.exp(0.5 * n * math.log(math.pi) - log_gamma(0.5 * n))


@dataclass(frozen=True)
class KernelConstant:
    n: int
    s: float
    value: float
    quadrature_error_estimate: float


def _radial_factor(s):
    """int_0^inf (1 - cos u) u^{-1-2s} du and its absolute error estimate."""
    # Near zero (1 - cos u)/u^2 is smooth; the u^{1-2s} factor goes to the
    # algebraic weight so the endpoint behaviour is integrated exactly.
    def head(u):
        return 0.5 * np.sinc(u / (2.0 * np.pi)) ** 2

    v0, e0 = integrate.quad(head, 0.0, 1.0, weight="alg", wvar=(1.0 - 2.0 * s, 0.0),
                            epsabs=0.0, epsrel=1e-13, limit=200)
    # Tail: int_1^inf u^{-1-2s} du is 1/(2s); the cosine part is a Fourier integral.
    v1, e1 = integrate.quad(lambda u: u ** (-1.0 - 2.0 * s), 1.0, np.inf,
                            weight="cos", wvar=1.0, epsabs=1e-12, limlst=100)
    return v0 + 1.0 / (2.0 * s) - v1, e0 + e1


def _angular_factor(n, s):
    """int_{S^{n-1}} |theta_1|^{2s} dtheta and its absolute error estimate."""
    if n == 1:
        return 2.0, 0.0
    # theta_1 = cos(phi); fold to [0, pi/2] and give the (pi/2 - phi)^{2s}
    # zero of cos^{2s} to the algebraic weight.
    def f(phi):
        gap = 0.5 * np.pi - phi
        return np.sinc(gap / np.pi) ** (2.0 * s) * np.sin(phi) ** (n - 2)

    v, e = integrate.quad(f, 0.0, 0.5 * np.pi, weight="alg", wvar=(0.0, 2.0 * s),
                          epsabs=0.0, epsrel=1e-13, limit=200)
    scale = 2.0 * unit_sphere_area(n - 1)
    return scale * v, scale * e


@lru_cache(maxsize=256)
def _normalization_constant(n, s):
    radial, radial_err = _radial_factor(s)
    angular, angular_err = _angular_factor(n, s)
    integral = radial * angular
    integral_err = radial_err * angular + angular_err * radial
    rel = integral_err / integral
    if not rel <= _QUAD_RTOL:
        raise AccuracyError(
            f"c_(n={n}, s={s}) quadrature reached only {rel:.2e} relative error",
            estimate=rel,
        )
    value = 1.0 / integral
    # relative error of a reciprocal equals that of the integral
    return KernelConstant(n=n, s=s, value=value, quadrature_error_estimate=value * rel)


def normalization_constant(n: int, s: float) -> KernelConstant:
    """Kernel constant ``c_{n,s}`` of the fractional Laplacian, by quadrature.

    Raises
    ------
    DomainError
        If ``s`` is outside (0, 1) or ``n`` is not a positive integer.
    AccuracyError
        If the quadrature error estimate exceeds 1e-8 relative.
    """
    return _normalization_constant(_check_dim(n), _check_order(s))


def normalization_constant_closed_form(n: int, s: float) -> float:
    """4^s Gamma(n/2 + s) / (pi^{n/2} |Gamma(-s)|); cross-check only."""
    n = _check_dim(n)
    s = _check_order(s)
    return 4.0 ** s * math.gamma(0.5 * n + s) / (math.pi ** (0.5 * n) * abs(math.gamma(-s)))
