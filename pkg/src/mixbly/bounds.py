"""Closed-form eigenvalue bounds for Dirichlet problems on bounded domains.

All functions take the domain through :class:`DomainMeta` (dimension and
volume) and return plain floats in eigenvalue units.  The mixed operator
``-a Lap + b (-Lap)^s`` is described by :class:`OperatorSpec`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import ContractError, DomainError, NumericError, RegimeError
from .specfun import log_gamma, unit_ball_volume

__all__ = [
    "DomainMeta",
    "OperatorSpec",
    "weyl_asymptotic",
    "polya_bound",
    "berezin_riesz_upper",
    "liyau_classical",
    "liyau_fractional",
    "mixed_bly_lower",
    "per_eigenvalue_lower",
    "remark_a_special",
    "legendre_liyau_from_berezin",
]


@dataclass(frozen=True)
class DomainMeta:
    n: int
    volume: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not self.volume > 0:
            raise DomainError(f"volume must be positive, got {self.volume!r}")


@dataclass(frozen=True)
class OperatorSpec:
    """Coefficients of ``-a Lap + b (-Lap)^s`` in dimension ``n``.

    ``a = 0`` is accepted only together with ``b > 0`` (the purely
    fractional operator).
    """

    n: int
    a: float
    b: float
    s: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"s must lie in (0, 1), got {self.s!r}")
        if self.a < 0 or (self.a == 0 and not self.b > 0):
            raise RegimeError("need a > 0, or a = 0 with b > 0")

    def regime(self, c_e: Optional[float] = None) -> str:
        """Return ``"i"`` (b > 0), ``"local"`` (b = 0) or ``"ii"`` (-a/c_e < b < 0)."""
        if self.b > 0:
            return "i"
        if self.b == 0:
            return "local"
        if c_e is None:
            raise RegimeError("b < 0 requires an embedding constant c_e")
        if not c_e > 0:
            raise RegimeError(f"embedding constant must be positive, got {c_e!r}")
        if self.b <= -self.a / c_e:
            raise RegimeError(
                f"b = {self.b} <= -a/c_e = {-self.a / c_e}: operator is not positive definite"
            )
        return "ii"


def _check_k(k):
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    return int(k)


def _gamma_ratio(d: DomainMeta) -> float:
    """Gamma(1 + n/2) / |Omega|."""
    return math.exp(log_gamma(1.0 + 0.5 * d.n)) / d.volume


def weyl_asymptotic(k: int, d: DomainMeta) -> float:
    """Leading Weyl term 4 pi^2 k^{2/n} / (omega_n |Omega|)^{2/n}."""
    k = _check_k(k)
    n = d.n
    return 4.0 * math.pi ** 2 * (k / (unit_ball_volume(n) * d.volume)) ** (2.0 / n)


def polya_bound(k: int, d: DomainMeta) -> float:
    """Polya's conjectured lower bound 4 pi (Gamma(1 + n/2) k / |Omega|)^{2/n}."""
    k = _check_k(k)
    return 4.0 * math.pi * (_gamma_ratio(d) * k) ** (2.0 / d.n)


def berezin_riesz_upper(lambda_cap: float, sigma: float, d: DomainMeta, eigenvalues):
    """Riesz mean of order ``sigma`` and Berezin's upper bound for it.

    Returns ``(lhs, rhs)`` with ``lhs = sum (lambda_cap - lambda_j)_+^sigma``
    over the supplied eigenvalues.  The inequality ``lhs <= rhs`` is a theorem
    only for the Dirichlet Laplacian; callers decide when to assert it.
    """
    if not sigma >= 1:
        raise DomainError(f"sigma must be >= 1, got {sigma!r}")
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1:
        raise ContractError("eigenvalues must be a 1-D sequence")
    if np.any(np.diff(lam) < 0):
        raise ContractError("eigenvalues must be sorted ascending")
    lhs = float(np.sum(np.clip(lambda_cap - lam, 0.0, None) ** sigma))
    n = d.n
    log_c = log_gamma(sigma + 1.0) - 0.5 * n * math.log(4.0 * math.pi) - log_gamma(sigma + 0.5 * n + 1.0)
    rhs = float(math.exp(log_c) * d.volume * lambda_cap ** (0.5 * n + sigma)) if lambda_cap > 0 else 0.0
    return lhs, rhs


def liyau_classical(k: int, d: DomainMeta) -> float:
    """Li-Yau lower bound for the sum of the first k Dirichlet eigenvalues."""
    k = _check_k(k)
    n = d.n
    base = (2.0 * math.pi) ** n / (unit_ball_volume(n) * d.volume)
    return n / (n + 2.0) * base ** (2.0 / n) * k ** (1.0 + 2.0 / n)


def _liyau_classical_gamma_form(k, d):
    k = _check_k(k)
    n = d.n
    return 4.0 * math.pi * n / (n + 2.0) * _gamma_ratio(d) ** (2.0 / n) * k ** (1.0 + 2.0 / n)


def liyau_fractional(k: int, s: float, d: DomainMeta) -> float:
    """Fractional Berezin-Li-Yau lower bound for the sum of k eigenvalues."""
    k = _check_k(k)
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s!r}")
    n = d.n
    return (
        (4.0 * math.pi) ** s * n / (n + 2.0 * s)
        * _gamma_ratio(d) ** (2.0 * s / n)
        * k ** (1.0 + 2.0 * s / n)
    )


def mixed_bly_lower(k: int, op: OperatorSpec, d: DomainMeta, c_e: Optional[float] = None) -> float:
    """Lower bound for the sum of the first k eigenvalues of the mixed operator.

    For ``b >= 0`` this is ``max(a * LY_classical, b * LY_fractional)``.  For
    ``-a/c_e < b < 0`` both branches are damped by ``a + c_e * b`` and the
    fractional branch is divided by ``c_e``.

    The embedding constant only needs to be positive here; whether it exceeds
    one depends on how the nonlocal form is normalised.
    """
    k = _check_k(k)
    if op.n != d.n:
        raise ContractError(f"operator dimension {op.n} != domain dimension {d.n}")
    regime = op.regime(c_e)
    local = liyau_classical(k, d)
    nonlocal_ = liyau_fractional(k, op.s, d)
    if regime in ("i", "local"):
        return max(op.a * local, op.b * nonlocal_)
    return (op.a + c_e * op.b) * max(local, nonlocal_ / c_e)


def per_eigenvalue_lower(k: int, op: OperatorSpec, d: DomainMeta, c_e: Optional[float] = None) -> float:
    """Single-eigenvalue bound obtained from the sum bound by monotonicity."""
    return mixed_bly_lower(k, op, d, c_e) / _check_k(k)


class PlanarBound(NamedTuple):
    relaxed: float
    sharp: float


def remark_a_special(volume: float, s: float) -> PlanarBound:
    """First-eigenvalue bound in the plane for a = b = 1.

    ``relaxed`` is 2 pi |Omega|^{-1} for |Omega| <= 1 and 2 pi |Omega|^{-s}
    otherwise; ``sharp`` is the value before relaxation.
    """
    if not volume > 0:
        raise DomainError("volume must be positive")
    if not 0.0 < s < 1.0:
        raise DomainError(f"s must lie in (0, 1), got {s!r}")
    relaxed = 2.0 * math.pi * (1.0 / volume if volume <= 1.0 else volume ** (-s))
    sharp = 2.0 * max(math.pi / volume, (4.0 * math.pi) ** s / (2.0 + 2.0 * s) * volume ** (-s))
    return PlanarBound(relaxed, sharp)


def legendre_liyau_from_berezin(k: int, d: DomainMeta) -> float:
    """Li-Yau bound recovered as sup_L [k L - Berezin(L)] with sigma = 1.

    The objective is strictly concave in L, so its derivative is bisected.
    """
    k = _check_k(k)
    n = d.n
    _, coeff = berezin_riesz_upper(1.0, 1.0, d, [])
    power = 0.5 * n + 1.0

    def slope(lam):
        return k - coeff * power * lam ** (0.5 * n)

    lo, hi = 0.0, 1.0
    for _ in range(2000):
        if slope(hi) < 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericError("could not bracket the Legendre maximiser")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if slope(mid) > 0:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    return k * lam - coeff * lam ** power
