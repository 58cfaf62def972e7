"""Uniform 1-D grids and the discrete local, fractional and mixed operators.

Grid functions are nodal values at the interior nodes of a uniform grid on
``(x_lo, x_hi)``; they stand for the continuous piecewise-linear interpolant
that vanishes at both endpoints and is extended by zero outside the interval.

Both discrete operators are stiffness matrices of that interpolation space
divided by ``h``.  For the Laplacian this is the usual 3-point stencil.  For
the fractional Laplacian the stiffness entries of the full-space form

    (c_{1,s}/2) int int (u(x) - u(y)) (v(x) - v(y)) / |x - y|^{1+2s} dx dy

depend only on ``|i - j|`` and are evaluated in closed form: the correlation
of two hat functions is a cubic B-spline, and pairing it with the kernel is a
fourth central difference of ``|t|^{3-2s}`` (regularised through s = 1/2).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate
from scipy.linalg import toeplitz

from .bounds import OperatorSpec
from .errors import AccuracyError, ContractError, DomainError
from .specfun import normalization_constant

__all__ = [
    "Grid1D",
    "CONVENTIONS",
    "laplacian_matrix",
    "fractional_matrix",
    "mixed_matrix",
    "apply_fractional_pointwise",
    "gagliardo_form",
    "gagliardo_gram",
    "exterior_kernel_matrix",
]

CONVENTIONS = ("full_space_normalized", "omega_only_unnormalized")

# beyond this offset the fourth difference loses too many digits to cancellation
_DIRECT_OFFSET_MAX = 8


@dataclass(frozen=True)
class Grid1D:
    x_lo: float
    x_hi: float
    n_interior: int

    def __post_init__(self):
        if not self.x_lo < self.x_hi:
            raise DomainError("grid needs x_lo < x_hi")
        if int(self.n_interior) != self.n_interior or self.n_interior < 2:
            raise DomainError("grid needs at least two interior nodes")

    @property
    def length(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def h(self) -> float:
        return self.length / (self.n_interior + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.x_lo + self.h * np.arange(1, self.n_interior + 1)

    def with_size(self, n_interior: int) -> "Grid1D":
        return Grid1D(self.x_lo, self.x_hi, n_interior)


def _check_order(s):
    if not 0.0 < s < 1.0:
        raise DomainError(f"fractional order must lie in (0, 1), got {s!r}")
    return float(s)


def laplacian_matrix(g: Grid1D) -> np.ndarray:
    """Dirichlet 3-point Laplacian, tridiag(-1, 2, -1) / h^2."""
    n = g.n_interior
    col = np.zeros(n)
    col[0] = 2.0
    col[1] = -1.0
    return toeplitz(col) / g.h ** 2


def _fourth_antiderivative(t, s):
    """Fourth antiderivative of |t|^{-1-2s}, minus a multiple of t^2.

    The t^2 term (which carries the pole at s = 1/2) is annihilated by every
    fourth difference, so dropping it keeps the formula finite through s = 1/2.
    """
    t = np.abs(np.asarray(t, dtype=float))
    eps = 1.0 - 2.0 * s
    with np.errstate(divide="ignore"):
        logt = np.where(t > 0, np.log(np.where(t > 0, t, 1.0)), 0.0)
    if abs(eps) < 1e-8:
        core = t * t * logt * (1.0 + 0.5 * eps * logt)
    else:
        core = t * t * np.expm1(eps * logt) / eps
    return core / ((-2.0 * s) * (2.0 - 2.0 * s) * (3.0 - 2.0 * s))


def _bspline_kernel_direct(m, s):
    coeffs = (1.0, -4.0, 6.0, -4.0, 1.0)
    return sum(c * _fourth_antiderivative(m + 2 - p, s) for p, c in enumerate(coeffs))


def _bspline_kernel_quadrature(m, s):
    """int M4(t) |m - t|^{-1-2s} dt for |m| > 2, Gauss-Legendre per B-spline piece."""
    x, w = leggauss(16)
    total = np.zeros_like(m, dtype=float)
    for left in (-2.0, -1.0, 0.0, 1.0):
        t = left + 0.5 * (x + 1.0)
        a = np.abs(t)
        spline = np.where(a < 1.0, 2.0 / 3.0 - a * a + 0.5 * a ** 3, (2.0 - a) ** 3 / 6.0)
        total += np.abs(m[:, None] - t[None, :]) ** (-1.0 - 2.0 * s) @ (0.5 * w * spline)
    return total


@lru_cache(maxsize=64)
def _unit_stiffness_column(n, s):
    """First column of the fractional stiffness matrix for h = 1."""
    m = np.arange(n, dtype=float)
    pairing = np.empty(n)
    near = m <= _DIRECT_OFFSET_MAX
    pairing[near] = _bspline_kernel_direct(m[near], s)
    if np.any(~near):
        pairing[~near] = _bspline_kernel_quadrature(m[~near], s)
    col = -normalization_constant(1, s).value * pairing
    col.setflags(write=False)
    return col


def fractional_matrix(g: Grid1D, s: float) -> np.ndarray:
    """Discrete restricted fractional Laplacian with zero exterior extension.

    Returns the stiffness matrix of the full-space normalised form on the
    hat-function basis divided by ``h``, so that ``h * u @ L @ v`` equals the
    form evaluated on the interpolants of ``u`` and ``v``.
    """
    s = _check_order(s)
    col = _unit_stiffness_column(g.n_interior, s)
    return toeplitz(col) * g.h ** (-2.0 * s)


def mixed_matrix(g: Grid1D, op: OperatorSpec) -> np.ndarray:
    if op.n != 1:
        raise ContractError(f"1-D grid cannot discretise an operator in dimension {op.n}")
    mat = op.a * laplacian_matrix(g)
    if op.b != 0:
        mat = mat + op.b * fractional_matrix(g, op.s)
    return mat


def apply_fractional_pointwise(
    u: Callable[[float], float],
    x: float,
    s: float,
    support: tuple[float, float],
    d2u: Callable[[float], float] | None = None,
    rtol: float = 1e-6,
    delta: float | None = None,
) -> float:
    """Evaluate (-Lap)^s u at a single point by adaptive quadrature.

    ``u`` must vanish outside ``support`` (a finite interval) and be smooth.
    The part of the integral with ``|y| < delta`` comes from the Taylor
    expansion of the second difference; ``u''`` is either supplied or
    obtained by a fourth-order central difference, ``u''''`` always by a
    central difference.  Beyond the support the second difference is
    ``2 u(x)`` and the tail is integrated analytically.
    """
    s = _check_order(s)
    lo, hi = support
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError("support must be a finite interval")
    scale = min(hi - lo, 1.0)
    if delta is None:
        delta = 1e-3 * scale
    c = normalization_constant(1, s).value
    ux = float(u(x))

    eta = 1e-2 * scale
    stencil = np.array([u(x - 2 * eta), u(x - eta), ux, u(x + eta), u(x + 2 * eta)], dtype=float)
    if d2u is not None:
        curv = float(d2u(x))
    else:
        curv = stencil @ np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12 * eta ** 2)
    fourth = stencil @ np.array([1.0, -4.0, 6.0, -4.0, 1.0]) / eta ** 4

    # 2u(x) - u(x+y) - u(x-y) = -y^2 u'' - y^4 u'''' / 12 + O(y^6)
    head = -curv * delta ** (2 - 2 * s) / (2 - 2 * s) - fourth * delta ** (4 - 2 * s) / (12 * (4 - 2 * s))
    reach = max(abs(x - lo), abs(hi - x))

    def integrand(y):
        return (2.0 * ux - u(x + y) - u(x - y)) * y ** (-1.0 - 2.0 * s)

    body, err = 0.0, 0.0
    left = delta
    while left < reach:
        right = min(10.0 * left, reach)
        with warnings.catch_warnings():
            # the accumulated error estimate is checked against rtol below
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            v, e = integrate.quad(integrand, left, right, epsabs=0.0, epsrel=1e-10, limit=200)
        body += v
        err += e
        left = right
    tail = 2.0 * ux * max(reach, delta) ** (-2.0 * s) / (2.0 * s)
    value = c * (head + body + tail)
    if c * err > rtol * max(abs(value), 1e-12):
        raise AccuracyError(f"pointwise quadrature error {c * err:.2e} exceeds target", estimate=c * err)
    return value


# --- quadratic forms -----------------------------------------------------------


def _padded(g, u):
    u = np.asarray(u, dtype=float)
    if u.shape != (g.n_interior,):
        raise ContractError(f"grid vector must have length {g.n_interior}, got shape {u.shape}")
    return np.concatenate(([0.0], u, [0.0]))


def _power_moments(t0, t1, s, kmax=2):
    """int_{t0}^{t1} t^{k-2s} dt for k = 0..kmax, vectorised over cells.

    Divergent moments (t0 = 0 with k + 1 - 2s <= 0) come back as inf; their
    coefficients vanish for functions that are zero at the endpoint.
    """
    t0 = np.asarray(t0, dtype=float)
    safe0 = np.where(t0 > 0, t0, 1.0)
    log_ratio = np.log(t1 / safe0)
    out = []
    for k in range(kmax + 1):
        p = k + 1 - 2 * s
        interior = log_ratio if p == 0 else safe0 ** p * np.expm1(p * log_ratio) / p
        at_zero = t1 ** p / p if p > 0 else np.inf
        out.append(np.where(t0 > 0, interior, at_zero))
    return out


def _weighted(coef, moment):
    with np.errstate(invalid="ignore"):
        return np.where(coef == 0, 0.0, coef * moment)


def _exterior_cell_integrals(g, s, u_left, u_right, v_left, v_right):
    """int over each cell of u v kappa, kappa(x) = int_{R \\ Omega} |x - y|^{-1-2s} dy.

    u and v are linear on each cell with the given end values.
    """
    h = g.h
    cells = np.arange(g.n_interior + 1)
    du = (u_right - u_left) / h
    dv = (v_right - v_left) / h
    total = np.zeros(cells.size)
    # distance to the left endpoint runs over [c h, (c+1) h]; to the right
    # endpoint over [(N - c) h, (N + 1 - c) h] with the slope reversed
    for t0, u0, v0, su, sv in (
        (cells * h, u_left, v_left, du, dv),
        ((g.n_interior - cells) * h, u_right, v_right, -du, -dv),
    ):
        au = u0 - su * t0
        av = v0 - sv * t0
        m0, m1, m2 = _power_moments(t0, t0 + h, s)
        total += _weighted(au * av, m0) + _weighted(au * sv + su * av, m1) + _weighted(su * sv, m2)
    return total / (2.0 * s)


def _omega_double_integral(g, s, U, V, order=12):
    """int_Omega int_Omega (u(x)-u(y)) (v(x)-v(y)) |x-y|^{-1-2s} by quadrature."""
    h = g.h
    ncell = g.n_interior + 1
    du = np.diff(U) / h
    dv = np.diff(V) / h

    # same cell: the integrand is u' v' |x - y|^{1-2s}
    same = np.sum(du * dv) * 2.0 * h ** (3 - 2 * s) / ((2 - 2 * s) * (3 - 2 * s))

    # neighbouring cells: polar (Duffy) coordinates about the shared node
    x, w = leggauss(order)
    t = 0.5 * (x + 1.0)
    w = 0.5 * w
    kern = (1.0 + t) ** (-1.0 - 2.0 * s)
    j0, j1, j2 = (np.sum(w * t ** k * kern) for k in range(3))
    a, b = du[:-1], du[1:]
    ap, bp = dv[:-1], dv[1:]
    touching = (a * ap + b * bp) * (j0 + j2) + 2.0 * (a * bp + b * ap) * j1
    touching = 2.0 * np.sum(touching) * h ** (3 - 2 * s) / (3 - 2 * s)

    # separated cells: tensor Gauss-Legendre, the kernel is smooth there
    pts = g.x_lo + h * (np.arange(ncell)[:, None] + t[None, :])
    up = U[:-1, None] + du[:, None] * (pts - (g.x_lo + h * np.arange(ncell))[:, None])
    vp = V[:-1, None] + dv[:, None] * (pts - (g.x_lo + h * np.arange(ncell))[:, None])
    cell_of = np.repeat(np.arange(ncell), order)
    pts, up, vp = pts.ravel(), up.ravel(), vp.ravel()
    wts = np.tile(w * h, ncell)
    far = np.abs(cell_of[:, None] - cell_of[None, :]) >= 2
    dist = np.abs(pts[:, None] - pts[None, :])
    with np.errstate(divide="ignore"):
        kmat = np.where(far, dist ** (-1.0 - 2.0 * s), 0.0)
    prod = (up[:, None] - up[None, :]) * (vp[:, None] - vp[None, :]) * kmat
    separated = wts @ prod @ wts
    return same + touching + separated


def gagliardo_form(g: Grid1D, u, v, s: float, convention: str = "full_space_normalized") -> float:
    """Bilinear Gagliardo form of the piecewise-linear interpolants of u and v.

    Evaluated by direct quadrature, independently of :func:`fractional_matrix`.
    ``full_space_normalized`` integrates over R x R with the factor c_{1,s}/2;
    ``omega_only_unnormalized`` integrates over Omega x Omega with no factor.
    Memory grows like (12 N)^2, so keep ``n_interior`` in the low hundreds.
    """
    s = _check_order(s)
    if convention not in CONVENTIONS:
        raise ContractError(f"unknown convention {convention!r}")
    U, V = _padded(g, u), _padded(g, v)
    inner = _omega_double_integral(g, s, U, V)
    if convention == "omega_only_unnormalized":
        return float(inner)
    c = normalization_constant(1, s).value
    return float(0.5 * c * (inner + 2.0 * np.sum(_exterior_cell_integrals(g, s, U[:-1], U[1:], V[:-1], V[1:]))))


def exterior_kernel_matrix(g: Grid1D, s: float) -> np.ndarray:
    """Tridiagonal matrix of int phi_i phi_j kappa over Omega (hat basis)."""
    s = _check_order(s)
    one = np.ones(g.n_interior + 1)
    zero = np.zeros_like(one)
    # cell c runs from padded node c to c + 1; interior node i is padded i + 1
    left_left = _exterior_cell_integrals(g, s, one, zero, one, zero)
    right_right = _exterior_cell_integrals(g, s, zero, one, zero, one)
    cross = _exterior_cell_integrals(g, s, one, zero, zero, one)
    diag = right_right[:-1] + left_left[1:]
    off = cross[1:-1]
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


def gagliardo_gram(g: Grid1D, s: float, convention: str = "full_space_normalized") -> np.ndarray:
    """Gram matrix of the Gagliardo form on the hat basis (matrix route)."""
    s = _check_order(s)
    stiffness = g.h * fractional_matrix(g, s)
    if convention == "full_space_normalized":
        return stiffness
    if convention == "omega_only_unnormalized":
        c = normalization_constant(1, s).value
        return 2.0 / c * stiffness - 2.0 * exterior_kernel_matrix(g, s)
    raise ContractError(f"unknown convention {convention!r}")
