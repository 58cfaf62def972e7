"""Mass bound for capped densities under a moment budget (bathtub lemma).

Among radial densities ``0 <= f <= m1`` on R^n with

    int (alpha |z|^2 + beta |z|^{2s}) f(z) dz <= m2,

the total mass is maximised by ``m1`` times the indicator of the ball whose
radius saturates the moment budget.  This module computes that radius, the
resulting exact mass bound, and the two single-term relaxations (the min and
max over the one-term radii), plus an exact evaluator for radial step
functions used as a brute-force oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AccuracyError, DegenerateProblemError, DomainError, MalformedFunctionError
from .specfun import unit_ball_volume, unit_sphere_area

__all__ = [
    "BathtubProblem",
    "BathtubSolution",
    "StepCheck",
    "bathtub_radius",
    "bathtub_bounds",
    "bathtub_oracle_check",
    "single_term_radii",
    "moment_of_ball",
    "random_step_function",
]

RESIDUAL_RTOL = 1e-10
_MAX_BISECTIONS = 200


@dataclass(frozen=True)
class BathtubProblem:
    n: int
    s: float
    alpha: float
    beta: float
    m1: float
    m2: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"s must lie in (0, 1), got {self.s!r}")
        if self.alpha < 0 or self.beta < 0:
            raise DomainError("alpha and beta must be nonnegative")
        if self.alpha + self.beta <= 0:
            raise DegenerateProblemError("alpha + beta must be positive")
        if not (self.m1 > 0 and self.m2 > 0):
            raise DomainError("m1 and m2 must be positive")


@dataclass(frozen=True)
class BathtubSolution:
    radius: float
    exact_bound: float
    minform_bound: float
    maxform_bound: float
    active_branch: str  # "local" | "nonlocal" | "interior"

    def as_dict(self):
        return {
            "radius": self.radius,
            "exact_bound": self.exact_bound,
            "minform_bound": self.minform_bound,
            "maxform_bound": self.maxform_bound,
            "active_branch": self.active_branch,
        }


class StepCheck(NamedTuple):
    mass: float
    admissible: bool
    moment: float


def moment_of_ball(p: BathtubProblem, radius: float) -> float:
    """Moment of ``m1`` times the indicator of the ball of the given radius."""
    n = p.n
    return p.m1 * unit_sphere_area(n) * (
        p.alpha * radius ** (n + 2) / (n + 2)
        + p.beta * radius ** (n + 2 * p.s) / (n + 2 * p.s)
    )


def single_term_radii(p: BathtubProblem) -> tuple[float, float]:
    """Radii saturating the budget with only the |z|^2 or only the |z|^{2s} term.

    A vanishing weight gives ``inf`` for its radius.
    """
    n, s = p.n, p.s
    area = unit_sphere_area(n)
    r_alpha = math.inf
    r_beta = math.inf
    if p.alpha > 0:
        r_alpha = (p.m2 * (n + 2) / (p.m1 * area * p.alpha)) ** (1.0 / (n + 2))
    if p.beta > 0:
        r_beta = (p.m2 * (n + 2 * s) / (p.m1 * area * p.beta)) ** (1.0 / (n + 2 * s))
    return r_alpha, r_beta


def bathtub_radius(p: BathtubProblem) -> float:
    """Unique R > 0 whose ball exhausts the moment budget exactly."""
    r_alpha, r_beta = single_term_radii(p)
    if p.beta == 0:
        return r_alpha
    if p.alpha == 0:
        return r_beta
    # the moment is strictly increasing in R and each single-term radius
    # overshoots the budget once the other term is switched on
    lo, hi = 0.0, min(r_alpha, r_beta)
    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if moment_of_ball(p, mid) < p.m2:
            lo = mid
        else:
            hi = mid
    radius = hi if abs(moment_of_ball(p, hi) - p.m2) < abs(moment_of_ball(p, lo) - p.m2) else lo
    residual = abs(moment_of_ball(p, radius) - p.m2) / p.m2
    if residual > RESIDUAL_RTOL:
        raise AccuracyError(f"bathtub radius residual {residual:.2e}", estimate=residual)
    return radius


def bathtub_bounds(p: BathtubProblem) -> BathtubSolution:
    radius = bathtub_radius(p)
    omega = unit_ball_volume(p.n)
    exact = p.m1 * omega * radius ** p.n
    radii = [r for r in single_term_radii(p) if math.isfinite(r)]
    minform = p.m1 * omega * min(radii) ** p.n
    maxform = p.m1 * omega * max(radii) ** p.n
    if p.beta == 0:
        branch = "local"
    elif p.alpha == 0:
        branch = "nonlocal"
    else:
        branch = "interior"
    return BathtubSolution(radius, exact, minform, maxform, branch)


def bathtub_oracle_check(p: BathtubProblem, breakpoints, levels) -> StepCheck:
    """Exact mass and moment of a radial step function.

    ``breakpoints`` are the outer radii ``r_1 < ... < r_m`` of consecutive
    shells (the first shell starts at the origin) and ``levels`` the constant
    value of ``f`` on each shell.
    """
    r = np.asarray(breakpoints, dtype=float)
    lv = np.asarray(levels, dtype=float)
    if r.ndim != 1 or r.shape != lv.shape or r.size == 0:
        raise MalformedFunctionError("breakpoints and levels must be equal-length 1-D sequences")
    if r[0] <= 0 or np.any(np.diff(r) <= 0) or not np.all(np.isfinite(r)):
        raise MalformedFunctionError("breakpoints must be positive, finite and strictly increasing")
    if np.any(lv < 0) or np.any(lv > p.m1):
        raise MalformedFunctionError("levels must lie in [0, m1]")
    n, s = p.n, p.s
    area = unit_sphere_area(n)
    inner = np.concatenate(([0.0], r[:-1]))

    def shell(k):
        return (r ** k - inner ** k) / k

    mass = area * float(np.dot(lv, shell(n)))
    moment = area * float(np.dot(lv, p.alpha * shell(n + 2) + p.beta * shell(n + 2 * s)))
    return StepCheck(mass, moment <= p.m2 * (1.0 + 1e-12), moment)


def random_step_function(p: BathtubProblem, rng: np.random.Generator, max_shells: int = 8):
    """Draw a random admissible radial step function ``(breakpoints, levels)``.

    Shell radii are spread over a few multiples of the optimal radius; levels
    are rescaled when needed so the moment budget holds.
    """
    radius = bathtub_radius(p)
    m = int(rng.integers(1, max_shells + 1))
    breakpoints = np.sort(rng.uniform(0.0, 3.0 * radius, size=m))
    breakpoints = np.unique(breakpoints[breakpoints > 0])
    if breakpoints.size == 0:
        breakpoints = np.array([radius])
    levels = rng.uniform(0.0, p.m1, size=breakpoints.size)
    if rng.random() < 0.3:
        levels[:] = p.m1
    check = bathtub_oracle_check(p, breakpoints, levels)
    if check.moment > p.m2:
        levels = levels * (p.m2 / check.moment)
    return breakpoints, levels
