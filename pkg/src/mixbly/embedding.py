"""Discrete estimates of the constant C_E in

    [u]_s^2 <= C_E * ||u'||_{L^2}^2,    u in H^1_0(Omega),

where ``[u]_s^2`` is the Gagliardo form in one of two normalisations.  On a
grid the optimal constant is the largest generalised eigenvalue of the
Gagliardo Gram matrix against the Dirichlet stiffness matrix; being a
maximum over a subspace it underestimates the continuum constant.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import OperatorSpec
from .discretize import CONVENTIONS, Grid1D, gagliardo_gram, laplacian_matrix, mixed_matrix
from .eigensolve import generalized_symmetric_eigen, is_positive_definite
from .errors import ContractError, DomainError, NumericError

__all__ = ["EmbeddingEstimate", "discrete_embedding_constant", "admissible_b_range"]


@dataclass(frozen=True)
class EmbeddingEstimate:
    grid: Grid1D
    s: float
    convention: str
    mu_max: float
    extremizer: np.ndarray

    def as_dict(self, full: bool = False) -> dict:
        out = {
            "domain": [self.grid.x_lo, self.grid.x_hi],
            "n_interior": self.grid.n_interior,
            "s": self.s,
            "convention": self.convention,
            "mu_max": self.mu_max,
        }
        if full:
            out["extremizer"] = self.extremizer.tolist()
        return out


def discrete_embedding_constant(g: Grid1D, s: float, convention: str = "full_space_normalized") -> EmbeddingEstimate:
    if convention not in CONVENTIONS:
        raise ContractError(f"unknown convention {convention!r}")
    gram = gagliardo_gram(g, s, convention)
    stiffness = g.h * laplacian_matrix(g)
    mu, vec = generalized_symmetric_eigen(gram, stiffness, which="largest")
    quotient = (vec @ gram @ vec) / (vec @ stiffness @ vec)
    if abs(quotient - mu) > 1e-8 * abs(mu):
        raise NumericError("extremizer does not reproduce the embedding constant")
    return EmbeddingEstimate(g, float(s), convention, float(mu), vec)


def admissible_b_range(g: Grid1D, s: float, a: float):
    """Lower end ``-a / mu_max`` of the admissible negative ``b`` and a certificate.

    The certificate is the Cholesky test of the mixed matrix at 0.99 times
    that lower end.
    """
    if not a > 0:
        raise DomainError("a must be positive")
    mu = discrete_embedding_constant(g, s).mu_max
    b_lo = -a / mu
    certificate = is_positive_definite(mixed_matrix(g, OperatorSpec(1, a, 0.99 * b_lo, s)))
    return b_lo, certificate
