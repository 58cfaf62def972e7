"""Dense symmetric eigensolvers with certified residuals.

The tridiagonal reduction and iteration are delegated to LAPACK through
:func:`scipy.linalg.eigh`; this module adds the post-conditions the rest of
the package relies on (ascending order, sign convention, joint
re-orthonormalisation of clusters, residual and orthonormality checks).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg as sla

from .errors import ContractError, DefinitenessError, NumericError

__all__ = [
    "Spectrum",
    "GeneralizedPair",
    "symmetric_eigen",
    "generalized_symmetric_eigen",
    "is_positive_definite",
]

RESIDUAL_RTOL = 1e-8
ORTHO_TOL = 1e-8
CLUSTER_RTOL = 1e-10


@dataclass
class Spectrum:
    """Lowest eigenpairs of a symmetric matrix.

    ``eigenvectors`` has orthonormal columns in the Euclidean inner product.
    When the matrix came from a mixed operator, ``local_part`` and
    ``nonlocal_part`` hold the Rayleigh quotients of the two summands, so
    ``eigenvalues == local_part + nonlocal_part`` up to rounding.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norms: np.ndarray
    local_part: Optional[np.ndarray] = None
    nonlocal_part: Optional[np.ndarray] = None

    def __len__(self):
        return self.eigenvalues.size

    @property
    def has_components(self) -> bool:
        return self.local_part is not None


class GeneralizedPair(NamedTuple):
    value: float
    vector: np.ndarray


def _check_square(a):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {a.shape}")
    return a


def _fix_signs(vecs):
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        big = np.flatnonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))
        if big.size and col[big[0]] < 0:
            vecs[:, j] = -col
    return vecs


def _reorthonormalize_clusters(vals, vecs, scale):
    start = 0
    for stop in range(1, vals.size + 1):
        if stop == vals.size or vals[stop] - vals[stop - 1] >= CLUSTER_RTOL * scale:
            if stop - start > 1:
                q, _ = np.linalg.qr(vecs[:, start:stop])
                vecs[:, start:stop] = q
            start = stop
    return vecs


def symmetric_eigen(a, m: int, parts=None) -> Spectrum:
    """Lowest ``m`` eigenpairs of the symmetric matrix ``a``.

    ``parts``, if given, is a pair of symmetric matrices summing to ``a``;
    their Rayleigh quotients are returned as the local and nonlocal parts.

    Raises
    ------
    NumericError
        If LAPACK fails to converge or a certified invariant does not hold.
    """
    a = _check_square(a)
    dim = a.shape[0]
    if not 1 <= m <= dim:
        raise ContractError(f"need 1 <= m <= {dim}, got {m}")
    try:
        vals, vecs = sla.eigh(a, subset_by_index=(0, m - 1), check_finite=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericError(f"symmetric eigensolver failed: {exc}") from exc
    scale = np.linalg.norm(a)
    vecs = _reorthonormalize_clusters(vals, vecs, scale)
    vecs = _fix_signs(vecs)

    residuals = np.linalg.norm(a @ vecs - vecs * vals, axis=0)
    if np.any(residuals > RESIDUAL_RTOL * scale):
        raise NumericError(f"eigenpair residual {residuals.max():.2e} exceeds {RESIDUAL_RTOL} * ||A||_F")
    gram = vecs.T @ vecs
    if np.max(np.abs(gram - np.eye(m))) > ORTHO_TOL:
        raise NumericError("eigenvectors are not orthonormal to tolerance")

    spectrum = Spectrum(vals, vecs, residuals)
    if parts is not None:
        first, second = (np.asarray(p, dtype=float) for p in parts)
        spectrum.local_part = np.einsum("ij,ij->j", vecs, first @ vecs)
        spectrum.nonlocal_part = np.einsum("ij,ij->j", vecs, second @ vecs)
        total = spectrum.local_part + spectrum.nonlocal_part
        if np.any(np.abs(total - vals) > RESIDUAL_RTOL * np.maximum(np.abs(vals), scale * 1e-8)):
            raise NumericError("Rayleigh components do not add up to the eigenvalues")
    return spectrum


def generalized_symmetric_eigen(a, b, which: str = "largest") -> GeneralizedPair:
    """Extremal ``mu`` with ``A v = mu B v`` for symmetric A and SPD B.

    Reduces to a standard problem with the Cholesky factor ``B = R^T R``.
    The returned vector is normalised so that ``v @ B @ v == 1``.
    """
    a = _check_square(a)
    b = _check_square(b)
    if a.shape != b.shape:
        raise ContractError("A and B must have the same shape")
    if which not in ("largest", "smallest"):
        raise ContractError(f"which must be 'largest' or 'smallest', got {which!r}")
    try:
        r = sla.cholesky(b, lower=False)
    except sla.LinAlgError as exc:
        raise DefinitenessError("B is not positive definite") from exc
    tmp = sla.solve_triangular(r, a.T, trans="T").T        # A R^{-1}
    c = sla.solve_triangular(r, tmp, trans="T")            # R^{-T} A R^{-1}
    c = 0.5 * (c + c.T)
    dim = a.shape[0]
    idx = dim - 1 if which == "largest" else 0
    vals, w = sla.eigh(c, subset_by_index=(idx, idx))
    mu = float(vals[0])
    v = sla.solve_triangular(r, w[:, 0])
    v = _fix_signs(v[:, None])[:, 0]
    v /= np.sqrt(v @ b @ v)
    resid = np.linalg.norm(a @ v - mu * (b @ v))
    bound = RESIDUAL_RTOL * (np.linalg.norm(a) + abs(mu) * np.linalg.norm(b)) * np.linalg.norm(v)
    if resid > bound:
        raise NumericError(f"generalized residual {resid:.2e} exceeds {bound:.2e}")
    return GeneralizedPair(mu, v)


def is_positive_definite(a) -> bool:
    """True iff an unpivoted Cholesky factorisation of ``a`` succeeds."""
    a = _check_square(a)
    if not np.all(np.isfinite(a)):
        return False
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return False
    return True
