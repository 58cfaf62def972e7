"""Independent reference computations used by the tests."""
import math

import mpmath
import numpy as np


def symmetric_3x3_eigenvalues(a):
    """Roots of the characteristic cubic of a real symmetric 3x3 matrix.

    Trigonometric solution of det(A - lambda I) = 0 after shifting by the
    mean eigenvalue.  The arccos is ill-conditioned at repeated roots, so the
    formula is evaluated with 50 digits; no linear-algebra library involved.
    """
    with mpmath.workdps(50):
        a = [[mpmath.mpf(float(a[i][j])) for j in range(3)] for i in range(3)]
        q = (a[0][0] + a[1][1] + a[2][2]) / 3
        p1 = a[0][1] ** 2 + a[0][2] ** 2 + a[1][2] ** 2
        p2 = sum((a[i][i] - q) ** 2 for i in range(3)) + 2 * p1
        p = mpmath.sqrt(p2 / 6)
        if p == 0:
            return [float(q)] * 3
        b = [[(a[i][j] - (q if i == j else 0)) / p for j in range(3)] for i in range(3)]
        det_b = (
            b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
            - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
            + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0])
        )
        r = max(mpmath.mpf(-1), min(mpmath.mpf(1), det_b / 2))
        phi = mpmath.acos(r) / 3
        hi = q + 2 * p * mpmath.cos(phi)
        lo = q + 2 * p * mpmath.cos(phi + 2 * mpmath.pi / 3)
        return sorted(float(v) for v in (lo, 3 * q - hi - lo, hi))


def power_iteration(c, tol=1e-14, max_iter=200000, seed=0):
    """Dominant eigenvalue of a symmetric positive semidefinite matrix."""
    x = np.random.default_rng(seed).standard_normal(c.shape[0])
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = c @ x
        new = float(x @ y)
        x = y / np.linalg.norm(y)
        if abs(new - lam) <= tol * abs(new):
            return new
        lam = new
    return lam


def triangular_inverse_sandwich(a, b):
    """R^{-T} A R^{-1} with B = R^T R, by plain numpy inverses."""
    r = np.linalg.cholesky(b).T
    r_inv = np.linalg.inv(r)
    return r_inv.T @ a @ r_inv
