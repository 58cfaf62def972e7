import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from mixbly.bounds import OperatorSpec
from mixbly.discretize import (
    CONVENTIONS,
    Grid1D,
    _unit_stiffness_column,
    apply_fractional_pointwise,
    exterior_kernel_matrix,
    fractional_matrix,
    gagliardo_form,
    gagliardo_gram,
    laplacian_matrix,
    mixed_matrix,
)
from mixbly.eigensolve import is_positive_definite
from mixbly.errors import ContractError, DomainError
from mixbly.specfun import normalization_constant


def gaussian(x):
    return math.exp(-0.5 * x * x)


def bump(x):
    # smooth, supported on (0.2, 0.8)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    t = (x - 0.5) / 0.3
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def bump_scalar(x):
    return float(bump(np.array([x]))[0])


def test_grid_basics():
    g = Grid1D(0.0, 1.0, 3)
    assert g.h == 0.25
    np.testing.assert_allclose(g.nodes, [0.25, 0.5, 0.75])
    with pytest.raises(DomainError):
        Grid1D(1.0, 0.0, 5)
    with pytest.raises(DomainError):
        Grid1D(0.0, 1.0, 1)


def test_laplacian_small_grid():
    lam = np.linalg.eigvalsh(laplacian_matrix(Grid1D(0, 1, 3)))
    assert lam[0] == pytest.approx(64 * math.sin(math.pi / 8) ** 2, rel=1e-12)
    assert lam[2] == pytest.approx(64 * math.sin(3 * math.pi / 8) ** 2, rel=1e-12)


@pytest.mark.parametrize("n", [3, 10, 50])
def test_laplacian_closed_form(n):
    g = Grid1D(0, 1, n)
    j = np.arange(1, n + 1)
    exact = 4 / g.h ** 2 * np.sin(j * math.pi * g.h / 2) ** 2
    np.testing.assert_allclose(np.linalg.eigvalsh(laplacian_matrix(g)), exact, rtol=1e-12)


def test_laplacian_refinement():
    lam = np.linalg.eigvalsh(laplacian_matrix(Grid1D(0, 1, 512)))[0]
    assert abs(lam - math.pi ** 2) / math.pi ** 2 <= 1e-5


@pytest.mark.parametrize("m", [3, 5, 12, 20])
@pytest.mark.parametrize("s", [0.3, 0.5, 0.8])
def test_stiffness_entry_against_double_quadrature(m, s):
    # hats with disjoint supports only meet through the cross term of the form
    c = normalization_constant(1, s).value

    def f(y, x):
        return (1 - abs(x)) * (1 - abs(y - m)) * abs(x - y) ** (-1 - 2 * s)

    val, _ = integrate.dblquad(f, -1, 1, m - 1, m + 1, epsabs=1e-13, epsrel=1e-11)
    assert _unit_stiffness_column(m + 1, s)[m] == pytest.approx(-c * val, rel=1e-9)


@pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
def test_stiffness_column_sums_to_zero(s):
    # constants have zero energy on the whole line
    col = np.asarray(_unit_stiffness_column(4000, s))
    total = col[0] + 2 * col[1:].sum()
    tail = 2 * abs(col[-1]) * 4000 / (2 * s)
    assert abs(total) <= tail + 1e-10 * col[0]


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75, 0.95])
def test_fractional_structure(s):
    L = fractional_matrix(Grid1D(0, 1, 64), s)
    assert np.all(np.isfinite(L))
    assert np.array_equal(L, L.T)
    off = L - np.diag(np.diag(L))
    assert off.max() <= 0
    assert np.diag(L).min() > 0
    assert is_positive_definite(L)


def test_small_order_has_positive_neighbour_entry():
    # as s -> 0 the form tends to the L2 product, whose hat-basis Gram matrix
    # has positive neighbour entries; beyond the first offset signs stay <= 0
    col = np.asarray(_unit_stiffness_column(64, 0.05))
    assert col[1] > 0
    assert col[2:].max() <= 0
    assert is_positive_definite(fractional_matrix(Grid1D(0, 1, 64), 0.05))


def test_fractional_rejects_bad_order():
    with pytest.raises(DomainError):
        fractional_matrix(Grid1D(0, 1, 8), 1.0)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_row_sum_approaches_exterior_mass(s):
    # L 1 tends to c/(2s) [(x - x_lo)^{-2s} + (x_hi - x)^{-2s}] at first order in h
    c = normalization_constant(1, s).value
    errors = []
    for n in (63, 127, 255, 511):
        g = Grid1D(0, 1, n)
        x = g.nodes
        row = fractional_matrix(g, s).sum(axis=1)
        kappa = c / (2 * s) * (x ** (-2 * s) + (1 - x) ** (-2 * s))
        mid = np.abs(x - 0.5) < 0.25
        errors.append(np.max(np.abs(row[mid] - kappa[mid]) / kappa[mid]))
    assert all(e1 < e0 for e0, e1 in zip(errors, errors[1:]))
    assert errors[-1] < 0.01
    assert errors[-2] / errors[-1] > 1.6


def test_mixed_matrix():
    g = Grid1D(0, 1, 40)
    np.testing.assert_array_equal(mixed_matrix(g, OperatorSpec(1, 2.0, 0.0, 0.5)), 2.0 * laplacian_matrix(g))
    A, B = laplacian_matrix(g), fractional_matrix(g, 0.5)
    lam = np.linalg.eigvalsh(mixed_matrix(g, OperatorSpec(1, 1.0, 1.0, 0.5)))[0]
    assert lam >= np.linalg.eigvalsh(A)[0] + np.linalg.eigvalsh(B)[0] - 1e-9 * lam
    with pytest.raises(ContractError):
        mixed_matrix(g, OperatorSpec(2, 1.0, 1.0, 0.5))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 0.95), st.floats(-2, 2))
def test_rayleigh_identity(seed, s, b):
    g = Grid1D(0, 1, 30)
    v = np.random.default_rng(seed).standard_normal(30)
    v /= np.linalg.norm(v)
    A, B = laplacian_matrix(g), fractional_matrix(g, s)
    M = mixed_matrix(g, OperatorSpec(1, 1.0, b, s)) if b != 0 else A
    assert v @ M @ v == pytest.approx(v @ A @ v + b * (v @ B @ v), rel=1e-12)


def test_pointwise_gaussian_half():
    val = apply_fractional_pointwise(gaussian, 0.0, 0.5, support=(-40, 40))
    assert val == pytest.approx(math.sqrt(2 / math.pi), abs=1e-8)


@pytest.mark.parametrize("s", [0.15, 0.35, 0.65, 0.85])
def test_pointwise_gaussian_fourier_oracle(s):
    # (2 pi)^{-1/2} int |xi|^{2s} e^{-xi^2/2} d xi = 2^s Gamma(s + 1/2) / sqrt(pi)
    expected = 2 ** s * math.gamma(s + 0.5) / math.sqrt(math.pi)
    assert apply_fractional_pointwise(gaussian, 0.0, s, support=(-40, 40)) == pytest.approx(expected, rel=1e-6)


def test_pointwise_limits():
    assert apply_fractional_pointwise(gaussian, 0.0, 0.999, support=(-40, 40)) == pytest.approx(1.0, rel=1e-2)
    assert apply_fractional_pointwise(gaussian, 0.0, 0.01, support=(-40, 40)) == pytest.approx(1.0, rel=2e-2)


def test_pointwise_with_supplied_curvature():
    val = apply_fractional_pointwise(gaussian, 0.0, 0.5, support=(-40, 40), d2u=lambda x: (x * x - 1) * gaussian(x))
    assert val == pytest.approx(math.sqrt(2 / math.pi), abs=1e-8)


def test_pointwise_bad_support():
    with pytest.raises(DomainError):
        apply_fractional_pointwise(gaussian, 0.0, 0.5, support=(1.0, -1.0))


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_matrix_converges_to_pointwise_oracle(s):
    errors = []
    for n in (63, 127, 255):
        g = Grid1D(0, 1, n)
        Lu = fractional_matrix(g, s) @ bump(g.nodes)
        idx = [round(t * (n + 1)) - 1 for t in (0.3, 0.4, 0.5, 0.6, 0.7)]
        errors.append(max(abs(Lu[i] - apply_fractional_pointwise(bump_scalar, g.nodes[i], s, support=(0.2, 0.8))) for i in idx))
    assert errors[0] > errors[1] > errors[2]


@pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
def test_gagliardo_matches_matrix(s):
    g = Grid1D(0, 1, 128)
    rng = np.random.default_rng(3)
    u, v = rng.standard_normal((2, 128))
    L = fractional_matrix(g, s)
    assert gagliardo_form(g, u, u, s) == pytest.approx(g.h * u @ L @ u, rel=1e-6)
    assert gagliardo_form(g, u, v, s) == pytest.approx(g.h * u @ L @ v, rel=1e-6)


def test_gagliardo_positive_and_bilinear():
    g = Grid1D(0, 1, 40)
    u = np.zeros(40)
    u[3:8] = 1.0
    v = np.zeros(40)
    v[30:35] = 1.0
    for conv in CONVENTIONS:
        cross = gagliardo_form(g, u, v, 0.5, conv)
        assert cross < 0
        assert gagliardo_form(g, u + v, u + v, 0.5, conv) >= 0
        assert gagliardo_form(g, np.zeros(40), np.zeros(40), 0.5, conv) == 0
        assert gagliardo_form(g, u, u, 0.5, conv) > 0


def test_gagliardo_length_mismatch():
    with pytest.raises(ContractError):
        gagliardo_form(Grid1D(0, 1, 10), np.ones(9), np.ones(10), 0.5)


@pytest.mark.parametrize("s", [0.3, 0.7])
def test_gram_conventions(s):
    g = Grid1D(0, 1, 24)
    c = normalization_constant(1, s).value
    full = gagliardo_gram(g, s, "full_space_normalized")
    omega = gagliardo_gram(g, s, "omega_only_unnormalized")
    np.testing.assert_allclose(full, g.h * fractional_matrix(g, s), rtol=1e-12)
    # whole-line form = Omega x Omega part + twice the exterior cross term
    np.testing.assert_allclose(omega, (2 / c) * full - 2 * exterior_kernel_matrix(g, s), rtol=1e-9, atol=1e-12)
    rng = np.random.default_rng(0)
    u, v = rng.standard_normal((2, 24))
    assert u @ omega @ v == pytest.approx(gagliardo_form(g, u, v, s, "omega_only_unnormalized"), rel=1e-9)
