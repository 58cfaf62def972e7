import numpy as np
import pytest
import scipy.linalg as sla

from mixbly.bounds import OperatorSpec
from mixbly.discretize import Grid1D, fractional_matrix, laplacian_matrix, mixed_matrix
from mixbly.eigensolve import is_positive_definite
from mixbly.embedding import admissible_b_range, discrete_embedding_constant
from mixbly.errors import ContractError, DomainError

from oracles import power_iteration, triangular_inverse_sandwich


def test_normalized_matches_matrix_pencil():
    g = Grid1D(0, 1, 64)
    est = discrete_embedding_constant(g, 0.5)
    direct = sla.eigh(fractional_matrix(g, 0.5), laplacian_matrix(g), eigvals_only=True)[-1]
    assert est.mu_max == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("convention", ["full_space_normalized", "omega_only_unnormalized"])
def test_power_iteration_oracle(convention):
    from mixbly.discretize import gagliardo_gram

    g = Grid1D(0, 1, 48)
    est = discrete_embedding_constant(g, 0.6, convention)
    c = triangular_inverse_sandwich(gagliardo_gram(g, 0.6, convention), g.h * laplacian_matrix(g))
    assert est.mu_max == pytest.approx(power_iteration(c), rel=1e-8)


def test_extremizer_reproduces_quotient():
    g = Grid1D(0, 1, 96)
    est = discrete_embedding_constant(g, 0.3)
    v = est.extremizer
    q = (v @ fractional_matrix(g, 0.3) @ v) / (v @ laplacian_matrix(g) @ v)
    assert abs(q - est.mu_max) <= 1e-8 * est.mu_max


def test_refinement_monotone():
    coarse = discrete_embedding_constant(Grid1D(0, 1, 128), 0.5).mu_max
    fine = discrete_embedding_constant(Grid1D(0, 1, 256), 0.5).mu_max
    assert fine >= coarse - 1e-6


def test_near_local_limit():
    mu = discrete_embedding_constant(Grid1D(0, 1, 256), 0.95).mu_max
    assert 0.5 <= mu <= 2


def test_conventions_differ_and_depend_on_length():
    g = Grid1D(0, 1, 64)
    normalized = discrete_embedding_constant(g, 0.5).mu_max
    printed = discrete_embedding_constant(g, 0.5, "omega_only_unnormalized").mu_max
    assert printed > normalized > 0
    longer = discrete_embedding_constant(Grid1D(0, 2, 64), 0.5).mu_max
    # scaling x -> 2x multiplies the ratio by 2^{2 - 2s}
    assert longer == pytest.approx(2 * normalized, rel=1e-10)


def test_unknown_convention():
    with pytest.raises(ContractError):
        discrete_embedding_constant(Grid1D(0, 1, 8), 0.5, "other")


@pytest.mark.parametrize("n, s", [(64, 0.25), (128, 0.5), (96, 0.75)])
def test_positivity_brackets_threshold(n, s):
    g = Grid1D(0, 1, n)
    mu = discrete_embedding_constant(g, s).mu_max
    assert is_positive_definite(mixed_matrix(g, OperatorSpec(1, 1.0, -0.9 / mu, s)))
    assert not is_positive_definite(mixed_matrix(g, OperatorSpec(1, 1.0, -1.5 / mu, s)))


def test_threshold_located_by_bisection():
    g = Grid1D(0, 1, 64)
    mu = discrete_embedding_constant(g, 0.5).mu_max
    lo, hi = -2.0 / mu, 0.0  # not PD at lo, PD at hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if is_positive_definite(mixed_matrix(g, OperatorSpec(1, 1.0, mid, 0.5))):
            hi = mid
        else:
            lo = mid
    assert hi == pytest.approx(-1.0 / mu, rel=1e-8)


def test_admissible_range():
    g = Grid1D(0, 1, 128)
    b_lo, cert = admissible_b_range(g, 0.5, 1.0)
    assert b_lo < 0 and cert
    b_lo3, _ = admissible_b_range(g, 0.5, 3.0)
    assert b_lo3 == pytest.approx(3 * b_lo, rel=1e-14)
    assert is_positive_definite(mixed_matrix(g, OperatorSpec(1, 1.0, 0.0, 0.5)))
    with pytest.raises(DomainError):
        admissible_b_range(g, 0.5, 0.0)


def test_as_dict():
    est = discrete_embedding_constant(Grid1D(0, 1, 16), 0.5)
    assert "extremizer" not in est.as_dict()
    assert len(est.as_dict(full=True)["extremizer"]) == 16
