import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrc.errors import DomainError
from mrc.lsq import normalized_norm, projected_residual, solve_cutoff


def _random_system(seed, m=40, n=10):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    return rng, A


def test_normalized_norm_of_ones_is_one():
    assert normalized_norm(np.ones(17)) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        normalized_norm(np.array([]))


def test_recovers_forward_generated_coefficients():
    rng, A = _random_system(1)
    c_true = rng.normal(size=10) + 1j * rng.normal(size=10)
    sol = solve_cutoff(A, -A @ c_true, 1e-12)
    assert np.max(np.abs(sol.coeffs - c_true)) < 1e-12
    assert sol.r_min < 1e-13
    assert sol.kept_rank == 10


def test_residual_is_orthogonal_to_range():
    rng, A = _random_system(2)
    b = rng.normal(size=40) + 1j * rng.normal(size=40)
    sol = solve_cutoff(A, b, 1e-12)
    res = b + A @ sol.coeffs
    assert np.max(np.abs(A.conj().T @ res)) < 1e-10
    assert sol.r_min == pytest.approx(normalized_norm(res), rel=1e-14)
    assert sol.r_min == pytest.approx(projected_residual(A, b, 1e-12), rel=1e-10)


def test_cutoff_discards_dependent_columns():
    rng, A = _random_system(3)
    A = np.column_stack([A, A[:, 0] * (1 + 1e-15)])
    b = rng.normal(size=40) + 0j
    sol = solve_cutoff(A, b, 1e-8)
    assert sol.kept_rank == 10
    assert np.all(np.isfinite(sol.coeffs))


def test_everything_cut_returns_zero():
    _, A = _random_system(4)
    b = np.ones(40, dtype=complex)
    sol = solve_cutoff(A, b, 1e6)
    assert sol.kept_rank == 0
    assert np.all(sol.coeffs == 0)
    assert sol.r_min == pytest.approx(1.0)


def test_shape_and_cutoff_errors():
    _, A = _random_system(5)
    with pytest.raises(DomainError):
        solve_cutoff(A, np.ones(39), 1e-12)
    with pytest.raises(DomainError):
        solve_cutoff(A, np.ones(40), 0.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.floats(1e-3, 10.0), st.floats(1e-3, 10.0))
def test_cutoff_monotonicity(seed, w1, w2):
    # a larger cutoff keeps fewer directions, so the residual cannot shrink
    rng, A = _random_system(seed)
    A = A * np.logspace(0, -3, 10)
    b = rng.normal(size=40) + 1j * rng.normal(size=40)
    lo, hi = sorted((w1, w2))
    assert solve_cutoff(A, b, lo).r_min <= solve_cutoff(A, b, hi).r_min + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_optimality_against_perturbation(seed):
    rng, A = _random_system(seed, 25, 6)
    b = rng.normal(size=25) + 1j * rng.normal(size=25)
    sol = solve_cutoff(A, b, 1e-12)
    delta = 1e-3 * (rng.normal(size=6) + 1j * rng.normal(size=6))
    assert normalized_norm(b + A @ (sol.coeffs + delta)) >= sol.r_min
    assert sol.r_min <= normalized_norm(b) + 1e-15
