"""Proximity operator tests, anchored by an independent bisection oracle."""

import numpy as np
import pytest

from strumer.prox import _solve_z_newton, prox_abs_p, prox_row_l2p, solve_z


def bisect_z(beta, p, a, tol=1e-13):
    """Independent oracle: bisection on 2*beta*z + p*z^(p-1) - 2*beta*a over [0, a]."""
    if a == 0:
        return 0.0
    if p == 1.0:
        return max(a - 0.5 / beta, 0.0)

    def h(z):
        return 2.0 * beta * z + p * z ** (p - 1.0) - 2.0 * beta * a

    lo, hi = 0.0, a
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * max(1.0, a):
            break
    return 0.5 * (lo + hi)


P_GRID = [1.0, 1.1, 1.25, 1.5, 1.75, 2.0]
BETA_GRID = [0.05, 0.5, 1.0, 4.0, 50.0]
A_GRID = [0.0, 1e-6, 0.01, 0.3, 1.0, 7.5, 300.0]


def test_solve_z_linear_case():
    # p = 2 reduces the optimality equation to a linear one
    assert solve_z(1.0, 2.0, 3.0) == pytest.approx(1.5, abs=1e-14)
    assert prox_abs_p(4.0, 1.0, 2.0) == pytest.approx(2.0, abs=1e-14)


def test_solve_z_soft_threshold():
    assert solve_z(1.0, 1.0, 0.3) == 0.0
    assert solve_z(1.0, 1.0, 3.0) == pytest.approx(2.5, abs=1e-14)
    assert prox_abs_p(3.0j, 1.0, 1.0) == pytest.approx(2.5j, abs=1e-14)


def test_solve_z_p15_frozen_golden_value():
    # golden value computed with the bisection oracle (root of 4z + 1.5*sqrt(z) = 4)
    golden = 0.6887776423421073
    assert bisect_z(2.0, 1.5, 1.0) == pytest.approx(golden, abs=1e-9)
    assert solve_z(2.0, 1.5, 1.0) == pytest.approx(golden, abs=1e-10)


@pytest.mark.parametrize("p", P_GRID)
def test_optimality_residual_on_grid(p):
    for beta in BETA_GRID:
        for a in A_GRID:
            z = solve_z(beta, p, a)
            assert 0.0 <= z <= a
            if z > 0:
                resid = 2 * beta * z + p * z ** (p - 1.0) - 2 * beta * a
                assert abs(resid) <= 1e-10 * max(1.0, 2 * beta * a)


@pytest.mark.parametrize("p", P_GRID)
def test_bisection_oracle_agreement(p):
    for beta in BETA_GRID:
        for a in A_GRID:
            assert solve_z(beta, p, a) == pytest.approx(
                bisect_z(beta, p, a), abs=1e-9 * max(1.0, a)
            )


@pytest.mark.parametrize("p", [1.5, 2.0])
def test_closed_form_matches_newton(p):
    # both branches exist for these exponents and must agree
    for beta in BETA_GRID:
        a = np.asarray(A_GRID, dtype=float)
        closed = solve_z(beta, p, a)
        newton = _solve_z_newton(np.full_like(a, beta), p, a)
        assert np.max(np.abs(closed - newton)) <= 1e-10 * max(1.0, a.max())


@pytest.mark.parametrize("p", P_GRID)
def test_monotone_in_magnitude(p):
    a = np.linspace(0.0, 10.0, 401)
    z = solve_z(2.0, p, a)
    assert (np.diff(z) >= -1e-12).all()
    assert (z <= a + 1e-14).all()


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 5, 50)
    beta = rng.uniform(0.1, 10, 50)
    z = solve_z(beta, 1.3, a)
    for i in range(50):
        assert z[i] == pytest.approx(solve_z(beta[i], 1.3, a[i]), abs=1e-12)


def test_prox_zero_fixed_point():
    for p in P_GRID:
        assert prox_abs_p(0.0, 1.0, p) == 0.0
        assert np.array_equal(prox_row_l2p(np.zeros(4), 1.0, p), np.zeros(4))


def test_prox_preserves_phase():
    rng = np.random.default_rng(1)
    a = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    out = prox_abs_p(a, 2.0, 1.4)
    nz = np.abs(out) > 0
    phase_err = np.abs(out[nz] / np.abs(out[nz]) - a[nz] / np.abs(a[nz]))
    assert phase_err.max() <= 1e-12
    assert np.allclose(np.abs(out), solve_z(2.0, 1.4, np.abs(a)))


def test_prox_row_soft_threshold_example():
    out = prox_row_l2p(np.array([3.0, 4.0]), 1.0, 1.0)
    assert np.allclose(out, [2.7, 3.6], atol=1e-12)


def test_prox_row_single_entry_reduces_to_scalar():
    row = np.array([1.5 - 2.0j])
    assert prox_row_l2p(row, 3.0, 1.25)[0] == pytest.approx(
        prox_abs_p(row[0], 3.0, 1.25), abs=1e-12
    )


def test_prox_row_colinear_and_shrinking():
    rng = np.random.default_rng(2)
    for _ in range(20):
        row = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        out = prox_row_l2p(row, 0.8, 1.5)
        # colinearity: out is a nonnegative multiple of row
        ratio = out / row
        assert np.abs(ratio - ratio[0]).max() <= 1e-12
        assert ratio[0].real >= 0 and abs(ratio[0].imag) <= 1e-12
        assert np.linalg.norm(out) <= np.linalg.norm(row) + 1e-12


def test_invalid_arguments_rejected():
    with pytest.raises(ValueError):
        solve_z(1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        solve_z(1.0, 2.5, 1.0)
    with pytest.raises(ValueError):
        solve_z(-1.0, 1.5, 1.0)
    with pytest.raises(ValueError):
        solve_z(0.0, 1.5, 1.0)
    with pytest.raises(ValueError):
        solve_z(1.0, 1.5, -0.5)
