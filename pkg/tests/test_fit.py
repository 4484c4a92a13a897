import math

import numpy as np
import pytest

from rhodiff import (
    FitOptions,
    FrequencyTable,
    ModelDomainError,
    SingularInformationError,
    TableError,
    fisher_information,
    fit_constrained,
    fit_unconstrained,
    loglik_diff,
    schur_var_delta,
    score_diff,
)
from rhodiff.model import _loglik_counts, rho_lower_bound

from conftest import random_table


class TestUnconstrained:
    def test_ome_golden(self, ome):
        fit = fit_unconstrained(ome)
        assert fit.converged
        assert fit.params.delta == pytest.approx(-0.0119, abs=5e-4)
        assert fit.params.pi1 == pytest.approx(0.6536, abs=5e-4)
        assert fit.params.rho == pytest.approx(0.5856, abs=5e-4)

    def test_orthok_golden(self, orthok):
        fit = fit_unconstrained(orthok)
        assert fit.converged
        assert fit.params.delta == pytest.approx(-0.2039, abs=5e-4)
        assert fit.params.pi1 == pytest.approx(0.3803, abs=5e-4)
        assert fit.params.rho == pytest.approx(0.5948, abs=5e-4)

    def test_unilateral_only_gives_binomial_mle(self):
        t = FrequencyTable.from_counts((0, 0, 0, 30, 10), (0, 0, 0, 12, 28))
        fit = fit_unconstrained(t)
        assert fit.converged
        assert not fit.rho_identified
        assert fit.params.pi1 == pytest.approx(10 / 40, abs=1e-9)
        assert fit.params.pi2 == pytest.approx(28 / 40, abs=1e-9)

    def test_empty_group_rejected(self):
        t = FrequencyTable.from_counts((0, 0, 0, 0, 0), (1, 2, 3, 4, 5))
        with pytest.raises(TableError):
            fit_unconstrained(t)

    def test_stationarity(self, rng):
        for _ in range(100):
            t = random_table(rng, min_group_organs=4)
            fit = fit_unconstrained(t)
            if not (fit.converged and fit.boundary == "interior"
                    and fit.rho_identified):
                continue
            assert np.abs(score_diff(t, fit.params)).max() < 1e-5 * (
                1 + t.organ_totals.sum())

    def test_group_swap_covariance(self, rng):
        for _ in range(100):
            t = random_table(rng, min_group_organs=2)
            a = fit_unconstrained(t)
            b = fit_unconstrained(t.swapped())
            assert b.params.delta == pytest.approx(-a.params.delta, abs=1e-8)
            assert b.params.pi1 == pytest.approx(a.params.pi1 + a.params.delta,
                                                 abs=1e-8)
            assert b.loglik == pytest.approx(a.loglik, abs=1e-9 * (1 + abs(a.loglik)))

    def test_max_iterations_flag(self, ome):
        fit = fit_unconstrained(ome, FitOptions(max_iterations=1))
        assert not fit.converged


class TestConstrained:
    def test_ome_golden(self, ome):
        fit = fit_constrained(ome, 0.0)
        assert fit.converged
        assert fit.params.pi1 == pytest.approx(0.6482, abs=5e-4)
        assert fit.params.rho == pytest.approx(0.5862, abs=5e-4)

    def test_orthok_golden(self, orthok):
        fit = fit_constrained(orthok, 0.0)
        assert fit.converged
        assert fit.params.pi1 == pytest.approx(0.3215, abs=5e-4)
        assert fit.params.rho == pytest.approx(0.6117, abs=5e-4)

    def test_inactive_constraint_matches_free_fit(self, ome):
        free = fit_unconstrained(ome)
        pinned = fit_constrained(ome, free.params.delta)
        assert pinned.loglik == pytest.approx(free.loglik, abs=1e-8)
        assert pinned.params.pi1 == pytest.approx(free.params.pi1, abs=1e-5)
        assert pinned.params.rho == pytest.approx(free.params.rho, abs=1e-5)

    def test_delta0_out_of_range(self, ome):
        with pytest.raises(ModelDomainError):
            fit_constrained(ome, 1.0)
        with pytest.raises(ModelDomainError):
            fit_constrained(ome, -1.5)

    def test_never_beats_free_fit(self, rng):
        for _ in range(200):
            t = random_table(rng, min_group_organs=2)
            delta0 = rng.uniform(-0.8, 0.8)
            free = fit_unconstrained(t)
            fixed = fit_constrained(t, delta0)
            assert fixed.loglik <= free.loglik + 1e-9 * (1 + abs(free.loglik))


def _profile_grid_max(table, n_grid=200):
    """Independent optimum bound: profile the two group probabilities
    separately at each correlation value on a grid."""
    counts1 = tuple(float(v) for v in table.group_counts(0)) + (0.0,) * 5
    counts2 = (0.0,) * 5 + tuple(float(v) for v in table.group_counts(1))
    eps = 1e-9
    pis = np.linspace(eps, 1 - eps, n_grid)
    best = -np.inf
    for rho in np.linspace(-0.999, 1 - eps, n_grid):
        ok = rho_lower_bound(pis) <= rho
        if not ok.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            f1 = _loglik_counts(counts1, 0.0, pis[ok], rho)
            f2 = _loglik_counts(counts2, 0.0, pis[ok], rho)
        best = max(best, np.max(f1) + np.max(f2))
    return best


def test_grid_oracle_optimality(rng):
    """On tiny tables the fitted optimum beats a dense grid search."""
    for _ in range(100):
        t = random_table(rng, max_count=10, min_group_organs=1)
        fit = fit_unconstrained(t)
        assert fit.loglik >= _profile_grid_max(t) - 1e-6


class TestSchur:
    def test_identity(self):
        assert schur_var_delta(np.eye(3)) == pytest.approx(1.0)

    def test_block_diagonal(self):
        assert schur_var_delta(np.diag([4.0, 2.0, 2.0])) == pytest.approx(0.25)

    def test_matches_full_inverse_at_ome_fit(self, ome):
        fit = fit_unconstrained(ome)
        info = fisher_information(ome, fit.params)
        direct = np.linalg.inv(info)[0, 0]
        assert schur_var_delta(info) == pytest.approx(direct, rel=1e-10)

    def test_singular_block_raises(self):
        m = np.eye(3)
        m[1, 1] = m[2, 2] = 0.0
        with pytest.raises(SingularInformationError, match="unavailable"):
            schur_var_delta(m)

    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            schur_var_delta(np.eye(2))


def test_fit_options_validation():
    with pytest.raises(ValueError):
        FitOptions(tolerance=0.0)
    with pytest.raises(ValueError):
        FitOptions(max_iterations=0)
