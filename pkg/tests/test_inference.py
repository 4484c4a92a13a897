import math

import numpy as np
import pytest
from scipy import stats as sps

from rhodiff import (
    FitOptions,
    chisq1_critical,
    chisq1_pvalue,
    fit_unconstrained,
    lr_test,
    run_all_tests,
    score_test,
    wald_test,
)
from rhodiff.inference import _score_statistic
from rhodiff.simulate import SimConfig, sample_dataset
from rhodiff.fit import fit_constrained

from conftest import random_table


class TestChisq:
    def test_edge_values(self):
        assert chisq1_pvalue(0.0) == 1.0
        assert chisq1_pvalue(3.841459) == pytest.approx(0.05, abs=1e-6)
        assert chisq1_pvalue(0.0293) == pytest.approx(0.8641, abs=5e-4)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            chisq1_pvalue(-1e-9)

    def test_against_scipy(self):
        qs = np.concatenate([np.linspace(0, 40, 400), [1e-8, 1e-4, 100.0]])
        for q in qs:
            assert chisq1_pvalue(float(q)) == pytest.approx(
                float(sps.chi2.sf(q, 1)), abs=1e-12)

    def test_monotone_decreasing(self):
        qs = np.linspace(0.0, 20.0, 200)
        ps = [chisq1_pvalue(float(q)) for q in qs]
        assert all(0.0 <= p <= 1.0 for p in ps)
        assert all(a > b for a, b in zip(ps, ps[1:]))

    def test_critical_values(self):
        assert chisq1_critical(0.05) == pytest.approx(3.841459, abs=1e-6)
        assert chisq1_critical(1.0) == 0.0
        assert chisq1_critical(0.0) == math.inf
        assert chisq1_pvalue(chisq1_critical(0.32)) == pytest.approx(0.32, abs=1e-12)


class TestGoldenStatistics:
    def test_ome(self, ome):
        assert lr_test(ome, 0.0) == pytest.approx(0.0293, abs=1e-4)
        assert wald_test(ome, 0.0) == pytest.approx(0.0293, abs=1e-4)
        assert score_test(ome, 0.0) == pytest.approx(0.0293, abs=1e-4)

    def test_orthok(self, orthok):
        assert lr_test(orthok, 0.0) == pytest.approx(3.1689, abs=1e-3)
        assert wald_test(orthok, 0.0) == pytest.approx(3.7843, abs=1e-3)
        assert score_test(orthok, 0.0) == pytest.approx(2.9671, abs=1e-3)

    def test_ome_pvalues(self, ome):
        report = run_all_tests(ome, 0.0)
        for res in report.results().values():
            assert res.p_value == pytest.approx(0.8641, abs=5e-4)
            assert not res.reject

    def test_orthok_pvalues(self, orthok):
        report = run_all_tests(orthok, 0.0)
        assert report.lr.p_value == pytest.approx(0.0751, abs=5e-4)
        assert report.wald.p_value == pytest.approx(0.0517, abs=5e-4)
        assert report.score.p_value == pytest.approx(0.0850, abs=5e-4)
        assert not any(r.reject for r in report.results().values())


class TestInactiveConstraint:
    def test_statistics_vanish_at_free_estimate(self, ome):
        delta_hat = fit_unconstrained(ome).params.delta
        assert lr_test(ome, delta_hat) == pytest.approx(0.0, abs=1e-8)
        assert wald_test(ome, delta_hat) == pytest.approx(0.0, abs=1e-12)
        assert score_test(ome, delta_hat) == pytest.approx(0.0, abs=1e-8)


class TestGroupSwap:
    # swap symmetry holds at the exact optimum; fit tightly so the residual
    # non-stationarity does not mask it
    OPTS = FitOptions(tolerance=1e-10)

    def test_statistics_invariant(self, ome, orthok, rng):
        tables = [ome, orthok] + [random_table(rng, min_group_organs=2)
                                  for _ in range(30)]
        for t in tables:
            a = run_all_tests(t, 0.0, self.OPTS)
            b = run_all_tests(t.swapped(), 0.0, self.OPTS)
            if a.lr and b.lr:
                assert b.lr.statistic == pytest.approx(a.lr.statistic, abs=1e-8)
            if a.wald and b.wald:
                assert b.wald.statistic == pytest.approx(a.wald.statistic, abs=1e-8)
            if a.score and b.score:
                assert b.score.statistic == pytest.approx(a.score.statistic, abs=1e-8)

    def test_swap_with_negated_null(self, rng):
        for _ in range(20):
            t = random_table(rng, min_group_organs=2)
            d0 = float(rng.uniform(-0.3, 0.3))
            a = run_all_tests(t, d0, self.OPTS)
            b = run_all_tests(t.swapped(), -d0, self.OPTS)
            if a.lr and b.lr:
                assert b.lr.statistic == pytest.approx(a.lr.statistic, abs=1e-8)
            if a.wald and b.wald:
                assert b.wald.statistic == pytest.approx(a.wald.statistic, abs=1e-8)
            if a.score and b.score:
                assert b.score.statistic == pytest.approx(a.score.statistic, abs=1e-8)


class TestScoreForms:
    def test_reduced_equals_full_quadratic(self, ome, orthok, rng):
        tables = [ome, orthok] + [random_table(rng, min_group_organs=4)
                                  for _ in range(50)]
        opts = FitOptions(tolerance=1e-9)
        for t in tables:
            fit = fit_constrained(t, 0.0, opts)
            if not (fit.converged and fit.boundary == "interior"
                    and fit.rho_identified):
                continue
            reduced, full = _score_statistic(fit, t)
            assert full == pytest.approx(reduced, abs=1e-8 * (1 + reduced))


def test_large_sample_statistics_agree():
    """With huge groups the three statistics coincide to first order."""
    config = SimConfig(pi1=0.3, rho=0.4, delta_true=0.0, delta_null=0.0,
                       m1=5000, m2=5000, n1=5000, n2=5000,
                       replicates=1, seed=2024)
    for r in range(8):
        table = sample_dataset(config, r)
        report = run_all_tests(table, 0.0)
        qs = [report.lr.statistic, report.wald.statistic, report.score.statistic]
        if max(qs) < 1e-3:  # all tiny: relative comparison meaningless
            continue
        assert max(qs) <= min(qs) * 1.05 + 1e-6


def test_partial_report_on_nonconvergence(ome):
    report = run_all_tests(ome, 0.0, FitOptions(max_iterations=1))
    assert report.lr is None
    assert any(w.startswith("nonconvergence") for w in report.warnings)


def test_rejection_decision_exposed(orthok):
    report = run_all_tests(orthok, 0.0, alpha=0.10)
    assert report.wald.reject  # p = 0.0517 < 0.10
    assert report.alpha == 0.10
