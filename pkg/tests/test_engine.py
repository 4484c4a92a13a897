"""The vectorized batch engine must agree with the scalar fitters."""

import numpy as np
import pytest

from rhodiff import FitOptions, fit_constrained, fit_unconstrained, run_all_tests
from rhodiff.engine import (
    batch_statistics,
    counts_from_table,
    fit_constrained_batch,
    fit_unconstrained_batch,
)
from rhodiff.tables import FrequencyTable

from conftest import random_table


def _stack(tables):
    cols = [t.group_counts(0) + t.group_counts(1) for t in tables]
    arr = np.array(cols, dtype=float)
    return tuple(arr[:, k] for k in range(10))


def test_unconstrained_matches_scalar(rng):
    tables = [random_table(rng, min_group_organs=2) for _ in range(300)]
    batch = fit_unconstrained_batch(_stack(tables))
    for i, t in enumerate(tables):
        scalar = fit_unconstrained(t)
        assert batch.converged[i] == scalar.converged
        if not scalar.converged:
            continue
        assert batch.loglik[i] == pytest.approx(scalar.loglik, abs=1e-8)
        assert batch.delta[i] == pytest.approx(scalar.params.delta, abs=1e-7)
        assert batch.pi1[i] == pytest.approx(scalar.params.pi1, abs=1e-7)
        assert batch.rho[i] == pytest.approx(scalar.params.rho, abs=1e-6)
        assert batch.rho_identified[i] == scalar.rho_identified


def test_constrained_matches_scalar(rng):
    tables = [random_table(rng, min_group_organs=2) for _ in range(300)]
    delta0 = 0.15
    batch = fit_constrained_batch(_stack(tables), delta0)
    for i, t in enumerate(tables):
        try:
            scalar = fit_constrained(t, delta0)
        except Exception:
            continue
        assert batch.converged[i] == scalar.converged
        if not scalar.converged:
            continue
        assert batch.loglik[i] == pytest.approx(scalar.loglik, abs=1e-8)
        assert batch.pi1[i] == pytest.approx(scalar.params.pi1, abs=1e-6)
        assert batch.rho[i] == pytest.approx(scalar.params.rho, abs=1e-6)


def test_statistics_match_report(ome, orthok, rng):
    tables = [ome, orthok] + [random_table(rng, min_group_organs=4)
                              for _ in range(100)]
    stats = batch_statistics(_stack(tables), 0.0)
    for i, t in enumerate(tables):
        report = run_all_tests(t, 0.0)
        if report.lr is not None and stats.lr_ok[i]:
            assert max(stats.q_lr[i], 0.0) == pytest.approx(
                report.lr.statistic, abs=1e-7)
        if report.wald is not None and stats.wald_ok[i]:
            assert stats.q_wald[i] == pytest.approx(report.wald.statistic, abs=1e-6)
        if report.score is not None and stats.score_ok[i]:
            assert stats.q_score[i] == pytest.approx(report.score.statistic, abs=1e-6)


def test_counts_from_table_roundtrip(ome):
    counts = counts_from_table(ome)
    assert len(counts) == 10
    assert [c[0] for c in counts] == list(map(float, ome.group_counts(0)
                                              + ome.group_counts(1)))


def test_invalid_lane_flagged():
    t_ok = FrequencyTable.from_counts((3, 2, 1, 4, 5), (2, 2, 2, 2, 2))
    t_bad = FrequencyTable.from_counts((0, 0, 0, 0, 0), (1, 1, 1, 1, 1))
    batch = fit_unconstrained_batch(_stack([t_ok, t_bad]))
    assert batch.converged[0]
    assert not batch.converged[1]
