"""Likelihood-based tests for the risk difference between two groups.

Three statistics for ``H0: delta = delta0`` against a two-sided
alternative, each asymptotically chi-square with one degree of freedom:

* likelihood ratio: twice the log-likelihood gap between the free fit and
  the fixed-difference fit;
* Wald: squared distance of the difference estimate from ``delta0``,
  scaled by its asymptotic variance from the inverse information at the
  free fit;
* score: squared difference-score at the fixed-difference fit, scaled by
  the same variance entry evaluated there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .fit import (
    FitError,
    FitOptions,
    FitResult,
    SingularInformationError,
    fit_constrained,
    fit_unconstrained,
    schur_var_delta,
)
from .model import ModelDomainError, fisher_information, score_diff
from .tables import FrequencyTable

__all__ = [
    "TestReport",
    "TestResult",
    "chisq1_critical",
    "chisq1_pvalue",
    "lr_test",
    "run_all_tests",
    "score_test",
    "wald_test",
]

#: negative likelihood-ratio values above this magnitude are real errors,
#: below it they are roundoff and get clamped to zero
LR_ROUNDOFF = 1e-10

TEST_NAMES = ("lr", "wald", "score")


def chisq1_pvalue(q: float) -> float:
    """Upper-tail probability of the chi-square(1) distribution at ``q``.

    Equals ``erfc(sqrt(q / 2))``; accurate to double precision.
    """
    if q < 0:
        raise ValueError(f"statistic must be non-negative, got {q}")
    return math.erfc(math.sqrt(q / 2.0))


def chisq1_critical(alpha: float) -> float:
    """The ``1 - alpha`` quantile of chi-square(1)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if alpha == 0.0:
        return math.inf
    return NormalDist().inv_cdf(1.0 - alpha / 2.0) ** 2


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    reject: bool


@dataclass(frozen=True)
class TestReport:
    """All three tests of ``H0: delta = delta0`` on one table.

    A test entry is None when its ingredients were unavailable (fit did
    not converge, or the information was singular); the ``warnings`` tuple
    says why.
    """

    delta0: float
    alpha: float
    lr: TestResult | None
    wald: TestResult | None
    score: TestResult | None
    unconstrained: FitResult
    constrained: FitResult
    warnings: tuple[str, ...] = ()

    def results(self) -> dict[str, TestResult | None]:
        return {"lr": self.lr, "wald": self.wald, "score": self.score}


def _require_converged(fit: FitResult, what: str):
    if not fit.converged:
        raise FitError(
            f"{what} fit did not converge: {fit.iterations} iterations, "
            f"final step {fit.final_step_norm:.3g}, boundary={fit.boundary}")


def _lr_statistic(unconstrained: FitResult, constrained: FitResult) -> tuple[float, bool]:
    q = 2.0 * (unconstrained.loglik - constrained.loglik)
    if q < 0.0:
        if q < -LR_ROUNDOFF:
            raise FitError(
                f"constrained likelihood exceeds unconstrained by {-q / 2:.3g}; "
                "the free fit is not at its optimum")
        return 0.0, True
    return q, False


def _wald_statistic(unconstrained: FitResult, table: FrequencyTable,
                    delta0: float) -> float:
    info = fisher_information(table, unconstrained.params)
    var = schur_var_delta(info)
    return (unconstrained.params.delta - delta0) ** 2 / var


def _score_statistic(constrained: FitResult, table: FrequencyTable) -> tuple[float, float]:
    """Reduced-form score statistic and its full quadratic-form counterpart.

    At the fixed-difference optimum the score components for ``(pi1, rho)``
    vanish, so the quadratic form collapses to the difference component
    alone; both are returned so callers can check the collapse happened.
    """
    params = constrained.params
    u = score_diff(table, params)
    info = fisher_information(table, params)
    var = schur_var_delta(info)
    reduced = float(var * u[0] ** 2)
    full = float(u @ np.linalg.solve(info, u))
    return reduced, full


def lr_test(table: FrequencyTable, delta0: float,
            opts: FitOptions = FitOptions()) -> float:
    """Likelihood-ratio statistic; both fits must converge."""
    fit_u = fit_unconstrained(table, opts)
    _require_converged(fit_u, "unconstrained")
    fit_c = fit_constrained(table, delta0, opts)
    _require_converged(fit_c, "constrained")
    q, _ = _lr_statistic(fit_u, fit_c)
    return q


def wald_test(table: FrequencyTable, delta0: float,
              opts: FitOptions = FitOptions()) -> float:
    """Wald statistic; needs a converged free fit and invertible information."""
    fit_u = fit_unconstrained(table, opts)
    _require_converged(fit_u, "unconstrained")
    return _wald_statistic(fit_u, table, delta0)


def score_test(table: FrequencyTable, delta0: float,
               opts: FitOptions = FitOptions()) -> float:
    """Score statistic; needs a converged fixed-difference fit."""
    fit_c = fit_constrained(table, delta0, opts)
    _require_converged(fit_c, "constrained")
    reduced, _ = _score_statistic(fit_c, table)
    return reduced


def run_all_tests(table: FrequencyTable, delta0: float = 0.0,
                  opts: FitOptions = FitOptions(),
                  alpha: float = 0.05) -> TestReport:
    """Run all three tests sharing one free fit and one fixed-difference fit.

    Nonconvergence or a singular information does not raise here; the
    affected tests are reported as None with an explanatory warning, so a
    partial report (for example Wald missing) is still usable.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    crit = chisq1_critical(alpha)
    fit_u = fit_unconstrained(table, opts)
    fit_c = fit_constrained(table, delta0, opts)
    warnings: list[str] = []
    for name, fit in (("unconstrained", fit_u), ("constrained", fit_c)):
        if not fit.converged:
            warnings.append(f"nonconvergence:{name}")
        if fit.boundary != "interior":
            warnings.append(f"boundary:{name}:{fit.boundary}")

    def build(q: float) -> TestResult:
        q = float(q)
        return TestResult(statistic=q, p_value=chisq1_pvalue(q), reject=bool(q > crit))

    lr = wald = score = None
    if fit_u.converged and fit_c.converged:
        try:
            q, clamped = _lr_statistic(fit_u, fit_c)
            if clamped:
                warnings.append("lr_clamped_roundoff")
            lr = build(q)
        except FitError as exc:
            warnings.append(f"lr_unavailable:{exc}")
    if fit_u.converged:
        try:
            wald = build(_wald_statistic(fit_u, table, delta0))
        except (SingularInformationError, FitError, ModelDomainError) as exc:
            warnings.append(f"wald_unavailable:{exc}")
    if fit_c.converged:
        try:
            reduced, full = _score_statistic(fit_c, table)
            if abs(full - reduced) > 1e-6 * (1.0 + abs(reduced)):
                warnings.append("score_forms_disagree")
            score = build(reduced)
        except (SingularInformationError, FitError, ModelDomainError) as exc:
            warnings.append(f"score_unavailable:{exc}")

    return TestReport(delta0=delta0, alpha=alpha, lr=lr, wald=wald, score=score,
                      unconstrained=fit_u, constrained=fit_c,
                      warnings=tuple(warnings))
