"""JSON-friendly dictionaries for reports and simulation summaries.

These shapes are the wire format of the HTTP service and the ``--format
json`` CLI output; versioned in ``docs/api.md``.
"""

from __future__ import annotations

import math

from .fit import FitResult
from .inference import TEST_NAMES, TestReport
from .simulate import SimSummary

__all__ = ["SCHEMA_VERSION", "fit_to_dict", "report_to_dict", "summary_to_dict"]

SCHEMA_VERSION = "1"


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def fit_to_dict(fit: FitResult) -> dict:
    p = fit.params
    return {
        "delta": p.delta,
        "pi1": p.pi1,
        "pi2": p.pi2,
        "rho": p.rho,
        "log_likelihood": _finite_or_none(fit.loglik),
        "converged": fit.converged,
        "iterations": fit.iterations,
        "boundary": fit.boundary,
        "rho_identified": fit.rho_identified,
    }


def report_to_dict(report: TestReport) -> dict:
    tests = {}
    for name, result in report.results().items():
        tests[name] = None if result is None else {
            "statistic": result.statistic,
            "p_value": result.p_value,
            "reject": result.reject,
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "delta0": report.delta0,
        "alpha": report.alpha,
        "tests": tests,
        "unconstrained": fit_to_dict(report.unconstrained),
        "constrained": fit_to_dict(report.constrained),
        "warnings": list(report.warnings),
    }


def summary_to_dict(summary: SimSummary) -> dict:
    c = summary.config
    tests = {}
    for name in TEST_NAMES:
        tr = summary.tests[name]
        entry = {
            "rate": _finite_or_none(tr.rate),
            "mc_se": _finite_or_none(tr.mc_se),
            "nonconverged": tr.nonconverged,
        }
        if tr.classification is not None:
            entry["classification"] = tr.classification
        tests[name] = entry
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": summary.kind,
        "config": {
            "pi1": c.pi1,
            "rho": c.rho,
            "delta_true": c.delta_true,
            "delta_null": c.delta_null,
            "m1": c.m1,
            "m2": c.m2,
            "n1": c.n1,
            "n2": c.n2,
            "replicates": c.replicates,
            "alpha": c.alpha,
            "seed": c.seed,
        },
        "tests": tests,
    }
