"""Constant-correlation probability model for paired-organ binary data.

One group with response probability ``pi`` and within-subject correlation
``rho`` puts a bilateral subject in cells

    p2 = pi * (pi + (1 - pi) * rho)         both organs respond
    p1 = 2 * pi * (1 - pi) * (1 - rho)      exactly one responds
    p0 = (1 - pi) * (1 - pi + pi * rho)     neither responds

and a unilateral subject responds with probability ``pi``.  This module
holds the parameter containers, both log-likelihood parameterizations
(group probabilities vs. risk difference), the analytic score and the
expected (Fisher) information.

Everything here is a pure function; the formula helpers prefixed with an
underscore accept numpy arrays so batch callers can evaluate many tables
elementwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .tables import FrequencyTable

__all__ = [
    "CellProbs",
    "DeltaParams",
    "GroupParams",
    "ModelDomainError",
    "cell_probs",
    "fisher_information",
    "loglik_diff",
    "loglik_groups",
    "rho_lower_bound",
    "score_diff",
]


class ModelDomainError(ValueError):
    """Parameter values outside the admissible region."""


def rho_lower_bound(pi):
    """Smallest correlation keeping all three bilateral cells non-negative.

    ``p2 >= 0`` needs ``rho >= -pi/(1-pi)`` and ``p0 >= 0`` needs
    ``rho >= -(1-pi)/pi``; the binding one depends on which side of 1/2
    ``pi`` falls.  Array-safe.
    """
    pi = np.asarray(pi, dtype=float)
    bound = np.maximum(-pi / (1.0 - pi), -(1.0 - pi) / pi)
    return bound if bound.ndim else float(bound)


def _cells(pi, rho):
    p2 = pi * (pi + (1.0 - pi) * rho)
    p1 = 2.0 * pi * (1.0 - pi) * (1.0 - rho)
    p0 = (1.0 - pi) * (1.0 - pi + pi * rho)
    return p0, p1, p2



@dataclass(frozen=True)
class CellProbs:
    """Trinomial cell probabilities (0, 1, 2 responding organs) for one group."""

    p0: float
    p1: float
    p2: float

    def __post_init__(self):
        for name in ("p0", "p1", "p2"):
            v = getattr(self, name)
            if not (-1e-12 <= v <= 1.0 + 1e-12):
                raise ModelDomainError(f"cell {name}={v} outside [0, 1]")
        if abs(self.p0 + self.p1 + self.p2 - 1.0) > 1e-12:
            raise ModelDomainError(
                f"cells sum to {self.p0 + self.p1 + self.p2}, expected 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p0, self.p1, self.p2)


def cell_probs(pi: float, rho: float) -> CellProbs:
    """Cell probabilities for one group; rejects any negative cell by name."""
    if not 0.0 < pi < 1.0:
        raise ModelDomainError(f"pi={pi} must lie strictly inside (0, 1)")
    if rho > 1.0:
        raise ModelDomainError(f"rho={rho} > 1 makes cell p1 negative")
    p0, p1, p2 = _cells(float(pi), float(rho))
    tol = 1e-15
    if p2 < -tol:
        raise ModelDomainError(
            f"cell p2={p2} negative: rho={rho} below -pi/(1-pi)={-pi/(1-pi)}")
    if p0 < -tol:
        raise ModelDomainError(
            f"cell p0={p0} negative: rho={rho} below -(1-pi)/pi={-(1 - pi)/pi}")
    return CellProbs(p0=max(p0, 0.0), p1=max(p1, 0.0), p2=max(p2, 0.0))


@dataclass(frozen=True)
class GroupParams:
    """Model parameters as per-group response probabilities ``(pi1, pi2, rho)``."""

    pi1: float
    pi2: float
    rho: float

    def __post_init__(self):
        for name in ("pi1", "pi2"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ModelDomainError(f"{name}={v} must lie strictly inside (0, 1)")
        if self.rho >= 1.0:
            raise ModelDomainError(f"rho={self.rho} must be below 1")
        lo = max(rho_lower_bound(self.pi1), rho_lower_bound(self.pi2))
        if self.rho < lo:
            raise ModelDomainError(
                f"rho={self.rho} below admissible lower bound {lo} "
                f"for pi1={self.pi1}, pi2={self.pi2} (a bilateral cell goes negative)")

    def to_delta(self) -> "DeltaParams":
        return DeltaParams(delta=self.pi2 - self.pi1, pi1=self.pi1, rho=self.rho)


@dataclass(frozen=True)
class DeltaParams:
    """Model parameters as ``(delta, pi1, rho)`` with ``pi2 = pi1 + delta``.

    ``delta`` is the risk difference between group 2 and group 1.
    """

    delta: float
    pi1: float
    rho: float

    def __post_init__(self):
        if not -1.0 < self.delta < 1.0:
            raise ModelDomainError(f"delta={self.delta} must lie in (-1, 1)")
        # remaining admissibility checks are shared with GroupParams
        self.to_group()

    @property
    def pi2(self) -> float:
        return self.delta + self.pi1

    def to_group(self) -> GroupParams:
        return GroupParams(pi1=self.pi1, pi2=self.delta + self.pi1, rho=self.rho)

    def swapped(self) -> "DeltaParams":
        """Parameters describing the same model with group columns exchanged."""
        return DeltaParams(delta=-self.delta, pi1=self.pi1 + self.delta, rho=self.rho)

    def is_interior(self, margin: float = 0.0) -> bool:
        """Whether all six cells and both unilateral probabilities are positive."""
        lo = max(rho_lower_bound(self.pi1), rho_lower_bound(self.pi2))
        return (margin < self.pi1 < 1.0 - margin
                and margin < self.pi2 < 1.0 - margin
                and lo + margin < self.rho < 1.0 - margin)

    def require_interior(self):
        if not self.is_interior():
            raise ModelDomainError(
                f"parameters {self} sit on the admissible boundary; "
                "score and information need a strictly interior point")


def _group_loglik(x0, x1, x2, y0, y1, pi, rho):
    """Log-likelihood contribution of one group, multinomial constant dropped.

    Zero counts tolerate zero cells (0 * log 0 = 0); a positive count on a
    zero cell yields -inf.  Array-safe.
    """
    p0, p1, p2 = _cells(pi, rho)
    return (xlogy(x0, p0) + xlogy(x1, p1) + xlogy(x2, p2)
            + xlogy(y0, 1.0 - pi) + xlogy(y1, pi))


def _group_pi_score(x0, x1, x2, y0, y1, pi, rho):
    """d/dpi of one group's log-likelihood contribution.  Array-safe."""
    u = 1.0 - (1.0 - rho) * pi
    v = rho + (1.0 - rho) * pi
    return (-(x0 + x1 + y0) / (1.0 - pi) + (x1 + x2 + y1) / pi
            - x0 * (1.0 - rho) / u + x2 * (1.0 - rho) / v)


def _group_rho_score(x0, x1, x2, pi, rho):
    """d/drho of one group's contribution; unilateral terms drop out."""
    u = 1.0 - (1.0 - rho) * pi
    v = rho + (1.0 - rho) * pi
    return x0 * pi / u + x2 * (1.0 - pi) / v - x1 / (1.0 - rho)


def _group_rho_curvature(x0, x1, x2, pi, rho):
    """d2/drho2 of one group's contribution; negative wherever counts are."""
    u = 1.0 - (1.0 - rho) * pi
    v = rho + (1.0 - rho) * pi
    return -(x0 * pi**2 / u**2 + x1 / (1.0 - rho) ** 2
             + x2 * (1.0 - pi) ** 2 / v**2)


def _loglik_counts(counts, delta, pi1, rho):
    """Log-likelihood over unpacked counts; ``counts`` is the 10-tuple
    ``(x0_1, x1_1, x2_1, y0_1, y1_1, x0_2, x1_2, x2_2, y0_2, y1_2)``."""
    pi2 = delta + pi1
    return (_group_loglik(*counts[:5], pi1, rho)
            + _group_loglik(*counts[5:], pi2, rho))


def _score_counts(counts, delta, pi1, rho):
    """Score vector ``(d/ddelta, d/dpi1, d/drho)`` over unpacked counts."""
    pi2 = delta + pi1
    g1 = _group_pi_score(*counts[:5], pi1, rho)
    g2 = _group_pi_score(*counts[5:], pi2, rho)
    r1 = _group_rho_score(counts[0], counts[1], counts[2], pi1, rho)
    r2 = _group_rho_score(counts[5], counts[6], counts[7], pi2, rho)
    return g2, g1 + g2, r1 + r2


def _info_elements(big_m1, big_m2, big_n1, big_n2, delta, pi1, rho):
    """Distinct entries of the expected information in (delta, pi1, rho) order.

    Only the group sizes enter: expectations replace the observed counts.
    Returns ``(I_dd, I_dr, I_pp, I_pr, I_rr)``; the delta/pi1 cross entry
    equals ``I_dd`` because delta moves group 2 alone.  Array-safe.
    """
    pi2 = delta + pi1
    u1 = 1.0 - (1.0 - rho) * pi1
    v1 = rho + (1.0 - rho) * pi1
    u2 = 1.0 - (1.0 - rho) * pi2
    v2 = rho + (1.0 - rho) * pi2
    corr = rho * (1.0 - rho**2)
    i_dd = (big_m2 * (2.0 - rho) + big_n2) / (pi2 * (1.0 - pi2)) - big_m2 * corr / (u2 * v2)
    i_dr = big_m2 * rho * (2.0 * pi2 - 1.0) / (u2 * v2)
    i_pp = ((big_m1 * (2.0 - rho) + big_n1) / (pi1 * (1.0 - pi1))
            - big_m1 * corr / (u1 * v1)) + i_dd
    i_pr = big_m1 * rho * (2.0 * pi1 - 1.0) / (u1 * v1) + i_dr
    i_rr = (big_m1 * (1.0 + rho) * pi1 * (1.0 - pi1) / ((1.0 - rho) * u1 * v1)
            + big_m2 * (1.0 + rho) * pi2 * (1.0 - pi2) / ((1.0 - rho) * u2 * v2))
    return i_dd, i_dr, i_pp, i_pr, i_rr


def loglik_groups(table: FrequencyTable, params: GroupParams) -> float:
    """Log-likelihood under ``(pi1, pi2, rho)``, constant term dropped."""
    return float(_group_loglik(*table.group_counts(0), params.pi1, params.rho)
                 + _group_loglik(*table.group_counts(1), params.pi2, params.rho))


def loglik_diff(table: FrequencyTable, params: DeltaParams) -> float:
    """Log-likelihood under ``(delta, pi1, rho)``; agrees with
    :func:`loglik_groups` after conversion."""
    counts = table.group_counts(0) + table.group_counts(1)
    return float(_loglik_counts(counts, params.delta, params.pi1, params.rho))


def score_diff(table: FrequencyTable, params: DeltaParams) -> np.ndarray:
    """Analytic gradient of :func:`loglik_diff`, ordered (delta, pi1, rho)."""
    params.require_interior()
    counts = table.group_counts(0) + table.group_counts(1)
    return np.array(_score_counts(counts, params.delta, params.pi1, params.rho),
                    dtype=float)


def fisher_information(table: FrequencyTable, params: DeltaParams) -> np.ndarray:
    """Expected information matrix, 3x3 symmetric, ordered (delta, pi1, rho).

    Depends on the table only through the four group sizes.
    """
    params.require_interior()
    big_m1, big_m2 = map(float, table.bilateral_totals)
    big_n1, big_n2 = map(float, table.unilateral_totals)
    i_dd, i_dr, i_pp, i_pr, i_rr = _info_elements(
        big_m1, big_m2, big_n1, big_n2, params.delta, params.pi1, params.rho)
    return np.array([[i_dd, i_dd, i_dr],
                     [i_dd, i_pp, i_pr],
                     [i_dr, i_pr, i_rr]])


def loglik_is_finite(value: float) -> bool:
    """True unless the -inf zero-cell sentinel (or nan) was hit."""
    return math.isfinite(value)
