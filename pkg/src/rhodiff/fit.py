"""Maximum-likelihood fitting: unconstrained and fixed-difference fits.

The unconstrained fit alternates closed-form probability updates (cubic
root at the current correlation) with safeguarded Newton steps on the
correlation, stopping on the correlation increment.  The fixed-difference
fit runs Fisher scoring on ``(pi1, rho)`` with the 2x2 information block,
stopping on the Euclidean step norm.  Both project proposals into the
admissible box and halve steps that fail to improve the likelihood, so the
iterate likelihood never decreases; fits that settle on the lower
correlation boundary get a slide along the boundary curve, where
coordinate schemes otherwise stall at corner points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .boundary import polish_boundary_constrained, polish_boundary_unconstrained
from .cubic import pi_update
from .model import (
    DeltaParams,
    ModelDomainError,
    _group_rho_curvature,
    _group_rho_score,
    _info_elements,
    _loglik_counts,
    _score_counts,
    rho_lower_bound,
)
from .tables import FrequencyTable

__all__ = [
    "FitError",
    "FitOptions",
    "FitResult",
    "SingularInformationError",
    "fit_constrained",
    "fit_unconstrained",
    "schur_var_delta",
]

#: hard clamp keeping iterates strictly inside the admissible region
CLAMP = 1e-10
#: maximum number of step halvings within one iteration
MAX_HALVINGS = 30

BoundaryFlag = Literal["interior", "pi_clamped", "rho_clamped"]


class FitError(RuntimeError):
    """Fitting could not be carried out on the given inputs."""


class SingularInformationError(FitError):
    """The information (block) is singular; Wald and score tests are unavailable."""


@dataclass(frozen=True)
class FitOptions:
    """Iteration controls shared by both fitters."""

    tolerance: float = 1e-6
    max_iterations: int = 500
    rho_init: float = 0.0
    pi_init: float | None = None  # None selects the pooled success proportion

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class FitResult:
    """A fitted parameter point with convergence diagnostics.

    ``boundary`` records whether any iterate had to be clamped
    (``pi_clamped`` wins if both kinds occurred).  ``rho_identified`` is
    False when the table carries no bilateral subjects at all, in which
    case the reported correlation is just the starting value.
    """

    params: DeltaParams
    loglik: float
    iterations: int
    converged: bool
    boundary: BoundaryFlag
    final_step_norm: float
    rho_identified: bool = True


def _pooled_success(table: FrequencyTable) -> float:
    """Overall fraction of responding organs, both groups pooled."""
    organs = int(table.organ_totals.sum())
    return float(table.success_totals.sum()) / organs


def _clip(value, lo, hi):
    return min(hi, max(lo, value))


class _UnconstrainedState:
    """Mutable iteration state so the boundary polish can resume the loop."""

    def __init__(self, g1, g2, rho):
        self.g1 = g1
        self.g2 = g2
        self.counts = g1 + g2
        self.pi1 = math.nan
        self.pi2 = math.nan
        self.rho = rho
        self.pi_clamped = False
        self.rho_clamped = False
        self.converged = False
        self.step_norm = math.inf
        self.iterations = 0

    def iterate(self, opts: FitOptions):
        self.converged = False
        for _ in range(opts.max_iterations - self.iterations):
            self.iterations += 1
            # at negative correlation only probabilities inside
            # [-rho/(1-rho), 1/(1-rho)] keep every cell non-negative
            win = -self.rho / (1.0 - self.rho) if self.rho < 0.0 else 0.0
            pi_lo = max(CLAMP, win + CLAMP)
            pi_hi = min(1.0 - CLAMP, 1.0 - win - CLAMP)
            new_pi1 = pi_update(self.g1, self.rho)
            new_pi2 = pi_update(self.g2, self.rho)
            if not pi_lo <= new_pi1 <= pi_hi or not pi_lo <= new_pi2 <= pi_hi:
                self.pi_clamped = True
            new_pi1 = _clip(new_pi1, pi_lo, pi_hi)
            new_pi2 = _clip(new_pi2, pi_lo, pi_hi)
            if not math.isnan(self.pi1):
                # a window-clamped update may not improve; keep the old pair
                # rather than accept a likelihood decrease
                old = _loglik_counts(self.counts, self.pi2 - self.pi1,
                                     self.pi1, self.rho)
                new = _loglik_counts(self.counts, new_pi2 - new_pi1,
                                     new_pi1, self.rho)
                if not new >= old - 1e-13:
                    new_pi1, new_pi2 = self.pi1, self.pi2
            pi_step = (0.0 if math.isnan(self.pi1)
                       else max(abs(new_pi1 - self.pi1), abs(new_pi2 - self.pi2)))
            pi1, pi2 = self.pi1, self.pi2 = new_pi1, new_pi2

            score = (_group_rho_score(self.g1[0], self.g1[1], self.g1[2], pi1, self.rho)
                     + _group_rho_score(self.g2[0], self.g2[1], self.g2[2], pi2, self.rho))
            curv = (_group_rho_curvature(self.g1[0], self.g1[1], self.g1[2], pi1, self.rho)
                    + _group_rho_curvature(self.g2[0], self.g2[1], self.g2[2], pi2, self.rho))
            raw_step = 0.0 if curv == 0.0 else -score / curv

            lo = max(rho_lower_bound(pi1), rho_lower_bound(pi2)) + CLAMP
            hi = 1.0 - CLAMP
            base = _loglik_counts(self.counts, pi2 - pi1, pi1, self.rho)
            step = raw_step
            new_rho = self.rho
            for _ in range(MAX_HALVINGS + 1):
                proposal = _clip(self.rho + step, lo, hi)
                if _loglik_counts(self.counts, pi2 - pi1, pi1, proposal) >= base - 1e-13:
                    new_rho = proposal
                    if proposal != self.rho + step:
                        self.rho_clamped = True
                    break
                step *= 0.5

            self.step_norm = abs(new_rho - self.rho)
            self.rho = new_rho
            # Near the correlation walls the Newton step shrinks with the
            # wall distance (likelihood pole), so a small raw increment does
            # not mean stationarity; scale the criterion by the distance.
            # An exactly pinned iterate is a boundary optimum.
            wall = min(1.0, hi - self.rho, self.rho - lo + CLAMP)
            if (self.step_norm == 0.0 or self.step_norm < opts.tolerance * wall) \
                    and pi_step < 100.0 * opts.tolerance:
                self.converged = True
                return


def fit_unconstrained(table: FrequencyTable, opts: FitOptions = FitOptions()) -> FitResult:
    """Maximize the likelihood over ``(delta, pi1, rho)``.

    Each iteration updates both group probabilities by the cubic closed
    form at the current correlation, then takes one safeguarded Newton
    step on the correlation.  Convergence requires the correlation
    increment below ``opts.tolerance`` (scaled near the admissibility
    walls) with the probability increments below ``100 * opts.tolerance``.
    """
    table.require_data_in_both_groups()
    g1 = tuple(float(v) for v in table.group_counts(0))
    g2 = tuple(float(v) for v in table.group_counts(1))
    has_bilateral = (g1[0] + g1[1] + g1[2] + g2[0] + g2[1] + g2[2]) > 0

    state = _UnconstrainedState(g1, g2, _clip(opts.rho_init, -1.0 + CLAMP, 1.0 - CLAMP))
    state.iterate(opts)

    # a fit resting on the lower correlation boundary can be corner-stuck:
    # no single-coordinate move improves, but sliding along the boundary
    # curve does; polish and resume wherever the slide helps
    for _ in range(2):
        floor = max(rho_lower_bound(state.pi1), rho_lower_bound(state.pi2))
        if state.rho - floor > CLAMP + 1e-9 or state.iterations >= opts.max_iterations:
            break
        arrays = tuple(np.array([v]) for v in state.counts)
        ll = _loglik_counts(state.counts, state.pi2 - state.pi1, state.pi1, state.rho)
        p1a, p2a, ra, _, improved = polish_boundary_unconstrained(
            arrays, np.array([state.pi1]), np.array([state.pi2]), np.array([ll]))
        if not improved[0]:
            break
        state.pi1 = _clip(float(p1a[0]), CLAMP, 1.0 - CLAMP)
        state.pi2 = _clip(float(p2a[0]), CLAMP, 1.0 - CLAMP)
        state.rho = _clip(float(ra[0]), -1.0 + CLAMP, 1.0 - CLAMP)
        state.rho_clamped = True
        state.iterate(opts)

    params = DeltaParams(delta=state.pi2 - state.pi1, pi1=state.pi1, rho=state.rho)
    boundary = ("pi_clamped" if state.pi_clamped
                else ("rho_clamped" if state.rho_clamped else "interior"))
    return FitResult(params=params,
                     loglik=float(_loglik_counts(state.counts, params.delta,
                                                 state.pi1, state.rho)),
                     iterations=state.iterations,
                     converged=state.converged,
                     boundary=boundary,
                     final_step_norm=state.step_norm,
                     rho_identified=has_bilateral)


class _ConstrainedState:
    """Mutable Fisher-scoring state for the fixed-difference fit."""

    def __init__(self, counts, delta0, big, pi1, rho, pi_lo, pi_hi, has_bilateral):
        self.counts = counts
        self.delta0 = delta0
        self.big = big
        self.pi1 = pi1
        self.rho = rho
        self.pi_lo = pi_lo
        self.pi_hi = pi_hi
        self.has_bilateral = has_bilateral
        self.pi_clamped = False
        self.rho_clamped = False
        self.converged = False
        self.step_norm = math.inf
        self.iterations = 0

    def iterate(self, opts: FitOptions):
        self.converged = False
        delta0 = self.delta0
        for _ in range(opts.max_iterations - self.iterations):
            self.iterations += 1
            _, u_pi, u_rho = _score_counts(self.counts, delta0, self.pi1, self.rho)
            _, _, i_pp, i_pr, i_rr = _info_elements(
                *self.big, delta0, self.pi1, self.rho)
            det = i_pp * i_rr - i_pr * i_pr
            if not math.isfinite(det) or det <= 0.0:
                if not self.has_bilateral:
                    # correlation carries no information; score on pi1 alone
                    step_pi, step_rho = u_pi / i_pp, 0.0
                else:
                    raise SingularInformationError(
                        f"information block singular at pi1={self.pi1}, "
                        f"rho={self.rho} (det={det})")
            else:
                step_pi = (i_rr * u_pi - i_pr * u_rho) / det
                step_rho = (i_pp * u_rho - i_pr * u_pi) / det

            base = _loglik_counts(self.counts, delta0, self.pi1, self.rho)
            s_pi, s_rho = step_pi, step_rho
            new_pi1, new_rho = self.pi1, self.rho
            for _ in range(MAX_HALVINGS + 1):
                prop_pi = _clip(self.pi1 + s_pi, self.pi_lo, self.pi_hi)
                lo = max(rho_lower_bound(prop_pi),
                         rho_lower_bound(delta0 + prop_pi)) + CLAMP
                prop_rho = _clip(self.rho + s_rho, lo, 1.0 - CLAMP)
                if _loglik_counts(self.counts, delta0, prop_pi, prop_rho) >= base - 1e-13:
                    new_pi1, new_rho = prop_pi, prop_rho
                    if prop_pi != self.pi1 + s_pi:
                        self.pi_clamped = True
                    if prop_rho != self.rho + s_rho:
                        self.rho_clamped = True
                    break
                s_pi *= 0.5
                s_rho *= 0.5

            self.step_norm = math.hypot(new_pi1 - self.pi1, new_rho - self.rho)
            lo_new = max(rho_lower_bound(new_pi1),
                         rho_lower_bound(delta0 + new_pi1)) + CLAMP
            self.pi1, self.rho = new_pi1, new_rho
            if self.step_norm < opts.tolerance:
                # block convergence when pinned at a clamp with an inward
                # score (likelihood poles shrink the step near the clamps)
                _, g_pi, g_rho = _score_counts(self.counts, delta0, self.pi1, self.rho)
                pole_stuck = ((self.rho >= 1.0 - CLAMP and g_rho < -1e-8)
                              or (self.rho <= lo_new and g_rho > 1e-8)
                              or (self.pi1 >= self.pi_hi and g_pi < -1e-8)
                              or (self.pi1 <= self.pi_lo and g_pi > 1e-8))
                if not pole_stuck:
                    self.converged = True
                    return


def fit_constrained(table: FrequencyTable, delta0: float,
                    opts: FitOptions = FitOptions()) -> FitResult:
    """Maximize the likelihood over ``(pi1, rho)`` with the difference fixed.

    Fisher scoring with the 2x2 information block of ``(pi1, rho)``;
    proposals are projected into the admissible box and halved while the
    likelihood decreases.  Stops when the Euclidean step norm falls below
    ``opts.tolerance``.
    """
    if not -1.0 < delta0 < 1.0:
        raise ModelDomainError(f"delta0={delta0} must lie in (-1, 1)")
    table.require_data_in_both_groups()
    counts = tuple(float(v) for v in table.group_counts(0) + table.group_counts(1))
    big = (float(table.bilateral_totals[0]), float(table.bilateral_totals[1]),
           float(table.unilateral_totals[0]), float(table.unilateral_totals[1]))
    has_bilateral = (big[0] + big[1]) > 0

    pi_lo = max(CLAMP, -delta0 + CLAMP)
    pi_hi = min(1.0 - CLAMP, 1.0 - delta0 - CLAMP)
    if pi_lo >= pi_hi:
        raise ModelDomainError(f"no feasible pi1 for delta0={delta0}")

    eps0 = 1e-6
    init = opts.pi_init if opts.pi_init is not None else _pooled_success(table)
    pi1 = _clip(init, max(eps0, -delta0 + eps0), min(1.0 - eps0, 1.0 - delta0 - eps0))
    rho = _clip(opts.rho_init, -1.0 + CLAMP, 1.0 - CLAMP)

    state = _ConstrainedState(counts, delta0, big, pi1, rho, pi_lo, pi_hi,
                              has_bilateral)
    state.iterate(opts)

    for _ in range(2):
        floor = max(rho_lower_bound(state.pi1), rho_lower_bound(delta0 + state.pi1))
        if state.rho - floor > CLAMP + 1e-9 or state.iterations >= opts.max_iterations:
            break
        arrays = tuple(np.array([v]) for v in counts)
        ll = _loglik_counts(counts, delta0, state.pi1, state.rho)
        p1a, ra, _, improved = polish_boundary_constrained(
            arrays, delta0, np.array([state.pi1]), np.array([ll]))
        if not improved[0]:
            break
        state.pi1 = _clip(float(p1a[0]), pi_lo, pi_hi)
        state.rho = _clip(float(ra[0]), -1.0 + CLAMP, 1.0 - CLAMP)
        state.rho_clamped = True
        state.iterate(opts)

    params = DeltaParams(delta=delta0, pi1=state.pi1, rho=state.rho)
    boundary = ("pi_clamped" if state.pi_clamped
                else ("rho_clamped" if state.rho_clamped else "interior"))
    return FitResult(params=params,
                     loglik=float(_loglik_counts(counts, delta0, state.pi1, state.rho)),
                     iterations=state.iterations,
                     converged=state.converged,
                     boundary=boundary,
                     final_step_norm=state.step_norm,
                     rho_identified=has_bilateral)


def schur_var_delta(info: np.ndarray) -> float:
    """Asymptotic variance of the difference estimate from a 3x3 information.

    Computes the (1,1) entry of the matrix inverse via the Schur
    complement of the lower-right 2x2 block, which must be invertible.
    """
    info = np.asarray(info, dtype=float)
    if info.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {info.shape}")
    block_det = info[1, 1] * info[2, 2] - info[1, 2] * info[2, 1]
    if not math.isfinite(block_det) or block_det == 0.0:
        raise SingularInformationError(
            "lower-right information block is singular; "
            "Wald and score tests are unavailable")
    b = info[0, 1:]
    # inv(block) @ b without forming the inverse
    y0 = (info[2, 2] * b[0] - info[1, 2] * b[1]) / block_det
    y1 = (info[1, 1] * b[1] - info[1, 2] * b[0]) / block_det
    denom = info[0, 0] - (b[0] * y0 + b[1] * y1)
    if not math.isfinite(denom) or denom <= 0.0:
        raise SingularInformationError(
            f"Schur complement {denom} not positive; "
            "Wald and score tests are unavailable")
    return 1.0 / denom
