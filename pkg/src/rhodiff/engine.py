"""Vectorized fitting and test statistics for batches of tables.

The Monte Carlo protocols fit tens of millions of tables; doing that one
table at a time in Python is hopeless.  This module runs the exact same
iterations as :mod:`rhodiff.fit` elementwise across a batch: closed-form
probability updates, safeguarded Newton steps on the correlation, and 2x2
Fisher scoring under a fixed difference, with per-lane convergence masks
and step halving.  Agreement with the scalar fitters is pinned by tests.

A batch is a tuple of ten equally shaped float arrays

    (x0_1, x1_1, x2_1, y0_1, y1_1, x0_2, x1_2, x2_2, y0_2, y1_2)

holding each table's bilateral and unilateral cells per group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import polish_boundary_constrained, polish_boundary_unconstrained
from .cubic import RESIDUAL_RTOL, _coeffs, pi_update
from .fit import CLAMP, MAX_HALVINGS
from .model import (
    _group_rho_curvature,
    _group_rho_score,
    _info_elements,
    _loglik_counts,
    _score_counts,
    rho_lower_bound,
)

__all__ = ["BatchFit", "BatchStats", "batch_statistics", "counts_from_table",
           "fit_constrained_batch", "fit_unconstrained_batch"]

_TWO_THIRDS_PI = 2.0 * math.pi / 3.0


def counts_from_table(table) -> tuple[np.ndarray, ...]:
    """Length-1 batch from a :class:`~rhodiff.tables.FrequencyTable`."""
    values = table.group_counts(0) + table.group_counts(1)
    return tuple(np.array([float(v)]) for v in values)


@dataclass
class BatchFit:
    delta: np.ndarray
    pi1: np.ndarray
    rho: np.ndarray
    loglik: np.ndarray
    converged: np.ndarray
    rho_identified: np.ndarray


@dataclass
class BatchStats:
    """Per-lane statistics with computability masks.

    Statistic values are mechanical: a negative variance term or an
    undershooting free fit yields a non-positive statistic, which simply
    never exceeds a chi-square critical value.  ``*_ok`` is False only
    where the ingredients themselves were unavailable (a fit did not
    converge or the value is not finite).
    """

    q_lr: np.ndarray
    q_wald: np.ndarray
    q_score: np.ndarray
    lr_ok: np.ndarray
    wald_ok: np.ndarray
    score_ok: np.ndarray
    unconstrained: BatchFit
    constrained: BatchFit


def _take(counts, idx):
    return tuple(c[idx] for c in counts)


def _rho_floor(p1, p2):
    """Smallest admissible correlation for the lane (all cells non-negative)."""
    return np.maximum(rho_lower_bound(p1), rho_lower_bound(p2))


def _pi_update_batch(x0, x1, x2, y0, y1, rho):
    """Vectorized cubic maximizer with scalar fallback for degenerate lanes."""
    a, b, c, d = _coeffs(x0, x1, x2, y0, y1, rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        d0 = b * b - 3.0 * a * c
        d1 = 2.0 * b**3 - 9.0 * a * b * c + 27.0 * a * a * d
        arg = -d1 / (2.0 * d0**1.5)
        ok = (a > 0.0) & (d0 > 0.0) & (np.abs(arg) <= 1.0 + 1e-12)
        theta = np.arccos(np.clip(arg, -1.0, 1.0))
        root = (-b + 2.0 * np.sqrt(d0) * np.cos(theta / 3.0 - _TWO_THIRDS_PI)) / (3.0 * a)
        ok &= np.isfinite(root) & (root >= -1e-9) & (root <= 1.0 + 1e-9)
        root = np.clip(root, 0.0, 1.0)
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)),
                           np.maximum(np.abs(c), np.abs(d)))
        residual = np.abs(((a * root + b) * root + c) * root + d)
        ok &= residual <= RESIDUAL_RTOL * scale
    for i in np.flatnonzero(~ok):
        root[i] = pi_update((x0[i], x1[i], x2[i], y0[i], y1[i]), float(rho[i]))
    return root


def _loglik_lanes(counts, delta, pi1, rho):
    with np.errstate(divide="ignore", invalid="ignore"):
        return _loglik_counts(counts, delta, pi1, rho)


def _iterate_unconstrained(counts, pi1, pi2, rho, seen_pi, converged, active,
                           tol, max_iterations):
    """Alternating probability/correlation updates on the active lanes."""
    for _ in range(max_iterations):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        sub = _take(counts, idx)
        r = rho[idx]
        # at negative correlation only probabilities inside
        # [-rho/(1-rho), 1/(1-rho)] keep every cell non-negative
        win = np.where(r < 0.0, -r / (1.0 - r), 0.0)
        lo_pi = np.maximum(CLAMP, win + CLAMP)
        hi_pi = np.minimum(1.0 - CLAMP, 1.0 - win - CLAMP)
        p1 = np.clip(_pi_update_batch(*sub[:5], r), lo_pi, hi_pi)
        p2 = np.clip(_pi_update_batch(*sub[5:], r), lo_pi, hi_pi)
        seen = seen_pi[idx]
        if seen.any():
            # keep the old pair where a window-clamped update went downhill
            old_ll = _loglik_lanes(sub, pi2[idx] - pi1[idx], pi1[idx], r)
            new_ll = _loglik_lanes(sub, p2 - p1, p1, r)
            keep = seen & ~(new_ll >= old_ll - 1e-13)
            p1 = np.where(keep, pi1[idx], p1)
            p2 = np.where(keep, pi2[idx], p2)
        pi_step = np.where(seen,
                           np.maximum(np.abs(p1 - pi1[idx]), np.abs(p2 - pi2[idx])),
                           0.0)
        pi1[idx] = p1
        pi2[idx] = p2
        seen_pi[idx] = True

        with np.errstate(divide="ignore", invalid="ignore"):
            g = (_group_rho_score(sub[0], sub[1], sub[2], p1, r)
                 + _group_rho_score(sub[5], sub[6], sub[7], p2, r))
            h = (_group_rho_curvature(sub[0], sub[1], sub[2], p1, r)
                 + _group_rho_curvature(sub[5], sub[6], sub[7], p2, r))
            step = np.where(h < 0.0, -g / h, 0.0)
        step = np.where(np.isfinite(step), step, 0.0)

        lo = _rho_floor(p1, p2) + CLAMP
        base = _loglik_lanes(sub, p2 - p1, p1, r)
        prop = np.clip(r + step, lo, 1.0 - CLAMP)
        ll = _loglik_lanes(sub, p2 - p1, p1, prop)
        worse = ~(ll >= base - 1e-13)
        for _ in range(MAX_HALVINGS):
            if not worse.any():
                break
            step = np.where(worse, 0.5 * step, step)
            w = np.flatnonzero(worse)
            prop[w] = np.clip(r[w] + step[w], lo[w], 1.0 - CLAMP)
            ll[w] = _loglik_lanes(_take(sub, w), p2[w] - p1[w], p1[w], prop[w])
            worse = ~(ll >= base - 1e-13)
        prop = np.where(worse, r, prop)

        drho = np.abs(prop - r)
        rho[idx] = prop
        # wall-scaled increment: near the correlation walls the Newton step
        # shrinks with the wall distance, so require the increment small
        # relative to it; an exactly pinned lane is a boundary optimum
        wall = np.minimum(1.0, np.minimum((1.0 - CLAMP) - prop + CLAMP,
                                          prop - lo + CLAMP))
        done = ((drho == 0.0) | (drho < tol * wall)) & (pi_step < 100.0 * tol)
        converged[idx[done]] = True
        active[idx[done]] = False


def fit_unconstrained_batch(counts, tol: float = 1e-6,
                            max_iterations: int = 500) -> BatchFit:
    """Elementwise analogue of :func:`rhodiff.fit.fit_unconstrained`."""
    n = counts[0].shape[0]
    rho = np.zeros(n)
    pi1 = np.full(n, 0.5)
    pi2 = np.full(n, 0.5)
    seen_pi = np.zeros(n, dtype=bool)
    converged = np.zeros(n, dtype=bool)
    bilateral = (counts[0] + counts[1] + counts[2]
                 + counts[5] + counts[6] + counts[7]) > 0
    organs1 = 2.0 * (counts[0] + counts[1] + counts[2]) + counts[3] + counts[4]
    organs2 = 2.0 * (counts[5] + counts[6] + counts[7]) + counts[8] + counts[9]
    valid = (organs1 > 0) & (organs2 > 0)
    active = valid.copy()

    _iterate_unconstrained(counts, pi1, pi2, rho, seen_pi, converged, active,
                           tol, max_iterations)

    # lanes on the lower boundary may be corner-stuck: no coordinate move
    # improves, but sliding along the boundary curve does; polish them and
    # resume the iteration wherever the slide helped
    for _ in range(2):
        floor = np.maximum(rho_lower_bound(pi1), rho_lower_bound(pi2))
        pinned = valid & (rho - floor <= CLAMP + 1e-9)
        idx = np.flatnonzero(pinned)
        if idx.size == 0:
            break
        sub = _take(counts, idx)
        ll = _loglik_lanes(sub, pi2[idx] - pi1[idx], pi1[idx], rho[idx])
        p1, p2, r, _, improved = polish_boundary_unconstrained(
            sub, pi1[idx], pi2[idx], ll)
        if not improved.any():
            break
        moved = idx[improved]
        pi1[moved] = p1[improved]
        pi2[moved] = p2[improved]
        rho[moved] = r[improved]
        converged[moved] = False
        active = np.zeros(n, dtype=bool)
        active[moved] = True
        _iterate_unconstrained(counts, pi1, pi2, rho, seen_pi, converged,
                               active, tol, max_iterations)

    return BatchFit(delta=pi2 - pi1, pi1=pi1, rho=rho,
                    loglik=_loglik_lanes(counts, pi2 - pi1, pi1, rho),
                    converged=converged & valid,
                    rho_identified=bilateral)


def _iterate_constrained(counts, delta0, pi1, rho, converged, failed, active,
                         big_m1, big_m2, big_n1, big_n2, bilateral,
                         pi_lo, pi_hi, tol, max_iterations):
    """Fisher-scoring sweeps on the active lanes of a fixed-difference fit."""
    for _ in range(max_iterations):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        sub = _take(counts, idx)
        p = pi1[idx]
        r = rho[idx]
        with np.errstate(divide="ignore", invalid="ignore"):
            _, u_pi, u_rho = _score_counts(sub, delta0, p, r)
            _, _, i_pp, i_pr, i_rr = _info_elements(
                big_m1[idx], big_m2[idx], big_n1[idx], big_n2[idx], delta0, p, r)
            det = i_pp * i_rr - i_pr * i_pr
            s_pi = (i_rr * u_pi - i_pr * u_rho) / det
            s_rho = (i_pp * u_rho - i_pr * u_pi) / det
            no_bi = ~bilateral[idx]
            s_pi = np.where(no_bi, u_pi / i_pp, s_pi)
            s_rho = np.where(no_bi, 0.0, s_rho)
            # outside the fully admissible region the mechanical information
            # can be indefinite; fall back to a diagonally scaled gradient
            bad = ~(np.isfinite(s_pi) & np.isfinite(s_rho)) | (~no_bi & ~(det > 0.0))
            if bad.any():
                g_pi = u_pi / np.maximum(np.abs(i_pp), 1e-12)
                g_rho = u_rho / np.maximum(np.abs(i_rr), 1e-12)
                grad_ok = np.isfinite(g_pi) & np.isfinite(g_rho)
                s_pi = np.where(bad & grad_ok, g_pi, s_pi)
                s_rho = np.where(bad & grad_ok, g_rho, s_rho)
                bad &= ~grad_ok
        s_pi = np.where(bad, 0.0, s_pi)
        s_rho = np.where(bad, 0.0, s_rho)

        base = _loglik_lanes(sub, delta0, p, r)
        prop_pi = np.clip(p + s_pi, pi_lo, pi_hi)
        lo = _rho_floor(prop_pi, delta0 + prop_pi) + CLAMP
        prop_rho = np.clip(r + s_rho, lo, 1.0 - CLAMP)
        ll = _loglik_lanes(sub, delta0, prop_pi, prop_rho)
        worse = ~(ll >= base - 1e-13)
        for _ in range(MAX_HALVINGS):
            if not worse.any():
                break
            s_pi = np.where(worse, 0.5 * s_pi, s_pi)
            s_rho = np.where(worse, 0.5 * s_rho, s_rho)
            w = np.flatnonzero(worse)
            sub_w = _take(sub, w)
            prop_pi[w] = np.clip(p[w] + s_pi[w], pi_lo, pi_hi)
            lo_w = _rho_floor(prop_pi[w], delta0 + prop_pi[w]) + CLAMP
            prop_rho[w] = np.clip(r[w] + s_rho[w], lo_w, 1.0 - CLAMP)
            ll[w] = _loglik_lanes(sub_w, delta0, prop_pi[w], prop_rho[w])
            worse = ~(ll >= base - 1e-13)
        prop_pi = np.where(worse, p, prop_pi)
        prop_rho = np.where(worse, r, prop_rho)

        norm = np.hypot(prop_pi - p, prop_rho - r)
        pi1[idx] = prop_pi
        rho[idx] = prop_rho
        done = norm < tol
        if done.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                _, g_pi, g_rho = _score_counts(sub, delta0, prop_pi, prop_rho)
            lo_new = _rho_floor(prop_pi, delta0 + prop_pi) + CLAMP
            pole_stuck = (((prop_rho >= 1.0 - CLAMP) & (g_rho < -1e-8))
                          | ((prop_rho <= lo_new) & (g_rho > 1e-8))
                          | ((prop_pi >= pi_hi) & (g_pi < -1e-8))
                          | ((prop_pi <= pi_lo) & (g_pi > 1e-8)))
            done &= ~pole_stuck
        newly_failed = bad & done  # no usable step: stop but flag
        failed[idx[newly_failed]] = True
        converged[idx[done & ~newly_failed]] = True
        active[idx[done]] = False


def fit_constrained_batch(counts, delta0: float, tol: float = 1e-6,
                          max_iterations: int = 500) -> BatchFit:
    """Elementwise analogue of :func:`rhodiff.fit.fit_constrained`."""
    n = counts[0].shape[0]
    big_m1 = counts[0] + counts[1] + counts[2]
    big_m2 = counts[5] + counts[6] + counts[7]
    big_n1 = counts[3] + counts[4]
    big_n2 = counts[8] + counts[9]
    bilateral = (big_m1 + big_m2) > 0
    organs = 2.0 * (big_m1 + big_m2) + big_n1 + big_n2
    valid = (2.0 * big_m1 + big_n1 > 0) & (2.0 * big_m2 + big_n2 > 0)

    pi_lo = max(CLAMP, -delta0 + CLAMP)
    pi_hi = min(1.0 - CLAMP, 1.0 - delta0 - CLAMP)
    eps0 = 1e-6
    successes = (counts[1] + 2.0 * counts[2] + counts[4]
                 + counts[6] + 2.0 * counts[7] + counts[9])
    with np.errstate(divide="ignore", invalid="ignore"):
        pooled = np.where(organs > 0, successes / organs, 0.5)
    pi1 = np.clip(pooled, max(eps0, -delta0 + eps0), min(1.0 - eps0, 1.0 - delta0 - eps0))
    rho = np.zeros(n)
    converged = np.zeros(n, dtype=bool)
    failed = np.zeros(n, dtype=bool)
    active = valid.copy()

    _iterate_constrained(counts, delta0, pi1, rho, converged, failed, active,
                         big_m1, big_m2, big_n1, big_n2, bilateral,
                         pi_lo, pi_hi, tol, max_iterations)

    for _ in range(2):
        floor = np.maximum(rho_lower_bound(pi1), rho_lower_bound(delta0 + pi1))
        pinned = valid & (rho - floor <= CLAMP + 1e-9)
        idx = np.flatnonzero(pinned)
        if idx.size == 0:
            break
        sub = _take(counts, idx)
        ll = _loglik_lanes(sub, delta0, pi1[idx], rho[idx])
        p1, r, _, improved = polish_boundary_constrained(
            sub, delta0, pi1[idx], ll)
        if not improved.any():
            break
        moved = idx[improved]
        pi1[moved] = p1[improved]
        rho[moved] = r[improved]
        converged[moved] = False
        failed[moved] = False
        active = np.zeros(n, dtype=bool)
        active[moved] = True
        _iterate_constrained(counts, delta0, pi1, rho, converged, failed,
                             active, big_m1, big_m2, big_n1, big_n2,
                             bilateral, pi_lo, pi_hi, tol, max_iterations)

    return BatchFit(delta=np.full(n, float(delta0)), pi1=pi1, rho=rho,
                    loglik=_loglik_lanes(counts, delta0, pi1, rho),
                    converged=converged & valid & ~failed,
                    rho_identified=bilateral)


def _var_delta_terms(big_m1, big_m2, big_n1, big_n2, delta, pi1, rho):
    """Reciprocal of the difference variance (Schur complement), elementwise.

    Evaluated mechanically: at boundary parameter values the expected
    information can be indefinite, making the result non-positive; callers
    treat the resulting non-positive statistic as a non-rejection.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        i_dd, i_dr, i_pp, i_pr, i_rr = _info_elements(
            big_m1, big_m2, big_n1, big_n2, delta, pi1, rho)
        det = i_pp * i_rr - i_pr * i_pr
        # b = (i_dd, i_dr); denom = i_dd - b' inv(block) b
        y0 = (i_rr * i_dd - i_pr * i_dr) / det
        y1 = (i_pp * i_dr - i_pr * i_dd) / det
        denom = i_dd - (i_dd * y0 + i_dr * y1)
        ok = np.isfinite(denom) & (denom > 0.0) & (det > 0.0)
    return denom, ok


def batch_statistics(counts, delta0: float, tol: float = 1e-6,
                     max_iterations: int = 500) -> BatchStats:
    """All three statistics for every table in the batch."""
    fit_u = fit_unconstrained_batch(counts, tol, max_iterations)
    fit_c = fit_constrained_batch(counts, delta0, tol, max_iterations)
    big_m1 = counts[0] + counts[1] + counts[2]
    big_m2 = counts[5] + counts[6] + counts[7]
    big_n1 = counts[3] + counts[4]
    big_n2 = counts[8] + counts[9]

    with np.errstate(divide="ignore", invalid="ignore"):
        q_lr = 2.0 * (fit_u.loglik - fit_c.loglik)
        lr_ok = fit_u.converged & fit_c.converged & np.isfinite(q_lr)

        denom_u, _ = _var_delta_terms(big_m1, big_m2, big_n1, big_n2,
                                      fit_u.delta, fit_u.pi1, fit_u.rho)
        q_wald = (fit_u.delta - delta0) ** 2 * denom_u
        wald_ok = fit_u.converged & np.isfinite(q_wald)

        u_delta, _, _ = _score_counts(counts, delta0, fit_c.pi1, fit_c.rho)
        denom_c, _ = _var_delta_terms(big_m1, big_m2, big_n1, big_n2,
                                      np.full_like(fit_c.pi1, float(delta0)),
                                      fit_c.pi1, fit_c.rho)
        q_score = u_delta**2 / denom_c
        score_ok = fit_c.converged & np.isfinite(q_score)

    return BatchStats(q_lr=q_lr, q_wald=q_wald, q_score=q_score,
                      lr_ok=lr_ok, wald_ok=wald_ok, score_ok=score_ok,
                      unconstrained=fit_u, constrained=fit_c)
