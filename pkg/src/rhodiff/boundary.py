"""Likelihood maximization along the admissibility boundary.

The iterative fitters treat the correlation as a free coordinate inside
``[lower_bound(pi), 1)``.  When the maximizer sits on the lower boundary
(a cell probability exactly zero), coordinate schemes stall at corner
points where no single-coordinate move improves, although sliding along
the boundary curve ``rho = lower_bound(...)`` still would.  These helpers
run that slide: a coarse scan plus golden-section refinement of the
profile likelihood over the response probabilities with the correlation
pinned to the boundary, vectorized over lanes.
"""

from __future__ import annotations

import numpy as np

from .model import _loglik_counts, rho_lower_bound

__all__ = ["polish_boundary_constrained", "polish_boundary_unconstrained"]

#: offset keeping boundary evaluations strictly inside the domain
EDGE = 1e-10
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
_SCAN_POINTS = 65
_GOLDEN_ITERS = 40


def _golden_max(f, lo, hi):
    """Vectorized scan-plus-golden maximization of ``f`` over ``[lo, hi]``.

    ``lo`` and ``hi`` are arrays (one interval per lane); ``f`` maps an
    array of abscissas to an array of values.  Returns the per-lane
    maximizer.  The coarse scan makes the result robust to mild
    multimodality before the golden refinement tightens it.
    """
    ts = np.linspace(0.0, 1.0, _SCAN_POINTS)
    best_x = lo.copy()
    best_v = np.full(lo.shape, -np.inf)
    for t in ts:
        x = lo + t * (hi - lo)
        v = f(x)
        better = v > best_v
        best_x = np.where(better, x, best_x)
        best_v = np.where(better, v, best_v)
    half = (hi - lo) / (_SCAN_POINTS - 1)
    a = np.maximum(lo, best_x - half)
    b = np.minimum(hi, best_x + half)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = f(c)
    fd = f(d)
    for _ in range(_GOLDEN_ITERS):
        take_left = fc > fd  # keep [a, d]; the old c becomes the new d
        a = np.where(take_left, a, c)
        b = np.where(take_left, d, b)
        new_c = b - _INVPHI * (b - a)
        new_d = a + _INVPHI * (b - a)
        fx = f(np.where(take_left, new_c, new_d))
        fc, fd = (np.where(take_left, fx, fd), np.where(take_left, fc, fx))
        c, d = new_c, new_d
    mid = 0.5 * (a + b)
    v_mid = f(mid)
    better_scan = best_v > v_mid  # guard against a lost bracket
    return np.where(better_scan, best_x, mid)


def _boundary_rho(pi1, pi2):
    return np.maximum(rho_lower_bound(pi1), rho_lower_bound(pi2)) + EDGE


def polish_boundary_unconstrained(counts, pi1, pi2, loglik, sweeps: int = 4):
    """Improve lanes whose free fit sits on the lower correlation boundary.

    Alternates 1-D maximizations of the boundary profile likelihood in each
    group probability.  Returns ``(pi1, pi2, rho, loglik, improved)`` with
    updates only where the boundary slide strictly improved the likelihood.
    """
    p1 = pi1.copy()
    p2 = pi2.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(sweeps):
            lo = np.full(p1.shape, EDGE)
            hi = np.full(p1.shape, 1.0 - EDGE)

            def profile_p1(x):
                r = _boundary_rho(x, p2)
                return _loglik_counts(counts, p2 - x, x, r)

            p1 = _golden_max(profile_p1, lo, hi)

            def profile_p2(x):
                r = _boundary_rho(p1, x)
                return _loglik_counts(counts, x - p1, p1, r)

            p2 = _golden_max(profile_p2, lo, hi)
        rho = _boundary_rho(p1, p2)
        new_ll = _loglik_counts(counts, p2 - p1, p1, rho)
    improved = new_ll > loglik + 1e-11
    out_p1 = np.where(improved, p1, pi1)
    out_p2 = np.where(improved, p2, pi2)
    out_rho = np.where(improved, rho, _boundary_rho(pi1, pi2))
    out_ll = np.where(improved, new_ll, loglik)
    return out_p1, out_p2, out_rho, out_ll, improved


def polish_boundary_constrained(counts, delta0, pi1, loglik):
    """Boundary slide for the fixed-difference fit: one free coordinate."""
    lo = np.full(pi1.shape, max(EDGE, -delta0 + EDGE))
    hi = np.full(pi1.shape, min(1.0 - EDGE, 1.0 - delta0 - EDGE))
    with np.errstate(divide="ignore", invalid="ignore"):

        def profile(x):
            r = _boundary_rho(x, delta0 + x)
            return _loglik_counts(counts, delta0, x, r)

        p1 = _golden_max(profile, lo, hi)
        rho = _boundary_rho(p1, delta0 + p1)
        new_ll = _loglik_counts(counts, delta0, p1, rho)
    improved = new_ll > loglik + 1e-11
    out_p1 = np.where(improved, p1, pi1)
    out_rho = np.where(improved, rho, _boundary_rho(pi1, delta0 + pi1))
    out_ll = np.where(improved, new_ll, loglik)
    return out_p1, out_rho, out_ll, improved
