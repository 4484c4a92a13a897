"""Closed-form response-probability update for one group at fixed correlation.

Setting the per-group derivative of the log-likelihood to zero and clearing
denominators leaves a cubic ``a*pi**3 + b*pi**2 + c*pi + d = 0``.  For
regular count patterns it has three real roots and the trigonometric root

    pi = (-b + 2*sqrt(D0) * cos(theta/3 - 2*pi/3)) / (3*a)

with ``D0 = b**2 - 3*a*c``, ``D1 = 2*b**3 - 9*a*b*c + 27*a**2*d`` and
``theta = arccos(-D1 / (2*D0**1.5))`` is the likelihood maximizer.
Degenerate patterns (zero rows, correlation at its limits) break the
trigonometric branch; callers fall back to a general root finder and pick
the admissible root with the highest likelihood.
"""

from __future__ import annotations

import math

import numpy as np

from .model import _group_loglik
from .tables import FrequencyTable

__all__ = ["CubicFallback", "cubic_coeffs", "cubic_root", "pi_update"]

#: residual acceptance threshold, relative to the largest coefficient
RESIDUAL_RTOL = 1e-8


class CubicFallback(ArithmeticError):
    """Trigonometric branch invalid; use the general-cubic fallback."""


def _coeffs(x0, x1, x2, y0, y1, rho):
    """Cubic coefficients from one group's counts.  Array-safe."""
    m_tot = x0 + x1 + x2
    n_tot = y0 + y1
    a = (1.0 - rho) ** 2 * (2.0 * m_tot + n_tot)
    b = (1.0 - rho) * ((3.0 * rho - 2.0) * x0 + 3.0 * (rho - 1.0) * x1
                       + (3.0 * rho - 4.0) * x2 + (rho - 1.0) * y0
                       + 2.0 * (rho - 1.0) * y1)
    c = (rho * (rho - 2.0) * x0 + (rho * (rho - 4.0) + 1.0) * x1
         + (rho * (rho - 4.0) + 2.0) * x2 + (rho * (rho - 3.0) + 1.0) * y1
         - rho * y0)
    d = rho * (x1 + x2 + y1)
    return a, b, c, d


def cubic_coeffs(table: FrequencyTable, group: int, rho: float) -> tuple[float, float, float, float]:
    """Coefficients ``(a, b, c, d)`` for the given group (0 or 1)."""
    x0, x1, x2, y0, y1 = table.group_counts(group)
    a, b, c, d = _coeffs(float(x0), float(x1), float(x2), float(y0), float(y1), float(rho))
    return float(a), float(b), float(c), float(d)


def _residual_ok(a, b, c, d, root) -> bool:
    scale = max(abs(a), abs(b), abs(c), abs(d))
    res = abs(((a * root + b) * root + c) * root + d)
    return res <= RESIDUAL_RTOL * scale


def cubic_root(a: float, b: float, c: float, d: float) -> float:
    """Likelihood-maximizing root via the trigonometric branch.

    Raises :class:`CubicFallback` when the branch is numerically invalid:
    non-positive ``D0``, arccos argument out of range beyond 1e-12 slack
    (within slack it is clamped), a root outside [0, 1], or a residual
    above ``RESIDUAL_RTOL`` relative to the largest coefficient.
    """
    if not a > 0.0:
        raise CubicFallback(f"leading coefficient a={a} not positive")
    d0 = b * b - 3.0 * a * c
    if d0 <= 0.0:
        raise CubicFallback(f"D0={d0} <= 0, roots not all real")
    d1 = 2.0 * b**3 - 9.0 * a * b * c + 27.0 * a * a * d
    arg = -d1 / (2.0 * d0**1.5)
    if abs(arg) > 1.0 + 1e-12:
        raise CubicFallback(f"arccos argument {arg} out of range")
    theta = math.acos(min(1.0, max(-1.0, arg)))
    root = (-b + 2.0 * math.sqrt(d0) * math.cos(theta / 3.0 - 2.0 * math.pi / 3.0)) / (3.0 * a)
    if not -1e-9 <= root <= 1.0 + 1e-9:
        raise CubicFallback(f"root {root} outside [0, 1]")
    root = min(1.0, max(0.0, root))
    if not _residual_ok(a, b, c, d, root):
        raise CubicFallback(f"residual too large at root {root}")
    return root


def _real_roots(a, b, c, d):
    """All real roots, degree reductions included (a or b may vanish)."""
    coeffs = [a, b, c, d]
    while coeffs and abs(coeffs[0]) == 0.0:
        coeffs.pop(0)
    if len(coeffs) <= 1:
        return []
    roots = np.roots(coeffs)
    return [float(r.real) for r in roots if abs(r.imag) <= 1e-9 * (1.0 + abs(r.real))]


def pi_update(counts, rho: float, eps: float = 1e-10) -> float:
    """Best response probability for one group's counts at fixed ``rho``.

    Tries the trigonometric root; on :class:`CubicFallback` scans all real
    roots of the cubic (degree reductions included) plus the interval
    endpoints and keeps the likelihood maximizer inside ``[eps, 1 - eps]``.
    """
    x0, x1, x2, y0, y1 = (float(v) for v in counts)
    a, b, c, d = _coeffs(x0, x1, x2, y0, y1, rho)
    try:
        return cubic_root(a, b, c, d)
    except CubicFallback:
        pass
    candidates = [min(1.0 - eps, max(eps, r)) for r in _real_roots(a, b, c, d)]
    candidates += [eps, 1.0 - eps]

    def value(p):
        ll = _group_loglik(x0, x1, x2, y0, y1, p, rho)
        return ll if math.isfinite(ll) else -math.inf

    return max(candidates, key=value)
