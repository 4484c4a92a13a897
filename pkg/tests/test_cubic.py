import numpy as np
import pytest

from rhodiff.cubic import CubicFallback, cubic_coeffs, cubic_root, pi_update
from rhodiff.model import _group_loglik
from rhodiff.tables import FrequencyTable

from conftest import random_table


def test_hand_substitution_at_zero_correlation():
    t = FrequencyTable.from_counts((10, 20, 10, 5, 5), (1, 1, 1, 1, 1))
    assert cubic_coeffs(t, 0, 0.0) == pytest.approx((90.0, -135.0, 45.0, 0.0))


def test_constant_term_vanishes_at_zero_correlation(rng):
    for _ in range(50):
        t = random_table(rng)
        assert cubic_coeffs(t, 0, 0.0)[3] == 0.0
        assert cubic_coeffs(t, 1, 0.0)[3] == 0.0


def test_leading_term_vanishes_at_unit_correlation(rng):
    t = random_table(rng)
    assert cubic_coeffs(t, 0, 1.0)[0] == 0.0


def test_root_of_reference_cubic():
    # 45*pi*(2*pi - 1)*(pi - 1): roots {0, 1/2, 1}, interior maximizer 1/2
    assert cubic_root(90.0, -135.0, 45.0, 0.0) == pytest.approx(0.5, abs=1e-12)


def test_scale_invariance():
    base = cubic_root(90.0, -135.0, 45.0, 0.0)
    for k in (0.25, 3.0, 1e6):
        assert cubic_root(90.0 * k, -135.0 * k, 45.0 * k, 0.0) == pytest.approx(
            base, abs=1e-9)


def test_residual_bound(rng):
    for _ in range(300):
        t = random_table(rng)
        rho = rng.uniform(-0.05, 0.95)
        for g in (0, 1):
            a, b, c, d = cubic_coeffs(t, g, rho)
            try:
                root = cubic_root(a, b, c, d)
            except CubicFallback:
                continue
            residual = abs(((a * root + b) * root + c) * root + d)
            assert residual <= 1e-8 * max(abs(a), abs(b), abs(c), abs(d))


def test_fallback_signals():
    with pytest.raises(CubicFallback):
        cubic_root(0.0, 1.0, 1.0, 1.0)  # nonpositive leading coefficient
    with pytest.raises(CubicFallback):
        cubic_root(1.0, 0.0, 1.0, 0.0)  # D0 = -3 <= 0


def test_root_maximizes_group_likelihood(rng):
    """The returned root beats every real root of the cubic inside (0, 1)."""
    for _ in range(300):
        t = random_table(rng, min_group_organs=2)
        rho = rng.uniform(-0.05, 0.9)
        counts = t.group_counts(0)
        a, b, c, d = cubic_coeffs(t, 0, rho)
        try:
            root = cubic_root(a, b, c, d)
        except CubicFallback:
            root = pi_update(counts, rho)
        got = _group_loglik(*[float(v) for v in counts], root, rho)
        eps = 1e-10
        for r in np.roots([a, b, c, d]):
            if abs(r.imag) > 1e-9 or not eps < r.real < 1 - eps:
                continue
            with np.errstate(invalid="ignore"):
                other = _group_loglik(*[float(v) for v in counts], float(r.real), rho)
            if not np.isfinite(other):  # root lies outside the admissible cells
                continue
            assert got >= other - 1e-9 * max(1.0, abs(got))


def test_pi_update_handles_degenerate_counts():
    # all organs responding pushes the estimate to the upper edge
    val = pi_update((0, 0, 10, 0, 5), 0.0)
    assert val > 0.99
    # no organs responding pushes it to the lower edge
    val = pi_update((10, 0, 0, 5, 0), 0.0)
    assert val < 0.01
    # near-unit correlation degenerates the cubic; quadratic path takes over
    val = pi_update((5, 0, 5, 0, 0), 1.0 - 1e-10)
    assert 0.0 < val < 1.0
