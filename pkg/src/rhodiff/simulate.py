"""Monte Carlo protocols: type-I error, power, config sweeps, sample size.

Randomness contract
-------------------
Every experiment draws from a counter-based generator (Philox, 64-bit)
whose key is a hash of ``(seed, pi1, rho, delta_true)``.  Replicate ``r``
owns uniform row ``r`` (eight doubles, six used), which is addressable by
a counter jump, so results never depend on worker scheduling or batch
splits.  Sizes are deliberately left out of the key: a sample-size search
then reuses the same uniforms at every candidate size (common random
numbers), which keeps the power curve monotone up to inverse-CDF
resolution.

Datasets are exact draws: the bilateral triple comes from two staged
inverse-CDF binomials (first the both-respond count, then the
one-responds count among the rest), the unilateral count from one more.
"""

from __future__ import annotations

import csv
import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps
from scipy.special import gammaln, xlogy

from .engine import batch_statistics
from .inference import TEST_NAMES, chisq1_critical
from .model import GroupParams, _cells, rho_lower_bound
from .tables import FrequencyTable

__all__ = [
    "ExactTie",
    "SimConfig",
    "SimSummary",
    "SweepRanges",
    "TestRate",
    "estimate_power",
    "estimate_tie",
    "exact_tie_small",
    "min_sample_size",
    "random_config_sweep",
    "sample_dataset",
    "write_sweep_csv",
]

#: uniforms reserved per replicate: two full Philox blocks (six are used)
_ROW_WIDTH = 8
#: largest binomial size solved via an explicit cdf table
_TABLE_MAX = 2048
#: hard ceiling for the sample-size search
SIZE_CAP = 10**6
#: table count ceiling for exact enumeration
ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo scenario.

    ``delta_true`` generates the data (group 2 responds with
    ``pi1 + delta_true``); ``delta_null`` is the tested difference.  The
    two coincide in a type-I-error run; power runs test ``delta_null=0``.
    """

    pi1: float
    rho: float
    delta_true: float
    delta_null: float = 0.0
    m1: int = 50
    m2: int = 50
    n1: int = 50
    n2: int = 50
    replicates: int = 10_000
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        GroupParams(pi1=self.pi1, pi2=self.pi1 + self.delta_true, rho=self.rho)
        for name in ("m1", "m2", "n1", "n2"):
            v = getattr(self, name)
            if v < 0 or v != int(v):
                raise ValueError(f"{name} must be a non-negative integer, got {v}")
        if 2 * self.m1 + self.n1 < 1 or 2 * self.m2 + self.n2 < 1:
            raise ValueError("each group needs at least one subject")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    def stream_key(self) -> np.ndarray:
        """128-bit Philox key from the seed and the generating parameters."""
        h = hashlib.blake2b(digest_size=16)
        h.update(b"rhodiff-data-v1")
        h.update(struct.pack("<q", int(self.seed)))
        h.update(struct.pack("<3d", self.pi1, self.rho, self.delta_true))
        return np.frombuffer(h.digest(), dtype=np.uint64).copy()


@dataclass(frozen=True)
class TestRate:
    """Rejection rate of one test with its Monte Carlo uncertainty."""

    rate: float
    mc_se: float
    nonconverged: int
    classification: str | None = None


@dataclass(frozen=True)
class SimSummary:
    config: SimConfig
    kind: str  # "tie" or "power"
    tests: dict[str, TestRate] = field(default_factory=dict)


def _classify(rate: float, alpha: float) -> str:
    ratio = rate / alpha if alpha > 0 else math.inf
    if ratio > 1.2:
        return "liberal"
    if ratio < 0.8:
        return "conservative"
    return "robust"


def _binom_cdf(n: int, p: float) -> np.ndarray:
    k = np.arange(n + 1)
    logpmf = (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
              + xlogy(k, p) + xlogy(n - k, 1.0 - p))
    cdf = np.cumsum(np.exp(logpmf))
    return cdf / cdf[-1]


def _icdf_fixed(u: np.ndarray, n: int, p: float) -> np.ndarray:
    """Smallest k with ``P(X <= k) >= u`` for X ~ Binomial(n, p)."""
    if n == 0 or p <= 0.0:
        return np.zeros(u.shape)
    if p >= 1.0:
        return np.full(u.shape, float(n))
    if n <= _TABLE_MAX:
        return np.searchsorted(_binom_cdf(n, p), u, side="left").astype(float)
    return sps.binom.ppf(u, n, p)


def _icdf_varying(u: np.ndarray, n: np.ndarray, p: float) -> np.ndarray:
    """Inverse-CDF binomial with a per-lane size ``n`` and shared ``p``."""
    if p <= 0.0:
        return np.zeros(u.shape)
    if p >= 1.0:
        return n.astype(float)
    nmax = int(n.max(initial=0))
    if nmax == 0:
        return np.zeros(u.shape)
    if nmax <= _TABLE_MAX:
        out = np.zeros(u.shape)
        for val in np.unique(n):
            val = int(val)
            if val == 0:
                continue
            mask = n == val
            out[mask] = np.searchsorted(_binom_cdf(val, p), u[mask], side="left")
        return out
    return sps.binom.ppf(u, n, p)


def _datasets_from_uniforms(config: SimConfig, uniforms: np.ndarray):
    """Map uniform rows to batch count arrays, three draws per group."""
    out = []
    for g, (m_tot, n_tot, col) in enumerate(
            ((config.m1, config.n1, 0), (config.m2, config.n2, 3))):
        pi = config.pi1 if g == 0 else config.pi1 + config.delta_true
        p0, p1, p2 = _cells(pi, config.rho)
        x2 = _icdf_fixed(uniforms[:, col], m_tot, p2)
        remaining = (m_tot - x2).astype(np.int64)
        cond = p1 / (p1 + p0) if (p1 + p0) > 0 else 0.0
        x1 = _icdf_varying(uniforms[:, col + 1], remaining, min(1.0, max(0.0, cond)))
        x0 = m_tot - x2 - x1
        y1 = _icdf_fixed(uniforms[:, col + 2], n_tot, pi)
        y0 = n_tot - y1
        out.extend([x0, x1, x2, y0, y1])
    return tuple(out)


def _uniform_rows(config: SimConfig, n_rows: int, first_row: int = 0) -> np.ndarray:
    gen = np.random.Philox(key=config.stream_key())
    if first_row:
        gen.advance(first_row * (_ROW_WIDTH // 4))
    return np.random.Generator(gen).random((n_rows, _ROW_WIDTH))


def sample_dataset(config: SimConfig, replicate_index: int = 0) -> FrequencyTable:
    """The dataset replicate ``replicate_index`` of this scenario would see."""
    if replicate_index < 0:
        raise ValueError("replicate_index must be non-negative")
    u = _uniform_rows(config, 1, first_row=replicate_index)
    counts = _datasets_from_uniforms(config, u)
    g1 = [int(c[0]) for c in counts[:5]]
    g2 = [int(c[0]) for c in counts[5:]]
    return FrequencyTable.from_counts(g1, g2)


def _degenerate_tables(counts) -> np.ndarray:
    """Tables with no doubly-responding subjects at all, or no doubly
    non-responding ones.  The correlation estimate degenerates to the
    admissible boundary on these, so no test gets computed for them."""
    return ((counts[2] + counts[7]) == 0) | ((counts[0] + counts[5]) == 0)


def _rates_from_stats(batch, degenerate, config: SimConfig, kind: str) -> SimSummary:
    """Rejection rates over all replicates.

    A replicate whose tests could not be computed (degenerate table,
    nonconvergent fit, non-finite statistic) never rejects; it stays in
    the denominator and is counted in ``nonconverged``.  A computable but
    non-positive statistic is an ordinary non-rejection.
    """
    crit = chisq1_critical(config.alpha)
    total = config.replicates
    tests = {}
    with np.errstate(invalid="ignore"):
        for name, q, ok in (("lr", batch.q_lr, batch.lr_ok),
                            ("wald", batch.q_wald, batch.wald_ok),
                            ("score", batch.q_score, batch.score_ok)):
            usable = ok & ~degenerate
            rate = float(np.count_nonzero((q > crit) & usable)) / total
            se = math.sqrt(rate * (1.0 - rate) / total)
            tests[name] = TestRate(
                rate=rate, mc_se=se, nonconverged=total - int(usable.sum()),
                classification=_classify(rate, config.alpha) if kind == "tie" else None)
    return SimSummary(config=config, kind=kind, tests=tests)


def _run_replicates(config: SimConfig, kind: str) -> SimSummary:
    uniforms = _uniform_rows(config, config.replicates)
    counts = _datasets_from_uniforms(config, uniforms)
    batch = batch_statistics(counts, config.delta_null)
    return _rates_from_stats(batch, _degenerate_tables(counts), config, kind)


def estimate_tie(config: SimConfig) -> SimSummary:
    """Empirical type-I error; data generated at the tested difference."""
    if config.delta_true != config.delta_null:
        raise ValueError(
            f"type-I-error run needs delta_true == delta_null, got "
            f"{config.delta_true} vs {config.delta_null}")
    return _run_replicates(config, "tie")


def estimate_power(config: SimConfig) -> SimSummary:
    """Empirical power against ``H0: delta = 0``."""
    if config.delta_null != 0.0:
        raise ValueError(f"power run tests delta_null=0, got {config.delta_null}")
    return _run_replicates(config, "power")


@dataclass(frozen=True)
class SweepRanges:
    """Uniform draw ranges for the random-configuration sweep."""

    delta0: tuple[float, float] = (-1.0, 1.0)
    rho: tuple[float, float] = (-1.0, 1.0)
    pi1: tuple[float, float] = (0.0, 1.0)
    m: tuple[int, int] = (50, 150)
    n: tuple[int, int] = (50, 150)


def random_config_sweep(count: int, ranges: SweepRanges = SweepRanges(),
                        seed: int = 0, replicates: int = 10_000,
                        alpha: float = 0.05,
                        progress=None) -> list[tuple[SimConfig, SimSummary]]:
    """Type-I error across randomly drawn admissible scenarios.

    Draws ``(delta0, rho, pi1, m, n)`` uniformly in ``ranges`` and
    rejection-samples until both group probabilities are interior and all
    six cells are positive, then estimates the type-I error of each test.
    """
    h = hashlib.blake2b(b"rhodiff-sweep-v1" + struct.pack("<q", int(seed)),
                        digest_size=16)
    draw = np.random.Generator(np.random.Philox(
        key=np.frombuffer(h.digest(), dtype=np.uint64).copy()))
    results = []
    for i in range(count):
        while True:
            delta0 = draw.uniform(*ranges.delta0)
            rho = draw.uniform(*ranges.rho)
            pi1 = draw.uniform(*ranges.pi1)
            pi2 = pi1 + delta0
            if not (0.0 < pi1 < 1.0 and 0.0 < pi2 < 1.0):
                continue
            if rho >= 1.0 or rho <= max(rho_lower_bound(pi1), rho_lower_bound(pi2)):
                continue
            break
        m = int(draw.integers(ranges.m[0], ranges.m[1] + 1))
        n = int(draw.integers(ranges.n[0], ranges.n[1] + 1))
        config = SimConfig(pi1=pi1, rho=rho, delta_true=delta0, delta_null=delta0,
                           m1=m, m2=m, n1=n, n2=n,
                           replicates=replicates, alpha=alpha, seed=seed)
        results.append((config, estimate_tie(config)))
        if progress is not None:
            progress(i + 1, count)
    return results


def write_sweep_csv(results, path):
    """One row per swept configuration; header mandatory."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["pi1", "rho", "delta0", "m", "n", "replicates", "alpha"]
        for name in TEST_NAMES:
            header += [f"{name}_rate", f"{name}_mc_se", f"{name}_nonconverged",
                       f"{name}_classification"]
        writer.writerow(header)
        for config, summary in results:
            row = [f"{config.pi1:.10g}", f"{config.rho:.10g}",
                   f"{config.delta_true:.10g}", config.m1, config.n1,
                   config.replicates, f"{config.alpha:.10g}"]
            for name in TEST_NAMES:
                tr = summary.tests[name]
                row += [f"{tr.rate:.10g}", f"{tr.mc_se:.10g}", tr.nonconverged,
                        tr.classification or ""]
            writer.writerow(row)


def write_summary_csv(summaries, path):
    """Rows for a list of :class:`SimSummary` (power or type-I error runs)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["kind", "pi1", "rho", "delta_true", "delta_null",
                  "m1", "m2", "n1", "n2", "replicates", "alpha", "seed"]
        for name in TEST_NAMES:
            header += [f"{name}_rate", f"{name}_mc_se", f"{name}_nonconverged"]
        writer.writerow(header)
        for summary in summaries:
            c = summary.config
            row = [summary.kind, f"{c.pi1:.10g}", f"{c.rho:.10g}",
                   f"{c.delta_true:.10g}", f"{c.delta_null:.10g}",
                   c.m1, c.m2, c.n1, c.n2, c.replicates, f"{c.alpha:.10g}", c.seed]
            for name in TEST_NAMES:
                tr = summary.tests[name]
                row += [f"{tr.rate:.10g}", f"{tr.mc_se:.10g}", tr.nonconverged]
            writer.writerow(row)


def min_sample_size(rho: float, pi1: float, delta1: float,
                    target_power: float = 0.8, alpha: float = 0.05,
                    test: str = "score", replicates: int = 20_000,
                    seed: int = 0, size_cap: int = SIZE_CAP) -> int:
    """Smallest common group size ``m = n`` reaching the target power.

    Doubles the size until the estimated power of the chosen test clears
    the target, then bisects on the integer grid.  All candidates share
    random numbers, and the final answer must also pass a confirmation run
    at four times the search budget (bumping the size if it does not).
    """
    if not 0.0 < target_power < 1.0:
        raise ValueError(f"target_power must lie in (0, 1), got {target_power}")
    if test not in TEST_NAMES:
        raise ValueError(f"test must be one of {TEST_NAMES}, got {test!r}")

    def power_at(size: int, n_rep: int) -> float:
        config = SimConfig(pi1=pi1, rho=rho, delta_true=delta1, delta_null=0.0,
                           m1=size, m2=size, n1=size, n2=size,
                           replicates=n_rep, alpha=alpha, seed=seed)
        rate = estimate_power(config).tests[test].rate
        return -math.inf if math.isnan(rate) else rate

    hi = 1
    lo = 0
    while power_at(hi, replicates) < target_power:
        lo = hi
        hi *= 2
        if hi > size_cap:
            raise RuntimeError(
                f"target power {target_power} not reached by m = n = {size_cap}")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if power_at(mid, replicates) >= target_power:
            hi = mid
        else:
            lo = mid
    while power_at(hi, 4 * replicates) < target_power:
        hi += 1
        if hi > size_cap:
            raise RuntimeError(
                f"target power {target_power} not reached by m = n = {size_cap}")
    return hi


@dataclass(frozen=True)
class ExactTie:
    """Exact rejection probabilities from full enumeration of tiny tables.

    ``tests`` maps each test to its exact size conditional on the test
    being computable; ``unavailable`` holds the probability mass where it
    was not.  ``total_probability`` should be 1 up to float error.
    """

    tests: dict[str, float]
    unavailable: dict[str, float]
    total_probability: float
    n_tables: int


def _enumerate_group(m_tot: int, n_tot: int, pi: float, rho: float):
    """All (x0, x1, x2, y0, y1) for one group with their log-probabilities."""
    x1g, x2g = np.meshgrid(np.arange(m_tot + 1), np.arange(m_tot + 1), indexing="ij")
    keep = (x1g + x2g) <= m_tot
    x1b = x1g[keep].astype(float)
    x2b = x2g[keep].astype(float)
    x0b = m_tot - x1b - x2b
    p0, p1, p2 = _cells(pi, rho)
    logw_b = (gammaln(m_tot + 1) - gammaln(x0b + 1) - gammaln(x1b + 1)
              - gammaln(x2b + 1) + xlogy(x0b, p0) + xlogy(x1b, p1) + xlogy(x2b, p2))
    y1u = np.arange(n_tot + 1).astype(float)
    y0u = n_tot - y1u
    logw_u = (gammaln(n_tot + 1) - gammaln(y1u + 1) - gammaln(y0u + 1)
              + xlogy(y1u, pi) + xlogy(y0u, 1.0 - pi))
    nb, nu = x0b.size, y1u.size
    rep = np.repeat(np.arange(nb), nu)
    til = np.tile(np.arange(nu), nb)
    return ((x0b[rep], x1b[rep], x2b[rep], y0u[til], y1u[til]),
            logw_b[rep] + logw_u[til])


def exact_tie_small(config: SimConfig, chunk: int = 200_000) -> ExactTie:
    """Probability-weighted exact size of each test over every possible table.

    Enumerates all tables with the configured group sizes, weights each by
    its trinomial-times-binomial probability under the null parameters,
    and sums the weights of rejected tables.
    """
    if config.delta_true != config.delta_null:
        raise ValueError("exact size needs delta_true == delta_null")
    g1, logw1 = _enumerate_group(config.m1, config.n1, config.pi1, config.rho)
    g2, logw2 = _enumerate_group(config.m2, config.n2,
                                 config.pi1 + config.delta_true, config.rho)
    k1, k2 = logw1.size, logw2.size
    if k1 * k2 > ENUMERATION_CAP:
        raise ValueError(
            f"enumeration of {k1 * k2} tables exceeds the cap {ENUMERATION_CAP}")
    i1 = np.repeat(np.arange(k1), k2)
    i2 = np.tile(np.arange(k2), k1)
    counts = tuple(a[i1] for a in g1) + tuple(a[i2] for a in g2)
    weights = np.exp(logw1[i1] + logw2[i2])

    crit = chisq1_critical(config.alpha)
    reject_mass = {name: 0.0 for name in TEST_NAMES}
    usable_mass = {name: 0.0 for name in TEST_NAMES}
    n_tables = weights.size
    for start in range(0, n_tables, chunk):
        sl = slice(start, min(start + chunk, n_tables))
        sub = tuple(c[sl] for c in counts)
        batch = batch_statistics(sub, config.delta_null)
        degenerate = _degenerate_tables(sub)
        w = weights[sl]
        with np.errstate(invalid="ignore"):
            for name, q, ok in (("lr", batch.q_lr, batch.lr_ok),
                                ("wald", batch.q_wald, batch.wald_ok),
                                ("score", batch.q_score, batch.score_ok)):
                usable = ok & ~degenerate
                usable_mass[name] += float(w[usable].sum())
                reject_mass[name] += float(w[usable & (q > crit)].sum())
    total = float(weights.sum())
    tests = {name: reject_mass[name] / total for name in TEST_NAMES}
    unavailable = {name: total - usable_mass[name] for name in TEST_NAMES}
    return ExactTie(tests=tests, unavailable=unavailable,
                    total_probability=total, n_tables=n_tables)
