"""Experimental scan variant of the conditional Bonferroni test: minimize
the conditional Bonferroni p-value over all thresholds above a floor tau0
and calibrate the resulting statistic by simulation.

The scanned quantity is p_scan = min_{tau > tau0} p_min * |S_tau| / (tau n).
Because |S_tau| is a right-continuous step function of tau that only jumps
at observed p-values, the exact minimum is attained either at an order
statistic or as a left limit just below one, so a finite candidate set
suffices.  The null distribution of n * p_scan has no closed form; the
rejection threshold alpha_scan is the empirical alpha-quantile under
simulated uniform nulls.

This module is experimental: the accompanying large-sample optimality
claims are unproven, and only the finite-sample properties exercised in
the test suite are relied upon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .global_tests import _values

_SCAN_STREAM = 0x5343
_MTGL_STREAM = 0x4D54


@dataclass(frozen=True)
class ScanConfig:
    tau0: float = 0.05
    alpha: float = 0.05
    calib_reps: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.tau0 < 1.0:
            raise ValueError("tau0 must be in (0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.calib_reps < 1000:
            raise ValueError("calib_reps must be at least 1000")


def _scan_from_sorted(p_sorted: np.ndarray, tau0: float) -> float:
    """Exact inf over tau > tau0 of p_min * |S_tau| / (tau n) given sorted
    p-values.  Candidate thresholds are tau0, 1, and every order statistic
    >= tau0; at each candidate both the value AT tau (count of p <= tau)
    and the left limit (count of p < tau) are considered, skipping
    candidates with an empty selection."""
    n = p_sorted.size
    p_min = p_sorted[0]
    cands = np.unique(np.concatenate((
        p_sorted[p_sorted >= tau0], [tau0, 1.0])))
    counts_le = np.searchsorted(p_sorted, cands, side="right")
    counts_lt = np.searchsorted(p_sorted, cands, side="left")
    best = math.inf
    for t, c_le, c_lt in zip(cands, counts_le, counts_lt):
        if c_le > 0:
            best = min(best, p_min * c_le / (t * n))
        # left limit tau -> t from below stays above tau0 only for t > tau0
        if t > tau0 and c_lt > 0:
            best = min(best, p_min * c_lt / (t * n))
    return float(best)


def scan_statistic(pv, tau0: float = 0.05) -> float:
    """p_scan for one p-value vector.  Always satisfies
    n * p_scan <= n * p_min because tau = 1 is a candidate."""
    if not 0.0 < tau0 < 1.0:
        raise ValueError("tau0 must be in (0, 1)")
    return _scan_from_sorted(np.sort(_values(pv)), tau0)


@lru_cache(maxsize=64)
def calibrate_alpha_scan(n: int, cfg: ScanConfig = ScanConfig()) -> float:
    """Empirical alpha-quantile of n * p_scan over calib_reps simulated
    uniform null vectors of length n.  The scan test then rejects when
    n * p_scan < alpha_scan.  Deterministic given the seed; replicates are
    seeded independently of execution order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    vals = np.empty(cfg.calib_reps)
    for rep in range(cfg.calib_reps):
        rng = np.random.default_rng(
            np.random.SeedSequence([cfg.seed, rep, _SCAN_STREAM]))
        u = np.sort(rng.random(n))
        vals[rep] = n * _scan_from_sorted(u, cfg.tau0)
    return float(np.quantile(vals, cfg.alpha))


def scan_test(pv, cfg: ScanConfig = ScanConfig()):
    """Run the calibrated scan test: returns (p_scan, alpha_scan, reject)."""
    p = _values(pv)
    p_scan = scan_statistic(p, cfg.tau0)
    alpha_scan = calibrate_alpha_scan(p.size, cfg)
    return p_scan, alpha_scan, bool(p.size * p_scan < alpha_scan)


def max_ratio_deviation(u_sorted: np.ndarray, tau0: float) -> float:
    """sup over tau > tau0 of |F_hat(tau)/tau - 1| for one sorted sample.

    The supremum over each flat piece of F_hat is attained at an endpoint,
    so order statistics (from both sides) plus the tau0 and 1 endpoints
    are enough.
    """
    n = u_sorted.size
    best = 0.0
    idx = np.arange(1, n + 1)
    above = u_sorted > tau0
    if np.any(above):
        u = u_sorted[above]
        i = idx[above]
        best = max(best,
                   float(np.max(np.abs(i / (n * u) - 1.0))),
                   float(np.max(np.abs((i - 1) / (n * u) - 1.0))))
    # endpoints: tau just above tau0, and tau = 1
    c0 = np.searchsorted(u_sorted, tau0, side="right")
    best = max(best, abs(c0 / (n * tau0) - 1.0))
    best = max(best, abs(np.searchsorted(u_sorted, 1.0, side="right") / n - 1.0))
    return best


def martingale_check(n: int, tau0: float, c: float, reps: int = 10_000,
                     seed: int = 0) -> float:
    """Empirical P(sup_{tau > tau0} |F_hat(tau)/tau - 1| > c) for n iid
    uniforms; the backward-martingale bound says it is at most
    1 / (tau0 c^2 n)."""
    if not 0.0 < tau0 < 1.0:
        raise ValueError("tau0 must be in (0, 1)")
    if c <= 0:
        raise ValueError("c must be positive")
    hits = 0
    for rep in range(reps):
        rng = np.random.default_rng(
            np.random.SeedSequence([seed, rep, _MTGL_STREAM]))
        u = np.sort(rng.random(n))
        if max_ratio_deviation(u, tau0) > c:
            hits += 1
    return hits / reps
