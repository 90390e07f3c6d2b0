"""Conditional global tests: select the p-values at or below a threshold
tau, rescale them to p_i / tau, and apply any global test or step-up/step-down
multiplicity procedure to the rescaled values.

When the individual p-values are independent and uniformly valid, the
rescaled values are themselves valid p-values, so every downstream procedure
keeps its nominal error control.  With tau = 1 everything reduces exactly to
the unconditional procedure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import chisq_sf
from .global_tests import (
    CombinedResult,
    PValueVector,
    _values,
    hc_null_sample,
    hc_statistic,
    mc_pvalue,
    run_test,
)
from .pvalue_models import P_FLOOR


@dataclass(frozen=True)
class SelectionSet:
    """The pair (tau, S_tau) together with the rescaled p-values."""

    tau: float
    indices: np.ndarray          # original positions, ascending
    conditional_values: np.ndarray  # p_i / tau for i in S_tau

    @property
    def size(self) -> int:
        return self.indices.size


def select(pv, tau: float) -> SelectionSet:
    """Filter to S_tau = {i : p_i <= tau} and rescale.  Ties are included."""
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must be in (0, 1]")
    p = _values(pv)
    idx = np.flatnonzero(p <= tau)
    return SelectionSet(tau, idx, p[idx] / tau)


def conditional_test(pv, tau: float, method: str, **options) -> CombinedResult:
    """Apply a global test to the conditional p-values {p_i/tau : p_i <= tau}.

    An empty selection gives a combined p-value of 1.  The conditional Fisher
    statistic -2 sum log(p_i/tau) is referred to chi^2 with 2|S_tau| degrees
    of freedom; conditional higher criticism is calibrated by Monte Carlo
    with |S_tau| iid uniforms.
    """
    sel = select(pv, tau)
    if sel.size == 0:
        return CombinedResult(method, 1.0, math.nan, 0, tau=tau)
    res = run_test(sel.conditional_values, method, **options)
    return CombinedResult(res.method, res.p_combined, res.statistic,
                          res.n_used, tau=tau, mc_draws=res.mc_draws)


def conditional_fisher_statistic(pv, tau: float) -> float:
    """T = -2 sum_{p_i <= tau} log(p_i / tau)."""
    sel = select(pv, tau)
    vals = np.clip(sel.conditional_values, P_FLOOR, 1.0)
    return float(-2.0 * np.sum(np.log(vals)))


def power_ratio(pv, tau: float) -> float:
    """Exact finite-sample ratio of the conditional to the unconditional
    Bonferroni p-value, |S_tau| / (tau * n), when the minimum p-value is
    selected."""
    p = _values(pv)
    sel = select(p, tau)
    if sel.size == 0:
        raise ValueError("S_tau is empty; the power ratio is undefined")
    return sel.size / (tau * p.size)


def _step_rejections(values: np.ndarray, level: float, procedure: str) -> np.ndarray:
    """Boolean rejection mask for Holm / Hochberg / Benjamini-Hochberg applied
    to ``values`` at ``level`` with m = len(values)."""
    m = values.size
    order = np.argsort(values, kind="stable")
    sorted_v = values[order]
    ranks = np.arange(1, m + 1)
    reject_sorted = np.zeros(m, dtype=bool)
    if procedure == "holm":
        # step-down: stop at the first non-rejection
        crit = level / (m - ranks + 1)
        fails = np.flatnonzero(sorted_v > crit)
        k = fails[0] if fails.size else m
        reject_sorted[:k] = True
    elif procedure == "hochberg":
        # step-up: reject 1..k for the largest k with p_(k) <= alpha/(m-k+1)
        crit = level / (m - ranks + 1)
        ok = np.flatnonzero(sorted_v <= crit)
        if ok.size:
            reject_sorted[: ok[-1] + 1] = True
    elif procedure == "bh":
        crit = level * ranks / m
        ok = np.flatnonzero(sorted_v <= crit)
        if ok.size:
            reject_sorted[: ok[-1] + 1] = True
    else:
        raise ValueError("procedure must be 'holm', 'hochberg' or 'bh'")
    mask = np.zeros(m, dtype=bool)
    mask[order] = reject_sorted
    return mask


def conditional_multiplicity(pv, tau: float, procedure: str,
                             level: float) -> np.ndarray:
    """Run a step procedure on the conditional p-values and report the
    rejected ORIGINAL indices (ascending).  Indices outside S_tau are never
    rejected."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    sel = select(pv, tau)
    if sel.size == 0:
        return np.array([], dtype=int)
    mask = _step_rejections(sel.conditional_values, level, procedure)
    return sel.indices[mask]


def conditional_bonferroni_rejections(pv, tau: float, level: float) -> np.ndarray:
    """Single-step conditional Bonferroni: reject i in S_tau when
    p_i / tau <= level / |S_tau|.  Returns original indices."""
    sel = select(pv, tau)
    if sel.size == 0:
        return np.array([], dtype=int)
    return sel.indices[sel.conditional_values <= level / sel.size]


def conditional_higher_criticism(pv, tau: float, q_max: float = 0.5,
                                 mc_draws: int = 10000, seed: int = 0,
                                 null_sorted: np.ndarray | None = None) -> CombinedResult:
    """Conditional higher criticism with the null table drawn for m = |S_tau|
    iid uniforms.  ``null_sorted`` allows reusing a cached calibration table."""
    sel = select(pv, tau)
    if sel.size == 0:
        return CombinedResult("higher_criticism", 1.0, -math.inf, 0, tau=tau,
                              mc_draws=mc_draws)
    stat = hc_statistic(np.sort(sel.conditional_values), q_max)
    if stat == -math.inf:
        return CombinedResult("higher_criticism", 1.0, stat, sel.size, tau=tau,
                              mc_draws=mc_draws)
    if null_sorted is None:
        null_sorted = hc_null_sample(sel.size, mc_draws, seed, q_max)
    return CombinedResult("higher_criticism", mc_pvalue(null_sorted, stat),
                          stat, sel.size, tau=tau, mc_draws=mc_draws)
