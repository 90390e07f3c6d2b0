"""Deterministic Monte Carlo engine for power and error-rate studies of
the (conditional) global tests, the multiplicity procedures, and the
qualitative-interaction tests.

Replicates are seeded with counter-based sequences keyed by
(seed, replicate index, stream), so results are bitwise identical no
matter how replicates are scheduled across workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq
from scipy.stats import chi2 as _chi2

from .adaptive_tau import AdaptiveConfig, auto_select_tau
from .conditional import conditional_bonferroni_rejections
from .distributions import std_normal_cdf
from .global_tests import (
    hc_null_sample,
    hc_plus_null_sample,
    hc_plus_statistic,
    hc_statistic,
    mc_pvalue,
    truncated_product_pvalue,
)
from .qualint import StudyRecord, gail_simon_lrt

_NOISE_STREAM = 0x4E5A

# ---------------------------------------------------------------------------
# scenario configuration


def preset_mu(name: str, n: Optional[int] = None) -> np.ndarray:
    """Expand a named mean-vector preset to a full vector.

    Power-study presets use n = 100, the rejection-count presets n = 1000;
    an explicit ``n`` must match the preset's length.
    """
    presets = {
        "all_null": np.zeros(100),
        "1_strong_99_null": np.r_[4.0, np.zeros(99)],
        "1_strong_99_conservative": np.r_[4.0, -np.ones(99)],
        "20_weak_80_null": np.r_[np.ones(20), np.zeros(80)],
        "20_weak_80_conservative": np.r_[np.ones(20), -np.ones(80)],
        "no_conservative": np.r_[np.full(20, 4.0), np.zeros(980)],
        "conservative": np.r_[np.full(20, 4.0), -np.ones(980)],
        "1_positive_99_null": np.r_[4.0, np.zeros(99)],
        "1_positive_1_negative": np.r_[4.0, -4.0, np.zeros(98)],
        "1_positive_99_negative": np.r_[4.0, -np.ones(99)],
        "20_positive_80_negative": np.r_[np.ones(20), -np.ones(80)],
        "50_positive_50_negative": np.r_[np.ones(50), -np.ones(50)],
        "gradual_low": np.linspace(-1.5, 2.0, 100),
        "gradual_high": np.linspace(-1.5, 4.0, 100),
    }
    if name not in presets:
        raise ValueError(f"unknown preset {name!r}; choose from "
                         f"{sorted(presets)}")
    mu = presets[name]
    if n is not None and n != mu.size:
        raise ValueError(f"preset {name!r} has length {mu.size}, not {n}")
    return mu.copy()


@dataclass(frozen=True)
class MethodSpec:
    """One column of a power study: a global test plus how tau is chosen."""

    test: str                       # bonferroni|fisher|higher_criticism|truncated_product
    variant: str = "unconditional"  # unconditional | conditional | adaptive
    tau: float = 0.5                # used by the conditional variant only

    def __post_init__(self):
        if self.variant not in ("unconditional", "conditional", "adaptive"):
            raise ValueError("variant must be unconditional, conditional or "
                             "adaptive")
        if self.variant == "conditional" and not 0.0 < self.tau <= 1.0:
            raise ValueError("conditional tau must be in (0, 1]")

    @property
    def label(self) -> str:
        if self.variant == "conditional":
            return f"{self.test}/conditional(tau={self.tau:g})"
        return f"{self.test}/{self.variant}"


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one Monte Carlo study needs, including its seed."""

    mu: Union[str, Sequence[float]]
    reps: int
    methods: tuple = ()
    n: Optional[int] = None
    rho: float = 0.0
    level: float = 0.05
    seed: int = 0
    name: str = ""
    adaptive: AdaptiveConfig = field(default_factory=AdaptiveConfig)

    def __post_init__(self):
        mu = (preset_mu(self.mu, self.n) if isinstance(self.mu, str)
              else np.asarray(self.mu, dtype=float))
        if mu.ndim != 1 or mu.size == 0:
            raise ValueError("mu must be a nonempty vector or preset name")
        n = mu.size
        if self.n is not None and self.n != n:
            raise ValueError("n does not match the length of mu")
        if not (-1.0 / (n - 1) - 1e-12 <= self.rho <= 0.99) and n > 1:
            raise ValueError("rho must be in [-1/(n-1), 0.99]")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must be in (0, 1)")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "methods", tuple(self.methods))


def _correlated_noise(rng: np.random.Generator, n: int, rho: float) -> np.ndarray:
    """Unit-variance equi-correlated Gaussian noise.

    For rho >= 0 the one-factor form sqrt(1-rho) X + sqrt(rho) W is used.
    For negative rho (down to -1/(n-1)) the exact spectral construction
    scales the mean component: sqrt(1-rho) (X - Xbar) + sqrt(1-rho+n*rho) Xbar.
    """
    x = rng.standard_normal(n)
    if rho == 0.0:
        return x
    if rho > 0.0:
        w = rng.standard_normal()
        return math.sqrt(1.0 - rho) * x + math.sqrt(rho) * w
    xbar = x.mean()
    return (math.sqrt(1.0 - rho) * (x - xbar)
            + math.sqrt(max(1.0 - rho + n * rho, 0.0)) * xbar)


def _pvalues_for_rep(cfg: ScenarioConfig, rep_index: int) -> np.ndarray:
    rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, rep_index, _NOISE_STREAM]))
    y = cfg.mu + _correlated_noise(rng, cfg.n, cfg.rho)
    return np.asarray(std_normal_cdf(-y), dtype=float)


def generate_statistics(cfg: ScenarioConfig, rep_index: int) -> np.ndarray:
    """One replicate of p-values p_i = 1 - Phi(Y_i), Y ~ N(mu, Sigma(rho)).
    Bitwise deterministic given (seed, rep_index)."""
    return _pvalues_for_rep(cfg, rep_index)


# ---------------------------------------------------------------------------
# fast rejection tests via cached critical values


class Rejector:
    """Level-alpha accept/reject decisions for each global test, with
    critical values cached per selection size m."""

    def __init__(self, level: float, trunc: float = 0.5, q_max: float = 0.5,
                 hc_draws: int = 10_000, hc_seed: int = 0):
        self.level = level
        self.trunc = trunc
        self.q_max = q_max
        self.hc_draws = hc_draws
        self.hc_seed = hc_seed
        self._fisher_cv: dict[int, float] = {}
        self._tpm_cv: dict[int, float] = {}
        self._hc_null: dict[tuple, np.ndarray] = {}

    def reject(self, test: str, sel: np.ndarray) -> bool:
        """sel holds the (already rescaled) conditional p-values."""
        m = sel.size
        if m == 0:
            return False
        if test == "bonferroni":
            return m * float(sel.min()) <= self.level
        if test == "fisher":
            cv = self._fisher_cv.get(m)
            if cv is None:
                cv = self._fisher_cv[m] = float(_chi2.isf(self.level, 2 * m))
            stat = -2.0 * float(np.sum(np.log(np.clip(sel, 1e-300, 1.0))))
            return stat >= cv
        if test == "truncated_product":
            cv = self._tpm_cv.get(m)
            if cv is None:
                cv = self._tpm_cv[m] = self._tpm_critical(m)
            below = sel[sel <= self.trunc]
            if below.size == 0:
                return False
            log_w = float(np.sum(np.log(np.clip(below, 1e-300, 1.0))))
            return log_w <= cv
        if test in ("higher_criticism", "hc_plus"):
            null = self._hc_null.get((test, m))
            if null is None:
                sampler = (hc_plus_null_sample if test == "hc_plus"
                           else hc_null_sample)
                null = self._hc_null[(test, m)] = sampler(
                    m, self.hc_draws, self.hc_seed, self.q_max)
            statfn = hc_plus_statistic if test == "hc_plus" else hc_statistic
            stat = statfn(np.sort(sel), self.q_max)
            if stat == -math.inf:
                return False
            return mc_pvalue(null, stat) <= self.level
        raise ValueError(f"unknown test {test!r}")

    def _tpm_critical(self, m: int) -> float:
        f = lambda lw: truncated_product_pvalue(lw, m, self.trunc) - self.level
        if f(-1e-9) <= 0.0:
            return -1e-9
        return brentq(f, -3000.0, -1e-9, xtol=1e-10)


# ---------------------------------------------------------------------------
# power studies


@dataclass(frozen=True)
class PowerRow:
    scenario: str
    method: str
    estimate: float
    mc_se: float
    reps: int


@dataclass(frozen=True)
class PowerTable:
    rows: tuple

    def to_json(self) -> str:
        return json.dumps([row.__dict__ for row in self.rows], indent=2)

    def to_text(self) -> str:
        w_s = max([len("scenario")] + [len(r.scenario) for r in self.rows])
        w_m = max([len("method")] + [len(r.method) for r in self.rows])
        lines = [f"{'scenario':<{w_s}}  {'method':<{w_m}}  "
                 f"{'power%':>7}  {'mc_se%':>7}  reps"]
        for r in self.rows:
            lines.append(f"{r.scenario:<{w_s}}  {r.method:<{w_m}}  "
                         f"{100 * r.estimate:7.1f}  {100 * r.mc_se:7.2f}  "
                         f"{r.reps}")
        return "\n".join(lines) + "\n"

    def lookup(self, scenario: str, method: str) -> PowerRow:
        for r in self.rows:
            if r.scenario == scenario and r.method == method:
                return r
        raise KeyError((scenario, method))


def _power_counts(cfg: ScenarioConfig, start: int, stop: int) -> np.ndarray:
    rej = Rejector(cfg.level)
    counts = np.zeros(len(cfg.methods), dtype=np.int64)
    need_adaptive = any(s.variant == "adaptive" for s in cfg.methods)
    for rep in range(start, stop):
        p = _pvalues_for_rep(cfg, rep)
        tau_adaptive = auto_select_tau(p, cfg.adaptive) if need_adaptive else None
        for j, spec in enumerate(cfg.methods):
            tau = (1.0 if spec.variant == "unconditional"
                   else spec.tau if spec.variant == "conditional"
                   else tau_adaptive)
            sel = p[p <= tau] / tau
            if rej.reject(spec.test, sel):
                counts[j] += 1
    return counts


def _chunks(reps: int, workers: int):
    size = (reps + workers - 1) // workers
    return [(s, min(s + size, reps)) for s in range(0, reps, size)]


def run_power_study(cfg: ScenarioConfig, workers: int = 1) -> PowerTable:
    """Fraction of replicates rejected at cfg.level per MethodSpec.  The
    adaptive threshold is selected once per replicate and shared by all
    adaptive methods.  Output is identical for any worker count."""
    if not cfg.methods:
        raise ValueError("cfg.methods must be nonempty")
    if workers <= 1 or cfg.reps < 2 * workers:
        counts = _power_counts(cfg, 0, cfg.reps)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_power_counts,
                             *zip(*[(cfg, a, b) for a, b in
                                    _chunks(cfg.reps, workers)]))
        counts = sum(parts)
    rows = []
    for spec, k in zip(cfg.methods, counts):
        est = k / cfg.reps
        rows.append(PowerRow(cfg.name or "scenario", spec.label, float(est),
                             math.sqrt(est * (1 - est) / cfg.reps), cfg.reps))
    return PowerTable(tuple(rows))


# ---------------------------------------------------------------------------
# qualitative-interaction power study (both-sides tests + baselines)


def _qualint_counts(cfg: ScenarioConfig, start: int, stop: int) -> np.ndarray:
    rej = Rejector(cfg.level)
    counts = np.zeros(len(cfg.methods), dtype=np.int64)
    need_adaptive = any(s.variant == "adaptive" for s in cfg.methods)
    for rep in range(start, stop):
        rng = np.random.default_rng(
            np.random.SeedSequence([cfg.seed, rep, _NOISE_STREAM]))
        z = cfg.mu + _correlated_noise(rng, cfg.n, cfg.rho)
        plus = np.asarray(std_normal_cdf(z), dtype=float)
        sides = (plus, 1.0 - plus)
        taus_adaptive = (tuple(auto_select_tau(s, cfg.adaptive) for s in sides)
                         if need_adaptive else None)
        for j, spec in enumerate(cfg.methods):
            if spec.test == "gail_simon":
                records = [StudyRecord(str(i), float(zi), 1.0)
                           for i, zi in enumerate(z)]
                if gail_simon_lrt(records) <= cfg.level:
                    counts[j] += 1
                continue
            test = "sidak_min" if spec.test == "ibga" else spec.test
            ok = True
            for side_idx, side in enumerate(sides):
                tau = (1.0 if spec.variant in ("unconditional",)
                       or spec.test == "ibga"
                       else spec.tau if spec.variant == "conditional"
                       else taus_adaptive[side_idx])
                sel = side[side <= tau] / tau
                if test == "sidak_min":
                    m = sel.size
                    rejected = (m > 0 and
                                -math.expm1(m * math.log1p(-float(sel.min())))
                                <= cfg.level)
                else:
                    rejected = rej.reject(test, sel)
                if not rejected:
                    ok = False
                    break
            if ok:
                counts[j] += 1
    return counts


def run_qualint_power_study(cfg: ScenarioConfig, workers: int = 1) -> PowerTable:
    """Power of the qualitative-interaction tests: reject when BOTH
    one-sided global nulls are rejected at cfg.level.  MethodSpec.test may
    also be "ibga" (unconditional Sidak both sides) or "gail_simon"."""
    if not cfg.methods:
        raise ValueError("cfg.methods must be nonempty")
    if workers <= 1 or cfg.reps < 2 * workers:
        counts = _qualint_counts(cfg, 0, cfg.reps)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_qualint_counts,
                             *zip(*[(cfg, a, b) for a, b in
                                    _chunks(cfg.reps, workers)]))
        counts = sum(parts)
    rows = []
    for spec, k in zip(cfg.methods, counts):
        est = k / cfg.reps
        rows.append(PowerRow(cfg.name or "scenario", spec.label, float(est),
                             math.sqrt(est * (1 - est) / cfg.reps), cfg.reps))
    return PowerTable(tuple(rows))


# ---------------------------------------------------------------------------
# rejection-count study (FWER procedures)


def run_rejection_count_study(cfg: ScenarioConfig, n_signals: int,
                              taus: Sequence = (1.0, 0.5, 0.8, "adaptive")):
    """Summary of the number of true signals rejected by the conditional
    Bonferroni FWER procedure at each threshold choice.

    Returns {tau_label: {"q1", "median", "mean", "q3"}}.
    """
    if not 0 <= n_signals <= cfg.n:
        raise ValueError("n_signals out of range")
    counts = {str(t): np.zeros(cfg.reps) for t in taus}
    for rep in range(cfg.reps):
        p = _pvalues_for_rep(cfg, rep)
        for t in taus:
            tau = auto_select_tau(p, cfg.adaptive) if t == "adaptive" else float(t)
            rejected = conditional_bonferroni_rejections(p, tau, cfg.level)
            counts[str(t)][rep] = np.count_nonzero(rejected < n_signals)
    return {
        label: {
            "q1": float(np.percentile(v, 25)),
            "median": float(np.percentile(v, 50)),
            "mean": float(np.mean(v)),
            "q3": float(np.percentile(v, 75)),
        }
        for label, v in counts.items()
    }


# ---------------------------------------------------------------------------
# dependence experiment


def equicorr_fwer_experiment(rho_grid: Sequence[float], n: int, reps: int,
                             tau: float = 0.5, level: float = 0.05,
                             seed: int = 0) -> dict:
    """Empirical rejection rate of the conditional Bonferroni test under
    the equi-correlated global null, per correlation value."""
    out = {}
    for rho in rho_grid:
        cfg = ScenarioConfig(mu=np.zeros(n), reps=reps, rho=float(rho),
                             level=level, seed=seed,
                             methods=(MethodSpec("bonferroni", "conditional",
                                                 tau),))
        table = run_power_study(cfg)
        out[float(rho)] = table.rows[0].estimate
    return out
