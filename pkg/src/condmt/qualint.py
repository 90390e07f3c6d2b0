"""Tests for qualitative interaction: does some unit have a strictly
positive effect while another has a strictly negative one?

The null of no qualitative interaction is the union of two one-sided
global nulls, H0+ (all effects nonnegative) and H0- (all effects
nonpositive).  Each side is tested with any (conditional) global test on
its own one-sided p-values, and the final p-value is the larger of the two
combined p-values.  Baselines: the interval-based graphical approach
(equivalent to Sidak on both sides) and the Gail-Simon likelihood ratio
test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .adaptive_tau import AdaptiveConfig, auto_select_tau
from .conditional import conditional_test
from .distributions import chisq_sf, std_normal_cdf
from .global_tests import CombinedResult, PValueVector


@dataclass(frozen=True)
class StudyRecord:
    """One study/subgroup: an effect estimate with its standard error."""

    id: str
    estimate: float
    std_err: float
    group: Optional[str] = None

    def __post_init__(self):
        if not math.isfinite(self.estimate):
            raise ValueError(f"estimate for {self.id!r} must be finite")
        if not (math.isfinite(self.std_err) and self.std_err > 0):
            raise ValueError(f"std_err for {self.id!r} must be positive")

    @property
    def z(self) -> float:
        return self.estimate / self.std_err


@dataclass(frozen=True)
class QualIntResult:
    """Both one-sided combined results and their maximum."""

    p_plus: CombinedResult
    p_minus: CombinedResult
    method: str

    @property
    def p_final(self) -> float:
        return max(self.p_plus.p_combined, self.p_minus.p_combined)

    def as_dict(self):
        return {
            "method": self.method,
            "p_final": self.p_final,
            "p_plus": self.p_plus.as_dict(),
            "p_minus": self.p_minus.as_dict(),
        }


def _zvalues(data: Sequence[StudyRecord]) -> np.ndarray:
    if len(data) == 0:
        raise ValueError("need at least one study record")
    return np.array([r.z for r in data], dtype=float)


def split_pvalues(data: Sequence[StudyRecord]):
    """One-sided p-values for both directions.

    pv_plus_i = Phi(z_i) tests H0i+: mu_i >= 0 (small when z_i is very
    negative); pv_minus_i = 1 - pv_plus_i tests H0i-: mu_i <= 0.  The two
    vectors are exactly antithetic.
    """
    z = _zvalues(data)
    plus = np.asarray(std_normal_cdf(z), dtype=float)
    labels = [r.id for r in data]
    return PValueVector(plus, labels), PValueVector(1.0 - plus, labels)


def _one_side(pv: PValueVector, method: str, tau, adaptive_config, options):
    if tau == "adaptive":
        chosen = auto_select_tau(pv, adaptive_config or AdaptiveConfig())
        return conditional_test(pv, chosen, method, **options)
    return conditional_test(pv, float(tau), method, **options)


def qualitative_interaction_test(data: Sequence[StudyRecord], method: str,
                                 tau=1.0,
                                 adaptive_config: AdaptiveConfig | None = None,
                                 **options) -> QualIntResult:
    """Reject no-qualitative-interaction when BOTH one-sided global nulls
    are rejected, i.e. at level alpha when max(p_plus, p_minus) <= alpha.

    ``tau`` is a fixed threshold in (0, 1] (1.0 = unconditional) or the
    string "adaptive", in which case the threshold is selected separately
    on each side from that side's own p-values.
    """
    pv_plus, pv_minus = split_pvalues(data)
    return QualIntResult(
        p_plus=_one_side(pv_plus, method, tau, adaptive_config, options),
        p_minus=_one_side(pv_minus, method, tau, adaptive_config, options),
        method=method,
    )


def ibga(data: Sequence[StudyRecord]) -> QualIntResult:
    """Interval-based graphical approach: equivalent to the unconditional
    Sidak correction applied to both one-sided p-value vectors."""
    return qualitative_interaction_test(data, "sidak", tau=1.0)


def gail_simon_statistic(data: Sequence[StudyRecord]):
    """(Q_plus, Q_minus) with Q+- = sum of z_i^2 over the z_i of each sign."""
    z = _zvalues(data)
    q_plus = float(np.sum(z[z > 0] ** 2))
    q_minus = float(np.sum(z[z < 0] ** 2))
    return q_plus, q_minus


def gail_simon_lrt(data: Sequence[StudyRecord]) -> float:
    """Likelihood ratio test of qualitative interaction for n normal
    subgroup estimates with known standard errors.

    The statistic is Q = min(Q+, Q-) and the null p-value is the binomial
    mixture of chi-square tails

        p = sum_{h=1}^{n-1} C(n-1, h) (1/2)^(n-1) P(chi2_h > Q),

    the least favorable configuration being n-1 effects at the zero
    boundary and one pushed to infinity (which pins the sign of one sum of
    squares).  At alpha = 0.05 this gives the published critical values
    2.706, 4.231, 5.43 for n = 2, 3, 4.
    """
    z = _zvalues(data)
    n = z.size
    if n < 2:
        return 1.0
    q_plus, q_minus = gail_simon_statistic(data)
    q = min(q_plus, q_minus)
    if q <= 0.0:
        return 1.0
    h = np.arange(1, n)
    log_weights = (gammaln(n) - gammaln(h + 1) - gammaln(n - h)
                   - (n - 1) * math.log(2.0))
    tails = chisq_sf(np.full(n - 1, q), h)
    return float(min(1.0, np.exp(logsumexp(log_weights, b=tails))))


def pool_by_group(data: Sequence[StudyRecord]) -> list[StudyRecord]:
    """Inverse-variance pooling of records that share a group label.

    Records with no group label pass through unchanged.  The pooled
    estimate is sum(w_i x_i)/sum(w_i) with w_i = 1/std_err_i^2 and pooled
    standard error 1/sqrt(sum(w_i)).
    """
    if len(data) == 0:
        raise ValueError("need at least one study record")
    order: list[str] = []
    groups: dict[str, list[StudyRecord]] = {}
    passthrough: list[StudyRecord] = []
    for rec in data:
        if rec.group is None or rec.group == "":
            passthrough.append(rec)
            continue
        if rec.group not in groups:
            order.append(rec.group)
            groups[rec.group] = []
        groups[rec.group].append(rec)
    pooled = []
    for g in order:
        recs = groups[g]
        w = np.array([1.0 / r.std_err**2 for r in recs])
        est = float(np.sum(w * [r.estimate for r in recs]) / np.sum(w))
        se = float(1.0 / math.sqrt(np.sum(w)))
        pooled.append(StudyRecord(id=g, estimate=est, std_err=se, group=g))
    return passthrough + pooled
