"""Independent oracles for the test suite.

Everything here is deliberately implemented without using the package
under test: high-precision special functions come from mpmath, null
distributions from brute-force Monte Carlo, and optima from dense grid
search.  Slow but trustworthy.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

mpmath.mp.dps = 40


# ---------------------------------------------------------------------------
# special functions


def mp_normal_cdf(x: float) -> float:
    """Phi(x) via the complementary error function at 40 digits."""
    return float(mpmath.erfc(-mpmath.mpf(x) / mpmath.sqrt(2)) / 2)


def mp_normal_quantile(p: float, tol: float = 1e-14) -> float:
    """Inverse of mp_normal_cdf by bisection on [-40, 40]."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if mp_normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def mp_chisq_sf(x: float, df: int) -> float:
    """P(chi^2_df > x) via the regularized upper incomplete gamma."""
    a = mpmath.mpf(df) / 2
    return float(mpmath.gammainc(a, mpmath.mpf(x) / 2, mpmath.inf,
                                 regularized=True))


def mp_binom_cdf(k: int, n: int, q: float) -> float:
    """P(Bin(n, q) <= k) by direct summation at high precision."""
    if k < 0:
        return 0.0
    k = min(int(k), n)
    qq = mpmath.mpf(q)
    total = mpmath.mpf(0)
    for j in range(k + 1):
        total += mpmath.binomial(n, j) * qq**j * (1 - qq) ** (n - j)
    return float(min(1, total))


# ---------------------------------------------------------------------------
# Monte Carlo null oracles


def tpm_mc_oracle(log_w: float, n: int, trunc: float, reps: int = 200_000,
                  seed: int = 123) -> float:
    """Monte Carlo estimate of P(W <= w) for W = prod of the uniforms at or
    below ``trunc`` among n iid uniforms."""
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(reps):
        u = rng.random(n)
        below = u[u <= trunc]
        lw = np.sum(np.log(below)) if below.size else 0.0
        if lw <= log_w:
            hits += 1
    return hits / reps


def gail_simon_mc_oracle(q_obs: float, n: int, reps: int = 200_000,
                         seed: int = 321) -> float:
    """Monte Carlo tail of min(Q+, Q-) at the least favorable null
    configuration: n-1 effects at zero, one at +infinity (so its square
    is counted in Q+ with certainty and Q = Q- of the remaining n-1)."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((reps, n - 1))
    q_minus = np.sum(np.where(z < 0, z * z, 0.0), axis=1)
    return float(np.mean(q_minus > q_obs))


# ---------------------------------------------------------------------------
# brute-force statistics


def hc_bruteforce(p, q_max: float) -> float:
    """Plain-loop higher criticism: max over order statistics <= q_max of
    (F_hat(p_(i)) - p_(i)) / sqrt(p_(i)(1-p_(i))/n)."""
    p = sorted(float(v) for v in p)
    n = len(p)
    best = -math.inf
    for q in p:
        if q > q_max or q <= 0.0 or q >= 1.0:
            continue
        fhat = sum(1 for v in p if v <= q) / n
        best = max(best, (fhat - q) / math.sqrt(q * (1.0 - q) / n))
    return best


def hc_plus_bruteforce(p, q_max: float = 0.5) -> float:
    """Plain-loop rank-fraction-standardized higher criticism with the
    p_(i) >= 1/n floor."""
    p = sorted(float(v) for v in p)
    n = len(p)
    best = -math.inf
    for i, q in enumerate(p, start=1):
        frac = i / n
        if q < 1.0 / n or frac > q_max or frac >= 1.0:
            continue
        best = max(best, (frac - q) / math.sqrt(frac * (1.0 - frac) / n))
    return best


def scan_dense_oracle(p, tau0: float, grid: int = 1_000_000) -> float:
    """Dense grid (plus one-sided limits at every order statistic)
    approximation of inf over tau > tau0 of p_min |S_tau| / (tau n)."""
    p = np.sort(np.asarray(p, dtype=float))
    n = p.size
    p_min = p[0]
    taus = np.linspace(tau0, 1.0, grid)
    eps = 1e-12
    extra = []
    for t in p[p >= tau0]:
        extra.extend([t - eps, t, t + eps])
    extra.extend([tau0, 1.0 - eps, 1.0])
    taus = np.concatenate([taus, np.clip(extra, tau0, 1.0)])
    best = math.inf
    counts = np.searchsorted(p, taus, side="right")
    ok = counts > 0
    vals = p_min * counts[ok] / (taus[ok] * n)
    if vals.size:
        best = float(vals.min())
    return best
