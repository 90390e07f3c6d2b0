"""Construction of valid p-values for the testing problems supported by
this package, plus numeric checks of uniform conservativeness.

A p-value with CDF F is *uniformly conservative* when F(tau * x) <= x * F(tau)
for all x, tau in (0, 1]; convexity of F is a sufficient condition.  The
checks here evaluate that criterion on a finite grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .distributions import std_normal_cdf, std_normal_pdf, std_normal_quantile

# Smallest p-value fed to log-based combiners; zeros are clamped here so
# -2*log(p) stays finite.
P_FLOOR = 1e-300


@dataclass(frozen=True)
class NullCdf:
    """A null CDF u -> F(u) on [0, 1] with a human-readable label."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    def __call__(self, u):
        return self.evaluate(np.asarray(u, dtype=float))


def one_sided_p(y):
    """One-sided p-value 1 - Phi(y) for a z-statistic y."""
    return 1.0 - std_normal_cdf(y)


def practical_importance_p(x, sigma, eta):
    """P-value for the interval null |mu| <= eta given X ~ N(mu, sigma^2).

    Evaluated at the boundary mu = eta, which is least favorable within the
    null by the monotone likelihood ratio of the folded normal family:

        p = Phi(-(|x| - eta)/sigma) + Phi(-(|x| + eta)/sigma)

    With eta = 0 this reduces to the usual two-sided p-value 2*Phi(-|x|/sigma).
    """
    sigma = float(sigma)
    eta = float(eta)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    ax = np.abs(np.asarray(x, dtype=float))
    out = std_normal_cdf(-(ax - eta) / sigma) + std_normal_cdf(-(ax + eta) / sigma)
    if out.ndim == 0:
        return float(out)
    return out


def heteroscedastic_p(y, sigma_plus):
    """Worst-case two-sided p-value 2*Phi(-|y|/sigma_plus) when only an upper
    bound sigma_plus on the noise scale is trusted."""
    sigma_plus = float(sigma_plus)
    if sigma_plus <= 0:
        raise ValueError("sigma_plus must be positive")
    ay = np.abs(np.asarray(y, dtype=float))
    out = 2.0 * std_normal_cdf(-ay / sigma_plus)
    if out.ndim == 0:
        return float(out)
    return out


def heteroscedastic_null_cdf(kappa) -> NullCdf:
    """Null CDF of ``heteroscedastic_p`` when the true scale is
    sigma_plus / kappa:  F(u) = 2*Phi(kappa * Phi^{-1}(u/2)).

    This CDF is convex on (0, 1), hence uniformly conservative.  kappa = 1 is
    allowed as a convenience and returns the identity (uniform) CDF.
    """
    kappa = float(kappa)
    if kappa < 1.0:
        raise ValueError("kappa must be >= 1")
    if kappa == 1.0:
        return NullCdf(lambda u: np.clip(u, 0.0, 1.0), "uniform (kappa=1)")

    def _eval(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        out = np.zeros_like(u)
        interior = (u > 0.0) & (u < 1.0)
        if np.any(interior):
            z = std_normal_quantile(u[interior] / 2.0)
            out[interior] = 2.0 * std_normal_cdf(kappa * z)
        out[u >= 1.0] = 1.0
        return out

    return NullCdf(_eval, f"heteroscedastic worst-case, kappa={kappa}")


def shifted_normal_null_cdf(mu) -> NullCdf:
    """Null CDF of the one-sided p-value 1 - Phi(Y) when Y ~ N(mu, 1):
    F(u) = 1 - Phi(Phi^{-1}(1 - u) - mu).  Uniformly conservative for mu < 0.
    """
    mu = float(mu)

    def _eval(u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        out = np.zeros_like(u)
        interior = (u > 0.0) & (u < 1.0)
        if np.any(interior):
            out[interior] = 1.0 - std_normal_cdf(
                std_normal_quantile(1.0 - u[interior]) - mu
            )
        out[u >= 1.0] = 1.0
        return out

    return NullCdf(_eval, f"one-sided normal null, mu={mu}")


@dataclass(frozen=True)
class ConservativenessReport:
    passed: bool
    max_violation: float
    argmax: tuple = field(default=(np.nan, np.nan))


def check_uniform_conservative(
    cdf: NullCdf, grid_size: int = 100, tol: float = 1e-9
) -> ConservativenessReport:
    """Grid check of the uniform-conservativeness criterion
    F(tau * x) <= x * F(tau) over (x, tau) in (0, 1]^2.

    Returns a report with the maximum of F(tau*x) - x*F(tau) found; the check
    passes when that maximum is <= ``tol``.
    """
    if grid_size < 10:
        raise ValueError("grid_size must be at least 10")
    grid = np.linspace(1.0 / grid_size, 1.0, grid_size)
    x = grid[:, None]
    tau = grid[None, :]
    viol = cdf(x * tau) - x * cdf(tau)
    idx = np.unravel_index(np.argmax(viol), viol.shape)
    max_viol = float(viol[idx])
    return ConservativenessReport(
        passed=max_viol <= tol,
        max_violation=max_viol,
        argmax=(float(grid[idx[0]]), float(grid[idx[1]])),
    )


def folded_normal_density(x, mu):
    """Density of |X| at x > 0 for X ~ N(mu, 1)."""
    x = np.asarray(x, dtype=float)
    return std_normal_pdf(x - mu) + std_normal_pdf(x + mu)
