"""Data-adaptive choice of the selection threshold tau as a backward
stopping time.

The threshold is chosen by walking down a ladder of cutoffs while looking
only at the p-values ABOVE the current cutoff (the "masked view"), which
keeps the subsequent conditional test valid.  The walk can be driven
automatically by a binomial heuristic or interactively through a
:class:`TauSession`.

The heuristic at cutoff tau_k estimates the p-value density above tau_k
from a window [tau_k, tau_k + w] (clipped at 1) and continues downward
while the window count is significantly LARGER than what the hidden mass
extrapolated uniformly below tau_k would predict: a crowded window is
evidence that |S_tau| / tau is still shrinking as tau decreases.  As a
second continuation trigger, the walk always continues while the selected
fraction |S_tau| / n is already small, because descending further can then
change the selected set only marginally while it keeps shrinking the
multiplicity burden.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .conditional import conditional_test
from .distributions import binom_sf_geq
from .global_tests import CombinedResult, _values

DEFAULT_CUTOFFS = tuple(np.round(np.arange(0.90, 0.0999, -0.05), 2))


@dataclass(frozen=True)
class AdaptiveConfig:
    """Ladder of decreasing cutoffs plus the parameters of the stopping
    heuristic.

    ``benchmark_inflation`` multiplies the extrapolated density benchmark
    q = F_hat(tau)/tau before the binomial window test; values above 1 ask
    for stronger evidence of crowding before continuing.
    ``small_selection_fraction`` is the selected fraction |S_tau|/n at or
    below which the walk continues unconditionally.
    """

    cutoffs: Sequence[float] = DEFAULT_CUTOFFS
    window: float = 0.45
    test_level: float = 0.05
    benchmark_inflation: float = 1.1
    small_selection_fraction: float = 0.15

    def __post_init__(self):
        cuts = tuple(float(c) for c in self.cutoffs)
        if len(cuts) == 0:
            raise ValueError("cutoff ladder must be nonempty")
        if any(not 0.0 < c < 1.0 for c in cuts):
            raise ValueError("cutoffs must lie in (0, 1)")
        if any(b >= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError("cutoffs must be strictly decreasing")
        if not 0.0 < self.window <= 1.0:
            raise ValueError("window must be in (0, 1]")
        if not 0.0 < self.test_level < 1.0:
            raise ValueError("test_level must be in (0, 1)")
        if self.benchmark_inflation <= 0.0:
            raise ValueError("benchmark_inflation must be positive")
        if not 0.0 <= self.small_selection_fraction < 1.0:
            raise ValueError("small_selection_fraction must be in [0, 1)")
        object.__setattr__(self, "cutoffs", cuts)


@dataclass(frozen=True)
class MaskedView:
    """Everything an analyst may see at one step of the protocol."""

    n: int
    current_tau: float
    values_above_tau: np.ndarray
    heuristic_suggestion: str  # "continue" or "stop"


def _heuristic_continue(n: int, hidden_count: int, window_count: int,
                        tau: float, cfg: AdaptiveConfig) -> bool:
    """Decide from view-derivable counts whether to continue below ``tau``.

    Continues when |S_tau| <= small_selection_fraction * n, or when
    P(Bin(n, q*w) >= window_count) <= test_level with
    q = benchmark_inflation * F_hat(tau) / tau and w = min(window, 1 - tau),
    i.e. when the density above the cutoff is significantly larger than the
    extrapolated hidden density.
    """
    if hidden_count <= cfg.small_selection_fraction * n:
        return True
    f_hat = hidden_count / n
    w = min(cfg.window, 1.0 - tau)
    rate = min(1.0, cfg.benchmark_inflation * (f_hat / tau) * w)
    return binom_sf_geq(window_count, n, rate) <= cfg.test_level


def _view_counts(values: np.ndarray, tau: float, window: float):
    hidden = int(np.count_nonzero(values <= tau))
    w = min(window, 1.0 - tau)
    in_window = int(np.count_nonzero((values > tau) & (values <= tau + w)))
    return hidden, in_window


def auto_select_tau(pv, cfg: AdaptiveConfig | None = None) -> float:
    """Walk the cutoff ladder with the binomial heuristic and return the
    chosen tau.  Always returns a member of ``cfg.cutoffs``; if the heuristic
    wants to continue past the last cutoff, the last cutoff is returned."""
    cfg = cfg or AdaptiveConfig()
    p = _values(pv)
    n = p.size
    for tau in cfg.cutoffs:
        hidden, c = _view_counts(p, tau, cfg.window)
        if not _heuristic_continue(n, hidden, c, tau, cfg):
            return tau
    return cfg.cutoffs[-1]


@dataclass(frozen=True)
class TauSession:
    """State of an interactive threshold-selection run.

    The hidden p-values never leave the session except through
    :func:`session_view`, which exposes only the values above the current
    cutoff.  Sessions are immutable; ``advance``/``stop`` return new states.
    """

    hidden: np.ndarray = field(repr=False)
    config: AdaptiveConfig
    step: int = 0
    status: str = "active"  # or "stopped"
    chosen_tau: Optional[float] = None

    @property
    def current_tau(self) -> float:
        if self.status == "stopped":
            return self.chosen_tau
        return self.config.cutoffs[self.step]


def open_session(pv, cfg: AdaptiveConfig | None = None) -> TauSession:
    """Start an interactive run at the first cutoff."""
    cfg = cfg or AdaptiveConfig()
    return TauSession(hidden=_values(pv).copy(), config=cfg)


def session_view(s: TauSession) -> MaskedView:
    """Masked view at the current step: only n and {p_i : p_i > tau_k}."""
    if s.status != "active":
        raise RuntimeError("session is stopped; no further views")
    tau = s.current_tau
    cfg = s.config
    visible = np.sort(s.hidden[s.hidden > tau])
    n = s.hidden.size
    hidden_count = n - visible.size
    w = min(cfg.window, 1.0 - tau)
    window_count = int(np.count_nonzero(visible <= tau + w))
    cont = _heuristic_continue(n, hidden_count, window_count, tau, cfg)
    return MaskedView(n=n, current_tau=tau, values_above_tau=visible,
                      heuristic_suggestion="continue" if cont else "stop")


def advance(s: TauSession) -> TauSession:
    """Move to the next cutoff; auto-stops when already at the last one."""
    if s.status != "active":
        raise RuntimeError("cannot advance a stopped session")
    if s.step + 1 >= len(s.config.cutoffs):
        return stop(s)
    return replace(s, step=s.step + 1)


def stop(s: TauSession) -> TauSession:
    """Freeze the threshold at the current cutoff."""
    if s.status != "active":
        raise RuntimeError("session already stopped")
    return replace(s, status="stopped", chosen_tau=s.current_tau)


def finalize(s: TauSession, method: str, **options) -> CombinedResult:
    """Run the conditional global test at the frozen threshold."""
    if s.status != "stopped":
        raise RuntimeError("finalize requires a stopped session")
    return conditional_test(s.hidden, s.chosen_tau, method, **options)
