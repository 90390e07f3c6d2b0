"""Interactive threshold selection, step by step.

The selection threshold tau may depend on the data without breaking
validity, as long as it is chosen as a *backward stopping time*: at each
cutoff the analyst sees only the p-values ABOVE the cutoff (plus the
count of hidden ones) and decides continue/stop from that masked view
alone.  This demo walks a session down the ladder on the two-signal
example and prints what the analyst sees at each step.

Run:  python3 demos/threshold_walkthrough.py
"""

import numpy as np
from scipy.special import ndtr

from condmt import finalize, open_session, session_view, advance, stop

rng = np.random.default_rng(4)
# two strong signals + 98 conservative nulls: one-sided p-values
# 1 - Phi(Y) with Y ~ N(-1, 1) pile up near 1
p = np.concatenate([[0.001, 0.001],
                    1.0 - ndtr(rng.standard_normal(98) - 1.0)])

s = open_session(p)
print(f"{'tau':>5} {'hidden':>7} {'visible':>8} {'suggestion':>11}")
while True:
    view = session_view(s)
    print(f"{view.current_tau:>5.2f} "
          f"{view.n - view.values_above_tau.size:>7d} "
          f"{view.values_above_tau.size:>8d} "
          f"{view.heuristic_suggestion:>11}")
    if view.heuristic_suggestion == "stop":
        s = stop(s)
        break
    s = advance(s)
    if s.status == "stopped":   # walked past the last rung
        break

print(f"\nchosen tau = {s.chosen_tau}")
res = finalize(s, "fisher")
print(f"conditional Fisher at tau={res.tau}: p = {res.p_combined:.3g} "
      f"on |S_tau| = {res.n_used} selected values")

print("""
Each decision above used only the masked view, so the chosen tau is a
backward stopping time and the final conditional test is valid.  The
same protocol is available over HTTP (`condmt serve`) and in the browser
UI under frontend/.""")
