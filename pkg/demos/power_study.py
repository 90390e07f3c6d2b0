"""When does conditioning help?  A small Monte Carlo power study.

Two contrasting settings, 100 tests each:

  * "1 strong, 99 null": one mean at 4, the rest exactly at the null.
    Conditioning cannot help much: there is no conservativeness to
    exploit, and Bonferroni already nails the single strong signal.

  * "1 strong, 99 conservative": one mean at 4, the rest at -1, so 99
    p-values pile up near 1 and drown Fisher-type tests.  Conditioning
    discards that pile; the adaptive threshold walks all the way down
    and restores most of the lost power.

Run:  python3 demos/power_study.py         (about 20 seconds)
"""

from condmt import MethodSpec, ScenarioConfig, run_power_study

METHODS = tuple(
    MethodSpec(test, variant, 0.5)
    for test in ("bonferroni", "fisher")
    for variant in ("unconditional", "conditional", "adaptive")
)

for preset in ("1_strong_99_null", "1_strong_99_conservative"):
    cfg = ScenarioConfig(mu=preset, reps=2000, seed=7, name=preset,
                         methods=METHODS)
    print(run_power_study(cfg, workers=4).to_text())

print("""Reading the tables: in the first setting all variants of a
given test agree to within Monte Carlo error.  In the second, the
unconditional Fisher test has essentially zero power while its
conditional and adaptive variants recover it almost entirely.""")
