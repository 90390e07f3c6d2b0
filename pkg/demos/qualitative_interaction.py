"""Detecting a qualitative interaction across subgroups.

A qualitative (disordinal) interaction means some subgroup benefits
from a treatment while another is harmed.  The natural test is a union
of two one-sided global nulls: reject when BOTH "no subgroup is harmed"
and "no subgroup benefits" are rejected.  Any global test can play the
inner role, and conditioning helps exactly as in the one-sided case
because the p-values of the wrong-signed side are conservative.

This demo builds a small synthetic meta-analysis (8 subgroups, two of
them with reversed effects), writes it in the CSV format the CLI
ingests, and compares the classical baselines with the conditional
tests.

Run:  python3 demos/qualitative_interaction.py
"""

import tempfile

from condmt import StudyRecord, gail_simon_lrt, ibga, \
    qualitative_interaction_test
from condmt.io_cli import parse_csv, write_csv

records = [
    StudyRecord("trial_a", 0.42, 0.15, None),
    StudyRecord("trial_b", 0.35, 0.14, None),
    StudyRecord("trial_c", 0.50, 0.18, None),
    StudyRecord("trial_d", 0.28, 0.12, None),
    StudyRecord("trial_e", 0.33, 0.16, None),
    StudyRecord("trial_f", 0.45, 0.17, None),
    StudyRecord("trial_g", -0.52, 0.16, None),   # reversed
    StudyRecord("trial_h", -0.47, 0.15, None),   # reversed
]

with tempfile.NamedTemporaryFile(suffix=".csv", delete=False) as fh:
    path = fh.name
write_csv(path, records)
data = list(parse_csv(path).records)
print(f"{len(data)} subgroups; z-statistics: "
      + ", ".join(f"{r.z:.1f}" for r in data) + "\n")

print(f"{'method':<28} {'p-value':>10}")
print(f"{'Gail-Simon LRT':<28} {gail_simon_lrt(data):>10.4f}")
print(f"{'IBGA (Sidak both sides)':<28} {ibga(data).p_final:>10.4f}")
for method in ("bonferroni", "fisher"):
    for tau in (1.0, 0.5, "adaptive"):
        res = qualitative_interaction_test(data, method, tau=tau)
        label = f"{method} (tau={tau})"
        print(f"{label:<28} {res.p_final:>10.4f}")

print("""
The two reversed trials are strong enough that most methods agree here;
the interesting comparisons appear when the reversal is spread thinly
across many subgroups — run the power tables via
`condmt simulate --table 4` to see the conditional Fisher and truncated
product tests pull far ahead of the LRT and IBGA baselines.""")
