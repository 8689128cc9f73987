"""Regenerate the scaling-probe snapshot on radial_harmonic(40), R = 0.5.

Every row runs the certified search for g and the kernel solver for D_2,
then the report is re-verified and stored under tests/data. The fitted
slope is a recorded observation, not a target: the constants linking
D_2 to g are not known numerically.

Run from the repository root:

    python demos/06_scaling_snapshot.py
"""

import pathlib
import time

from hardybounds import generate_sample, run_sandwich_study, verify_report
from hardybounds.study import build_report, save_report

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "snapshot_radial_harmonic40.json"


def main():
    sample = generate_sample("radial_harmonic", 40, seed=0)
    t0 = time.perf_counter()
    rows = run_sandwich_study(sample, 0.5, budget=200, seed=0)
    elapsed = time.perf_counter() - t0
    print(f"{'eps':>12} {'g':>12} {'D_2':>12} {'log D_2 / log g':>16}")
    for r in rows:
        ratio = "" if r.ratio_log is None else f"{r.ratio_log:16.6f}"
        print(f"{r.epsilon:12.4e} {r.g_value:12.6e} {r.d2_value:12.6e} {ratio}")
    report = build_report(sample, 0.5, rows, budget=200, seed=0)
    assert verify_report(report) == []
    fit = report["fit"]
    print(f"alpha_hat = {fit['alpha_hat']:.6f}, r_squared = {fit['r_squared']:.6f} "
          f"over {fit['rows_used']} rows ({elapsed:.0f} s)")
    save_report(OUT, report)
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
