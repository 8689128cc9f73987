"""A sandwich study through the command line.

Writes a sample, runs verify-sandwich over the default epsilon grid,
re-verifies the stored report and fits the scaling probe. Output files
go to the directory given as the first argument (default: a temporary
directory).
"""

import pathlib
import sys
import tempfile

from hardybounds.cli import main

out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path(tempfile.mkdtemp())
out.mkdir(parents=True, exist_ok=True)
sample, report, csv = out / "sample.json", out / "report.json", out / "rows.csv"

steps = [
    ["gen-set", "--family", "spiral", "--count", "8", "--seed", "0", "--out", str(sample)],
    ["verify-sandwich", "--sample", str(sample), "--R", "0.5", "--out", str(report), "--csv", str(csv)],
    ["verify-sandwich", "--report", str(report)],
    ["fit-scaling", "--report", str(report)],
]
for argv in steps:
    print("$ hardybounds", " ".join(argv))
    code = main(argv)
    print(f"  exit {code}")
    if code:
        sys.exit(code)

print("\n" + csv.read_text())
