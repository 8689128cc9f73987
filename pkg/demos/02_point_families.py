"""Point samples standing in for the set E.

Generated samples carry their family, so the non-Blaschke flag (a
property of the infinite sequence) is available even though only a
finite prefix exists. Samples round-trip through JSON bit for bit.
"""

import math
import pathlib
import tempfile

import numpy as np

from hardybounds import blaschke_sum, generate_sample, load_sample, save_sample

for family, params in [("radial_harmonic", {}), ("radial_power", {"beta": 2.0}),
                       ("spiral", {}), ("uniform_annulus", {})]:
    s = generate_sample(family, 100, params, seed=0)
    print(f"{family:16s} n={len(s):3d}  sum(1-|z|) = {blaschke_sum(s):8.5f}  "
          f"max|z| = {np.abs(s.points).max():.5f}  non-Blaschke family: {s.non_blaschke}")

print("\nH_101 - 1 =", math.fsum(1 / k for k in range(1, 102)) - 1)

s = generate_sample("spiral", 12, seed=3)
with tempfile.TemporaryDirectory() as tmp:
    path = pathlib.Path(tmp) / "spiral.json"
    save_sample(path, s)
    back = load_sample(path)
    print("\nround trip identical:", back == s)
    print(path.read_text()[:200], "...")
