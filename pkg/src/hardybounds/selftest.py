"""Quick closed-form and oracle checks, run by ``hardybounds selftest``."""

from __future__ import annotations

import math

import numpy as np

from .disk import ZeroConfiguration
from .hardy import blaschke, hp_norm, normalized_kernel, pointwise_bound
from .pointsets import PointSample, generate_sample
from .search import ExtremalProblem, brute_force_g, search_g, sup_on_disk
from .solver import lower_bound_dp_from_blaschke, solve_dp_over_disk, solve_extremal_at_point


def _checks():
    half = PointSample.build([0.5])
    yield "inner function has unit H^2 norm", abs(
        hp_norm(blaschke(ZeroConfiguration.of([0.3, -0.5j, 0.8])), 2) - 1.0) < 1e-6
    z = 0.3 + 0.4j
    yield "normalized kernel attains the pointwise bound", abs(
        abs(normalized_kernel(z).at(z)) - pointwise_bound(2, z)) < 1e-8
    yield "circle maximum of a single factor", abs(sup_on_disk([0.5], 0.5).value - 0.8) < 1e-12
    yield "brute force on E={0.5}, eps=1, R=0.5", abs(
        brute_force_g(ExtremalProblem(half, 1.0, 0.5)).value - 0.8) < 1e-12
    yield "slack constraints give the kernel bound", abs(
        solve_extremal_at_point(ExtremalProblem(half, 1.0, 0.6), 0.6).achieved_value - 1.25) < 1e-6
    yield "one vanishing constraint", abs(
        solve_dp_over_disk(ExtremalProblem(half, 0.0, 0.6), angular_nodes=64).value
        - (11 / 13) * 1.25) < 1e-6
    prob = ExtremalProblem(generate_sample("spiral", 6, seed=0), 0.1, 0.5)
    found, exact = search_g(prob), brute_force_g(prob)
    yield "search matches enumeration", abs(found.value - exact.value) < 1e-9
    lower = lower_bound_dp_from_blaschke(found, prob)
    d2 = solve_dp_over_disk(prob, angular_nodes=64)
    yield "Blaschke lower bound sits below D_2", lower.value <= d2.value + 1e-8
    yield "D_2 at eps >= 1 is the kernel bound", abs(
        solve_dp_over_disk(prob.with_(epsilon=1.0), angular_nodes=32).value
        - 1.0 / math.sqrt(1.0 - 0.25)) < 1e-6
    yield "finite values", bool(np.isfinite(d2.value))


def run_selftest(verbose=False) -> bool:
    ok = True
    for name, passed in _checks():
        ok &= bool(passed)
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
