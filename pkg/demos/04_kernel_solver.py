"""D_2 through the Szegő-kernel reduction.

The optimizer lives in the span of the kernels at the constraint points
and at the evaluation point, so each evaluation is a small cone program.
Two regimes have closed forms: slack constraints give the kernel bound
(1 - R^2)^(-1/2), and a single vanishing constraint at 0.5 multiplies it
by the Blaschke factor at the evaluation point.
"""

from hardybounds import (
    ExtremalProblem,
    PointSample,
    generate_sample,
    lower_bound_dp_from_blaschke,
    search_g,
    solve_dp_over_disk,
    validate_certificate,
)

slack = solve_dp_over_disk(ExtremalProblem(generate_sample("spiral", 6), 1.0, 0.6))
print(f"eps = 1, R = 0.6: D_2 = {slack.value:.12f}   (closed form 1.25)")

single = solve_dp_over_disk(ExtremalProblem(PointSample.build([0.5]), 0.0, 0.6))
print(f"eps = 0, E = {{0.5}}: D_2 = {single.value:.12f} at z0 = {single.argmax_z0:.6f}"
      f"   (closed form {11 / 13 * 1.25:.12f})")

prob = ExtremalProblem(generate_sample("uniform_annulus", 8, seed=2), 0.05, 0.5)
res = solve_dp_over_disk(prob)
check = validate_certificate(res.certificate, prob)
print(f"\nuniform_annulus(8), eps = 0.05: D_2 = {res.value:.10f}")
print("  independent re-check:", {k: round(v, 12) for k, v in check.items()})
print("  solver residuals:", res.certificate.residuals)

low = lower_bound_dp_from_blaschke(search_g(prob), prob)
print(f"  Blaschke lower bound {low.value:.10f} <= D_2: {low.value <= res.value + 1e-8}")
