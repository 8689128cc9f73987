"""Blaschke products, the weight 1 - |z| and Hardy norms.

A finite Blaschke product is unimodular on the unit circle, so its H^p
norm is 1 for every p. Inside the disk the log-space evaluator keeps
products of hundreds of factors finite where the naive product
underflows to zero.
"""

import math

import numpy as np

from hardybounds import (
    ZeroConfiguration,
    blaschke,
    blaschke_product,
    check_pointwise_bound,
    hp_norm,
    normalized_kernel,
    polynomial,
    product_log_modulus,
    product_modulus,
)

zeros = ZeroConfiguration.of([0.5, -0.3 + 0.6j, 0.8j])
B = blaschke(zeros)
print("H^p norms of a degree-3 Blaschke product:")
for p in (1, 2, 4, math.inf):
    print(f"  p = {p:>3}: {hp_norm(B, p):.15f}")

z = 0.4 - 0.2j
plain = product_modulus(zeros, z)
weighted = product_modulus(zeros, z, weighted=True)
print(f"\nat z = {z}: |B| = {plain:.6f}, (1 - |z|)|B| = {weighted:.6f}, "
      f"ratio = {weighted / plain:.6f} = 1 - |z| = {1 - abs(z):.6f}")

print("\nnorms of 1 + z: H^2 =", hp_norm(polynomial([1, 1]), 2), " H^4 =", hp_norm(polynomial([1, 1]), 4),
      " (6^(1/4) =", 6 ** 0.25, ")")

w = 0.5
rep = check_pointwise_bound(normalized_kernel(w), 2, w)
print(f"\nnormalized kernel at w = {w}: |g(w)| = {rep.value:.12f}, growth bound = {rep.bound:.12f}")

many = [0.9] * 400
print(f"\n400 zeros at 0.9, evaluated at 0.901:")
print(f"  naive product      = {abs(blaschke_product(many, 0.901))}")
print(f"  log-modulus        = {product_log_modulus(many, 0.901):.3f}")
print(f"  400 * single log   = {400 * product_log_modulus([0.9], 0.901):.3f}")
