"""Hardy-space norms, the pointwise growth bound, and the Szegő kernel.

Norms are circle means evaluated with the uniform trapezoid rule, which is
exact (up to roundoff) for trigonometric polynomials of degree below half
the node count and spectrally accurate for functions analytic on a
neighbourhood of the circle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .disk import ZeroConfiguration, blaschke_product, interior_array, closed_disk
from .errors import DomainError

DEFAULT_NODES = 4096
#: radius used in place of 1 for functions not known to be continuous on the circle
INNER_RADIUS = 1.0 - 1e-6
POINTWISE_TOL = 1e-9


def hardy_exponent(p) -> float:
    """Validate an exponent ``1 <= p <= inf`` and return it as a float."""
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise DomainError(f"Hardy exponent must satisfy p >= 1, got {p}")
    return p


@dataclass(frozen=True)
class BoundaryEvaluator:
    """A holomorphic function on the disk, evaluated through ``func(z)``.

    ``func`` must accept complex arrays. ``continuous_on_boundary`` states
    whether the function extends continuously to ``|z| = 1`` (polynomials,
    finite Blaschke products and finite kernel combinations do).
    """

    func: Callable[[np.ndarray], np.ndarray]
    continuous_on_boundary: bool = True
    label: str = ""

    def __call__(self, r, theta):
        z = np.asarray(r) * np.exp(1j * np.asarray(theta, dtype=float))
        return self.at(z)

    def at(self, z):
        z = closed_disk(z)
        out = np.asarray(self.func(z), dtype=complex)
        if out.shape != z.shape:
            out = np.broadcast_to(out, z.shape).copy()
        return out[()] if out.ndim == 0 else out


def constant(c=1.0) -> BoundaryEvaluator:
    c = complex(c)
    return BoundaryEvaluator(lambda z: np.full(np.shape(z), c), True, f"constant {c}")


def polynomial(coeffs) -> BoundaryEvaluator:
    """``sum_k coeffs[k] z**k``."""
    c = np.asarray(coeffs, dtype=complex)
    return BoundaryEvaluator(
        lambda z: np.polynomial.polynomial.polyval(z, c), True, f"polynomial deg {len(c) - 1}"
    )


def szego_kernel(w, z):
    """Reproducing kernel of H^2, ``k_w(z) = 1 / (1 - conj(w) z)``."""
    w = complex(interior_array(w, what="kernel point")[0])
    z = closed_disk(z)
    out = 1.0 / (1.0 - np.conj(w) * z)
    return out[()] if out.ndim == 0 else out


def normalized_kernel(w) -> BoundaryEvaluator:
    """``k_w / ||k_w||_2``, the unit-norm extremal function for evaluation at ``w``."""
    w = complex(interior_array(w, what="kernel point")[0])
    scale = math.sqrt(1.0 - abs(w) ** 2)
    return BoundaryEvaluator(
        lambda z: scale / (1.0 - np.conj(w) * z), True, f"normalized kernel at {w}"
    )


def kernel_expansion(base_points, coefficients) -> BoundaryEvaluator:
    """``sum_i coefficients[i] k_{base_points[i]}``."""
    w = interior_array(base_points, what="kernel point")
    c = np.asarray(coefficients, dtype=complex).ravel()
    if c.shape != w.shape:
        raise ValueError("base points and coefficients differ in length")

    def func(z):
        z = np.asarray(z, dtype=complex)
        terms = c.reshape((-1,) + (1,) * z.ndim) / (
            1.0 - np.conj(w).reshape((-1,) + (1,) * z.ndim) * z
        )
        return terms.sum(axis=0)

    return BoundaryEvaluator(func, True, f"kernel expansion ({w.size} terms)")


def blaschke(cfg: ZeroConfiguration) -> BoundaryEvaluator:
    cfg = cfg if isinstance(cfg, ZeroConfiguration) else ZeroConfiguration.of(cfg)
    return BoundaryEvaluator(lambda z: blaschke_product(cfg, z), True, f"Blaschke product n={len(cfg)}")


def hp_norm(g: BoundaryEvaluator, p, nodes=DEFAULT_NODES, radius=1.0) -> float:
    """Circle mean ``(1/2pi int |g(r e^{it})|^p dt)^{1/p}`` by the trapezoid rule.

    For ``p = inf`` the maximum of ``|g|`` over the nodes is returned.

    Parameters
    ----------
    g : BoundaryEvaluator
    p : float
        Exponent in ``[1, inf]``.
    nodes : int
        Power of two, at least 16.
    radius : float
        In ``(0, 1]``. A radius of 1 is replaced by `INNER_RADIUS`, with a
        warning about the bias, when ``g`` is not continuous on the circle.
    """
    p = hardy_exponent(p)
    nodes = int(nodes)
    if nodes < 16 or nodes & (nodes - 1):
        raise DomainError(f"nodes must be a power of two >= 16, got {nodes}")
    if not 0.0 < radius <= 1.0:
        raise DomainError(f"radius must lie in (0, 1], got {radius}")
    if radius == 1.0 and not g.continuous_on_boundary:
        warnings.warn(
            f"{g.label or 'function'} is not known to be continuous on the circle; "
            f"evaluating at radius {INNER_RADIUS} (norm biased low)",
            stacklevel=2,
        )
        radius = INNER_RADIUS
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    mod = np.abs(g(radius, theta))
    if math.isinf(p):
        return float(mod.max())
    # scale by the max so large p does not overflow
    top = mod.max()
    if top == 0.0:
        return 0.0
    return float(top * np.mean((mod / top) ** p) ** (1.0 / p))


def h2_norm_from_coefficients(coeffs) -> float:
    """H^2 norm of ``sum c_k z^k`` by Parseval."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    return float(np.sqrt(np.sum(np.abs(c) ** 2)))


@dataclass(frozen=True)
class PointwiseReport:
    value: float
    bound: float
    ok: bool


def pointwise_bound(p, z) -> float:
    """``(1 - |z|^2)^(-1/p)``, the largest possible ``|f(z)|`` for ``||f||_p = 1``."""
    p = hardy_exponent(p)
    if math.isinf(p):
        return 1.0
    return (1.0 - abs(complex(z)) ** 2) ** (-1.0 / p)


def check_pointwise_bound(g: BoundaryEvaluator, p, z) -> PointwiseReport:
    """Compare ``|g(z)|`` with `pointwise_bound`. The caller certifies ``||g||_p <= 1``."""
    z = complex(interior_array(z)[0])
    value = float(abs(g.at(z)))
    bound = pointwise_bound(p, z)
    return PointwiseReport(value, bound, value <= bound + POINTWISE_TOL)
