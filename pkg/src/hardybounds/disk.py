"""Möbius factors, the weight ``1 - |z|`` and finite (weighted) Blaschke products.

Products are accumulated as sums of logarithms so that configurations with
many zeros close to the unit circle do not underflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError

#: largest admissible modulus of a zero or constraint point
INTERIOR_LIMIT = 1.0 - 1e-15
#: slack on ``|z| <= 1`` for evaluation points produced by ``r * exp(i theta)``
BOUNDARY_SLACK = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class DiskPoint:
    """A point strictly inside the unit disk."""

    re: float
    im: float

    def __post_init__(self):
        if not (np.isfinite(self.re) and np.isfinite(self.im)):
            raise DomainError(f"non-finite disk point ({self.re}, {self.im})")
        if abs(complex(self.re, self.im)) > INTERIOR_LIMIT:
            raise DomainError(
                f"point {complex(self.re, self.im)!r} is not strictly inside the unit disk"
            )

    @classmethod
    def from_complex(cls, z) -> "DiskPoint":
        z = complex(z)
        return cls(z.real, z.imag)

    def __complex__(self):
        return complex(self.re, self.im)

    @property
    def modulus(self) -> float:
        return abs(complex(self))


def interior_array(points, what="point") -> np.ndarray:
    """Return ``points`` as a 1-d complex array, rejecting moduli above `INTERIOR_LIMIT`."""
    if isinstance(points, DiskPoint):
        points = [points]
    if isinstance(points, (list, tuple)):
        points = [complex(p) for p in points]
    arr = np.asarray(points, dtype=complex).ravel()
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"non-finite {what}")
    bad = np.abs(arr) > INTERIOR_LIMIT
    if np.any(bad):
        raise DomainError(f"{what} {arr[bad][0]!r} is not strictly inside the unit disk")
    return arr


def closed_disk(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + BOUNDARY_SLACK):
        raise DomainError("evaluation point outside the closed unit disk")
    return z


@dataclass(frozen=True)
class ZeroConfiguration:
    """A multiset ``Z_n`` of zeros inside the disk (repeats count with multiplicity).

    Parameters
    ----------
    zeros : tuple of complex
        At least one zero; each strictly inside the unit disk.
    """

    zeros: tuple

    def __post_init__(self):
        arr = interior_array(list(self.zeros), what="zero")
        if arr.size < 1:
            raise DomainError("a zero configuration needs at least one zero")
        object.__setattr__(self, "zeros", tuple(complex(z) for z in arr))

    @classmethod
    def of(cls, zeros: Iterable) -> "ZeroConfiguration":
        return cls(tuple(complex(z) for z in zeros))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.zeros, dtype=complex)

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)


def blaschke_factor(a, z):
    """Evaluate the Möbius factor ``(z - a) / (1 - conj(a) z)``.

    ``z`` may be a scalar or an array inside the closed disk.
    """
    a = complex(a)
    if not abs(a) < 1.0:
        raise DomainError(f"factor zero {a!r} is not inside the unit disk")
    z = closed_disk(z)
    out = (z - a) / (1.0 - np.conj(a) * z)
    return out[()] if out.ndim == 0 else out


def weight_q(z):
    """The weight ``q(z) = 1 - |z|``; zero on the unit circle."""
    z = closed_disk(z)
    out = np.clip(1.0 - np.abs(z), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def _zeros_of(cfg) -> np.ndarray:
    if isinstance(cfg, ZeroConfiguration):
        return cfg.array
    return interior_array(cfg, what="zero")


def factor_log_moduli(zeros, z) -> np.ndarray:
    """``log|blaschke_factor(zeros[j], z[k])|`` as an array of shape ``(len(zeros),) + z.shape``."""
    a = np.asarray(zeros, dtype=complex).reshape((-1,) + (1,) * np.ndim(z))
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(z - a)) - np.log(np.abs(1.0 - np.conj(a) * z))


def product_log_modulus(cfg, z, weighted=False):
    """Log-modulus of the (weighted) Blaschke product of ``cfg`` at ``z``.

    Returns ``sum_j log|factor(z_j, z)|``, plus ``log(1 - |z|)`` when
    ``weighted``. The value is ``-inf`` exactly where the product vanishes,
    which includes the unit circle in weighted mode.
    """
    zeros = _zeros_of(cfg)
    z = closed_disk(z)
    out = factor_log_moduli(zeros, z).sum(axis=0)
    if weighted:
        with np.errstate(divide="ignore"):
            out = out + np.log(np.clip(1.0 - np.abs(z), 0.0, 1.0))
    return float(out) if np.ndim(out) == 0 else out


def product_modulus(cfg, z, weighted=False):
    """``exp`` of `product_log_modulus`."""
    out = np.exp(product_log_modulus(cfg, z, weighted=weighted))
    return float(out) if np.ndim(out) == 0 else out


def blaschke_product(cfg, z):
    """Complex value of the unweighted product at ``z`` (direct multiplication)."""
    zeros = _zeros_of(cfg)
    z = closed_disk(z)
    out = np.ones_like(z, dtype=complex)
    for a in zeros:
        out = out * (z - a) / (1.0 - np.conj(a) * z)
    return out[()] if out.ndim == 0 else out


def pseudo_hyperbolic(a, b):
    """Möbius-invariant distance ``|a - b| / |1 - conj(b) a|``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    out = np.abs(a - b) / np.abs(1.0 - np.conj(b) * a)
    return float(out) if out.ndim == 0 else out
