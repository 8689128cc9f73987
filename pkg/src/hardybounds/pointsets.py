"""Finite point samples standing in for a subset ``E`` of the disk.

Each sample remembers the family that generated it. Whether the parent
sequence satisfies the Blaschke condition is read off the family, because
divergence of ``sum (1 - |z_j|)`` cannot be decided from a finite prefix.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .disk import INTERIOR_LIMIT
from .errors import DomainError, ValidationError

FORMAT_VERSION = 1
DEDUP_TOL = 1e-12
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

FAMILIES = ("radial_harmonic", "radial_power", "spiral", "uniform_annulus", "explicit")


class UnknownFamilyError(ValidationError):
    pass


def _dedup(points: np.ndarray) -> np.ndarray:
    if points.size < 2:
        return points
    tree = cKDTree(np.column_stack([points.real, points.imag]))
    drop = {max(i, j) for i, j in tree.query_pairs(DEDUP_TOL)}
    keep = [k for k in range(points.size) if k not in drop]
    return points[keep]


@dataclass(eq=False)
class PointSample:
    """Ordered, duplicate-free sample of disk points plus generator metadata.

    Use `PointSample.build` to construct from raw points; it deduplicates and
    fills in the cached Blaschke sum.
    """

    points: np.ndarray
    generator: dict = field(default_factory=lambda: {"family": "explicit", "params": {}, "seed": None})
    blaschke_partial_sum: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        if not np.all(np.isfinite(pts)):
            raise DomainError("non-finite sample point")
        if pts.size and np.abs(pts).max() > INTERIOR_LIMIT:
            bad = pts[np.abs(pts) > INTERIOR_LIMIT][0]
            raise DomainError(f"sample point {bad!r} is not strictly inside the unit disk")
        if _dedup(pts).size != pts.size:
            raise ValidationError("sample contains points closer than the dedup tolerance")
        family = self.generator.get("family")
        if family not in FAMILIES:
            raise UnknownFamilyError(f"unknown sample family {family!r}")
        if abs(self.blaschke_partial_sum - _blaschke_sum(pts)) > 1e-12:
            raise ValidationError("cached Blaschke sum does not match the points")
        pts.setflags(write=False)
        self.points = pts

    @classmethod
    def build(cls, points, family="explicit", params=None, seed=None) -> "PointSample":
        pts = _dedup(np.asarray(points, dtype=complex).ravel())
        gen = {"family": family, "params": dict(params or {}), "seed": seed}
        return cls(pts, gen, _blaschke_sum(pts))

    def __len__(self):
        return self.points.size

    def __eq__(self, other):
        if not isinstance(other, PointSample):
            return NotImplemented
        return (
            self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
            and self.generator == other.generator
            and self.blaschke_partial_sum == other.blaschke_partial_sum
        )

    @property
    def family(self) -> str:
        return self.generator["family"]

    @property
    def non_blaschke(self):
        return non_blaschke_family(self.generator)

    def concat(self, other: "PointSample") -> "PointSample":
        return PointSample.build(np.concatenate([self.points, other.points]))


def _blaschke_sum(points) -> float:
    return math.fsum(1.0 - np.abs(np.asarray(points, dtype=complex)))


def blaschke_sum(sample: PointSample) -> float:
    """``sum_j (1 - |z_j|)`` over the sample (exactly rounded)."""
    return _blaschke_sum(sample.points)


def non_blaschke_family(generator: dict):
    """True if the family's infinite parent sequence has ``sum (1 - |z_j|) = inf``.

    Explicit (finite) samples are Blaschke sequences, so they report False.
    """
    family = generator.get("family")
    params = generator.get("params", {})
    if family in ("radial_harmonic", "uniform_annulus"):
        return True
    if family in ("radial_power", "spiral"):
        return float(params.get("beta", 1.0)) <= 1.0
    if family == "explicit":
        return False
    raise UnknownFamilyError(f"unknown sample family {family!r}")


def _angles(rng, count, params):
    if "angle" in params:
        return np.full(count, float(params["angle"]))
    return 2.0 * np.pi * rng.random(count)


def generate_sample(family, count, params=None, seed=0) -> PointSample:
    """Generate the first ``count`` points of a named family.

    Families and their parameters:

    ``radial_harmonic``
        ``|z_j| = 1 - 1/(j+1)``; optional fixed ``angle``, otherwise seeded
        uniform angles.
    ``radial_power``
        ``|z_j| = 1 - 1/(j+1)**beta`` with ``beta > 0``; optional ``angle``.
    ``spiral``
        Radii as ``radial_power`` (``beta`` defaults to 1), angles
        ``phase + j * turn`` (``turn`` defaults to the golden angle).
    ``uniform_annulus``
        Points uniform by area in ``r_min <= |z| <= r_max`` (defaults 0.5, 0.95).
    """
    if family not in FAMILIES or family == "explicit":
        raise UnknownFamilyError(f"cannot generate family {family!r}")
    count = int(count)
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    params = dict(params or {})
    rng = np.random.default_rng(seed)
    j = np.arange(1, count + 1, dtype=float)

    if family == "radial_harmonic":
        radii = 1.0 - 1.0 / (j + 1.0)
        angles = _angles(rng, count, params)
    elif family == "radial_power":
        beta = float(params.setdefault("beta", 1.0))
        if not beta > 0:
            raise ValueError(f"power exponent must be positive, got {beta}")
        radii = 1.0 - (j + 1.0) ** (-beta)
        angles = _angles(rng, count, params)
    elif family == "spiral":
        beta = float(params.setdefault("beta", 1.0))
        if not beta > 0:
            raise ValueError(f"power exponent must be positive, got {beta}")
        turn = float(params.setdefault("turn", GOLDEN_ANGLE))
        phase = float(params.setdefault("phase", 0.0))
        radii = 1.0 - (j + 1.0) ** (-beta)
        angles = phase + turn * j
    else:
        r_min = float(params.setdefault("r_min", 0.5))
        r_max = float(params.setdefault("r_max", 0.95))
        if not 0.0 <= r_min < r_max < 1.0:
            raise ValueError(f"need 0 <= r_min < r_max < 1, got {r_min}, {r_max}")
        radii = np.sqrt(r_min**2 + (r_max**2 - r_min**2) * rng.random(count))
        angles = 2.0 * np.pi * rng.random(count)

    # large counts push 1 - 1/(j+1)**beta to 1 in floating point
    radii = np.minimum(radii, INTERIOR_LIMIT - 1e-15)
    return PointSample.build(radii * np.exp(1j * angles), family, params, seed)


def sample_to_dict(sample: PointSample) -> dict:
    return {
        "version": FORMAT_VERSION,
        "family": sample.generator["family"],
        "params": sample.generator.get("params", {}),
        "seed": sample.generator.get("seed"),
        "points": [[float(z.real), float(z.imag)] for z in sample.points],
        "blaschke_partial_sum": sample.blaschke_partial_sum,
    }


def sample_from_dict(data: dict) -> PointSample:
    if not isinstance(data, dict):
        raise ValidationError("sample record must be a JSON object")
    version = data.get("version")
    if version != FORMAT_VERSION:
        raise ValidationError(f"unsupported sample file version {version!r}")
    family = data.get("family")
    if family not in FAMILIES:
        raise UnknownFamilyError(f"unknown sample family {family!r}")
    try:
        pts = np.array([complex(float(re), float(im)) for re, im in data["points"]], dtype=complex)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed points field: {exc}") from exc
    gen = {"family": family, "params": dict(data.get("params") or {}), "seed": data.get("seed")}
    cached = data.get("blaschke_partial_sum", _blaschke_sum(pts))
    try:
        return PointSample(pts, gen, float(cached))
    except DomainError as exc:
        raise ValidationError(str(exc)) from exc


def write_json_atomic(path, data) -> None:
    """Write JSON to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, indent=1, allow_nan=False)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_sample(path, sample: PointSample) -> None:
    write_json_atomic(path, sample_to_dict(sample))


def load_sample(path) -> PointSample:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    return sample_from_dict(data)
