"""Sandwich studies over an epsilon grid, scaling fits and report files.

Each row pairs a certified lower bound for ``g`` (a zero configuration)
with the ``D_2`` value from the kernel solver (a kernel certificate) and
checks ``g <= D_2``. Reports carry both certificates and the sample, so
they can be re-verified without rerunning the study.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .disk import ZeroConfiguration
from .errors import CertificateError, SandwichViolation, ValidationError
from .pointsets import PointSample, sample_from_dict, sample_to_dict, write_json_atomic
from .search import (
    BRUTE_FORCE_MAX_SAMPLE,
    CertifiedBound,
    ExtremalProblem,
    brute_force_g,
    revalidate,
    search_g,
)
from .solver import (
    certificate_from_dict,
    certificate_to_dict,
    lower_bound_dp_from_blaschke,
    solve_dp_over_disk,
    validate_certificate,
)

REPORT_VERSION = 1
SANDWICH_TOL = 1e-8
ORACLE_MAX_SAMPLE = 10
CSV_COLUMNS = ("epsilon", "g_value", "g_kind", "d2_value", "ratio_log")
DEFAULT_GRID = (0.5, 0.5, 12)


def epsilon_grid(start=DEFAULT_GRID[0], factor=DEFAULT_GRID[1], count=DEFAULT_GRID[2]):
    """Geometric grid ``start * factor**k``, ``k = 0..count-1``."""
    start, factor, count = float(start), float(factor), int(count)
    if not (start > 0 and 0 < factor < 1 and count >= 1):
        raise ValueError(f"need start > 0, 0 < factor < 1, count >= 1; got {start}, {factor}, {count}")
    return [start * factor**k for k in range(count)]


def parse_grid(text: str):
    """Parse ``start:factor:count`` into an epsilon grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"epsilon grid must look like start:factor:count, got {text!r}")
    return epsilon_grid(float(parts[0]), float(parts[1]), int(parts[2]))


@dataclass
class StudyRow:
    epsilon: float
    g_value: float
    g_kind: str
    d2_value: float
    ratio_log: Optional[float]
    g_zeros: list = field(default_factory=list)
    g_oracle: Optional[float] = None
    d2_certificate: dict = field(default_factory=dict)

    def csv_record(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


def _ratio_log(g, d2):
    if 0.0 < g < 1.0 and d2 > 0.0:
        return math.log(d2) / math.log(g)
    return None


def _zeros_pairs(bound: CertifiedBound):
    if bound.certificate is None:
        return []
    return [[z.real, z.imag] for z in bound.certificate]


def _forensics(row: StudyRow, prob: ExtremalProblem):
    return {
        "epsilon": row.epsilon,
        "R": prob.R,
        "g_value": row.g_value,
        "d2_value": row.d2_value,
        "excess": row.g_value - row.d2_value,
        "g_certificate": row.g_zeros,
        "d2_certificate": row.d2_certificate,
    }


def check_row(row: StudyRow, prob: ExtremalProblem, tol=SANDWICH_TOL):
    if row.g_value > row.d2_value + tol:
        raise SandwichViolation(
            f"g = {row.g_value!r} exceeds D_2 = {row.d2_value!r} at eps = {row.epsilon!r}",
            _forensics(row, prob),
        )


def study_row(prob: ExtremalProblem, budget=200, seed=0, angular_nodes=256,
              oracle=None) -> StudyRow:
    """One sandwich row: search (and optionally brute force) for ``g``, kernel solver for ``D_2``.

    ``oracle=None`` runs brute force when the sample has at most
    `ORACLE_MAX_SAMPLE` points. Both certificates are re-validated.
    """
    bound = search_g(prob, budget=budget, seed=seed)
    if oracle is None:
        oracle = len(prob.sample) <= ORACLE_MAX_SAMPLE
    oracle_value = None
    if oracle and len(prob.sample) <= BRUTE_FORCE_MAX_SAMPLE:
        exact = brute_force_g(prob)
        oracle_value = 0.0 if exact.infeasible else exact.value
    if not bound.infeasible:
        revalidate(bound, prob)
        if prob.p == 2.0:
            lower_bound_dp_from_blaschke(bound, prob)
    dmax = solve_dp_over_disk(prob, angular_nodes=angular_nodes)
    validate_certificate(dmax.certificate, prob)
    g_value = 0.0 if bound.infeasible else bound.value
    row = StudyRow(
        epsilon=prob.epsilon,
        g_value=g_value,
        g_kind="infeasible" if bound.infeasible else bound.kind,
        d2_value=dmax.value,
        ratio_log=_ratio_log(g_value, dmax.value),
        g_zeros=_zeros_pairs(bound),
        g_oracle=oracle_value,
        d2_certificate=certificate_to_dict(dmax),
    )
    check_row(row, prob)
    return row


def run_sandwich_study(sample: PointSample, R, epsilons=None, budget=200, seed=0,
                       mode="weighted", angular_nodes=256, oracle=None):
    """Sandwich rows for each epsilon of a descending grid (default 0.5 halved 11 times).

    Raises `SandwichViolation`, with both certificates attached, on the
    first row where ``g > D_2 + 1e-8``.
    """
    epsilons = list(epsilon_grid() if epsilons is None else epsilons)
    if any(not (e > 0 and math.isfinite(e)) for e in epsilons):
        raise ValueError("grid values must be positive and finite")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ValueError("epsilon grid must be strictly descending")
    rows = []
    for eps in epsilons:
        prob = ExtremalProblem(sample, eps, R, p=2.0, mode=mode)
        rows.append(study_row(prob, budget=budget, seed=seed, angular_nodes=angular_nodes,
                              oracle=oracle))
    return rows


@dataclass(frozen=True)
class ScalingFit:
    alpha_hat: float
    intercept: float
    r_squared: float
    rows_used: int


def fit_scaling(rows) -> ScalingFit:
    """Least-squares slope of ``log d2`` against ``log g`` over rows with ``0 < g < 1`` and ``d2 > 0``."""
    pts = [(r.g_value, r.d2_value) for r in rows if 0.0 < r.g_value < 1.0 and r.d2_value > 0.0]
    if len(pts) < 3:
        raise ValidationError(f"need at least 3 usable rows, got {len(pts)}")
    x = np.log([g for g, _ in pts])
    y = np.log([d for _, d in pts])
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0 or sxx <= 1e-28 * len(x):
        raise ValidationError("log g has zero variance; the slope is undefined")
    alpha = float(xc @ (y - y.mean()) / sxx)
    intercept = float(y.mean() - alpha * x.mean())
    resid = y - (alpha * x + intercept)
    yc = y - y.mean()
    ss_tot = float(yc @ yc)
    ss_res = float(resid @ resid)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ScalingFit(alpha, intercept, r2, len(pts))


# -- reports -----------------------------------------------------------------

def build_report(sample: PointSample, R, rows, *, mode="weighted", budget=200, seed=0,
                 angular_nodes=256) -> dict:
    report = {
        "version": REPORT_VERSION,
        "kind": "sandwich-study",
        "params": {
            "R": R,
            "mode": mode,
            "budget": budget,
            "seed": seed,
            "angular_nodes": angular_nodes,
            "epsilons": [r.epsilon for r in rows],
        },
        "sample": sample_to_dict(sample),
        "rows": [asdict(r) for r in rows],
    }
    try:
        fit = fit_scaling(rows)
        report["fit"] = asdict(fit)
    except ValidationError as exc:
        report["fit"] = {"error": str(exc)}
    return report


def save_report(path, report) -> None:
    write_json_atomic(path, report)


def load_report(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict) or data.get("version") != REPORT_VERSION or "rows" not in data:
        raise ValidationError(f"{path}: not a version-{REPORT_VERSION} study report")
    return data


def rows_from_report(report: dict):
    try:
        return [StudyRow(**r) for r in report["rows"]]
    except TypeError as exc:
        raise ValidationError(f"malformed study row: {exc}") from exc


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        rec = r.csv_record()
        writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                         for k, v in rec.items()})
    return buf.getvalue()


def write_csv(path, rows) -> None:
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(rows_to_csv(rows))
    os.replace(tmp, path)


def read_csv(path):
    """Read a CSV export back as a list of dicts with typed values."""
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            out.append({
                "epsilon": float(rec["epsilon"]),
                "g_value": float(rec["g_value"]),
                "g_kind": rec["g_kind"],
                "d2_value": float(rec["d2_value"]),
                "ratio_log": None if rec["ratio_log"] == "" else float(rec["ratio_log"]),
            })
    return out


def verify_report(report: dict, tol=SANDWICH_TOL):
    """Re-check every row of a report from its embedded sample and certificates.

    Returns a list of forensic records, one per failing row (empty when
    the report verifies). Checks the sandwich inequality, the zero
    configuration (feasibility and value) and the kernel certificate
    (norm, constraints and value).
    """
    sample = sample_from_dict(report["sample"])
    params = report["params"]
    failures = []
    for row in rows_from_report(report):
        prob = ExtremalProblem(sample, row.epsilon, params["R"], p=2.0, mode=params["mode"])
        problems = []
        if row.g_value > row.d2_value + tol:
            problems.append(f"g = {row.g_value!r} exceeds D_2 = {row.d2_value!r}")
        if row.g_zeros:
            cfg = ZeroConfiguration.of(complex(a, b) for a, b in row.g_zeros)
            try:
                revalidate(CertifiedBound(row.g_value, row.g_kind, cfg), prob)
            except CertificateError as exc:
                problems.append(f"g certificate: {exc}")
        elif row.g_value != 0.0:
            problems.append("nonzero g value without a certificate")
        try:
            cert = certificate_from_dict(row.d2_certificate)
            validate_certificate(cert, prob)
            if abs(cert.achieved_value - row.d2_value) > tol:
                problems.append(f"D_2 value {row.d2_value!r} differs from its certificate")
        except CertificateError as exc:
            problems.append(f"D_2 certificate: {exc}")
        if problems:
            rec = _forensics(row, prob)
            rec["problems"] = problems
            failures.append(rec)
    return failures
