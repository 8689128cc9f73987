"""Exact ``D_2`` at desk scale, and lower bounds on ``D_p`` from Blaschke certificates.

For ``p = 2`` the extremal function can be taken in the span of the Szegő
kernels at the constraint points and the evaluation point: a component
orthogonal to all of them changes neither the objective nor the
constraints. In coordinates where the Gram matrix is the identity, the
problem becomes a second-order cone program (maximise a linear form over
the unit ball intersected with one disk constraint per sample point),
solved here with Clarabel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import clarabel
import numpy as np
import scipy.linalg
from scipy import sparse

from .disk import DiskPoint, interior_array, pseudo_hyperbolic
from .errors import CertificateError, ConditioningError, DomainError
from .hardy import blaschke, hp_norm, kernel_expansion
from .pointsets import write_json_atomic
from .search import (
    CertifiedBound,
    ExtremalProblem,
    feasibility_margin,
    revalidate,
)

RIDGE = 1e-12
MERGE_DIST = 1e-8
KKT_TOL = 1e-8
CERT_TOL = 1e-8
REPAIR_TOL = 1e-10
INNER_NORM_TOL = 1e-6
ANGULAR_NODES = 256
ANGLE_TOL = 1e-7
_SOLVER_TOL = 1e-12


@dataclass
class KernelCertificate:
    """``g = sum_i coefficients[i] * k_{base_points[i]}`` with its measured residuals.

    The evaluation point ``z0`` is the last base point unless it merged
    with a constraint point, in which case ``z0_index`` points there.
    """

    base_points: list
    coefficients: np.ndarray
    achieved_value: float
    z0: complex
    z0_index: int
    residuals: dict = field(default_factory=dict)

    @property
    def points(self) -> np.ndarray:
        return np.array([complex(w) for w in self.base_points])

    def function(self):
        return kernel_expansion(self.points, self.coefficients)

    def gram_norm(self) -> float:
        """``||g||_2`` from the kernel Gram matrix."""
        w = self.points
        c = self.coefficients
        gram = 1.0 / (1.0 - np.conj(w)[:, None] * w[None, :])
        return float(math.sqrt(max(0.0, np.real(np.conj(c) @ gram.T @ c))))


@dataclass
class DiskMaximum:
    value: float
    argmax_z0: complex
    certificate: KernelCertificate
    angles: np.ndarray
    angle_values: np.ndarray


def _require_p2(prob: ExtremalProblem):
    if prob.p != 2.0:
        raise DomainError(f"the kernel solver handles p = 2 only, got p = {prob.p}")


def _merge_constraints(points, caps):
    """Merge points closer than `MERGE_DIST` (pseudo-hyperbolic), keeping the tighter cap."""
    keep_pts, keep_caps = [], []
    for w, c in zip(points, caps):
        for k, v in enumerate(keep_pts):
            if pseudo_hyperbolic(w, v) < MERGE_DIST:
                keep_caps[k] = min(keep_caps[k], c)
                break
        else:
            keep_pts.append(complex(w))
            keep_caps.append(float(c))
    return np.array(keep_pts, dtype=complex), np.array(keep_caps)


def _closest_pair(w):
    best = (math.inf, 0, 1)
    for i in range(w.size):
        for j in range(i + 1, w.size):
            d = pseudo_hyperbolic(w[i], w[j])
            if d < best[0]:
                best = (d, i, j)
    return best


def _normalized_cholesky(w):
    s = np.sqrt(1.0 - np.abs(w) ** 2)
    gram = s[:, None] * s[None, :] / (1.0 - w[:, None] * np.conj(w)[None, :])
    gram = gram + RIDGE * np.eye(w.size)
    try:
        return s, np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        d, i, j = _closest_pair(w)
        raise ConditioningError(
            f"kernel Gram matrix is numerically singular; closest pair {w[i]!r}, {w[j]!r} "
            f"(pseudo-hyperbolic distance {d:.3e})",
            pair=(complex(w[i]), complex(w[j])),
        ) from None


def _constraint_caps(prob: ExtremalProblem):
    pts = prob.sample.points
    if prob.weighted:
        return pts, prob.epsilon / (1.0 - np.abs(pts))
    return pts, np.full(pts.size, prob.epsilon)


def _cone_program(L, s, caps, obj_index):
    """Assemble Clarabel data for ``max Re (L b)_o / s_o`` with ``||b|| <= 1`` and ``|(L b)_j| <= s_j caps_j``.

    The variable is ``x = [Re b, Im b]``.
    """
    n = L.shape[0]
    re_rows = np.hstack([L.real, -L.imag])
    im_rows = np.hstack([L.imag, L.real])
    q = -re_rows[obj_index] / s[obj_index]

    blocks_a, blocks_b, cones, sizes = [], [], [], []
    blocks_a.append(np.vstack([np.zeros((1, 2 * n)), -np.eye(2 * n)]))
    blocks_b.append(np.concatenate([[1.0], np.zeros(2 * n)]))
    cones.append(clarabel.SecondOrderConeT(2 * n + 1))
    sizes.append(2 * n + 1)
    tight = [j for j in range(caps.size) if caps[j] == 0.0]
    loose = [j for j in range(caps.size) if caps[j] > 0.0]
    if tight:
        blocks_a.append(np.vstack([np.vstack([-re_rows[j], -im_rows[j]]) for j in tight]))
        blocks_b.append(np.zeros(2 * len(tight)))
        cones.append(clarabel.ZeroConeT(2 * len(tight)))
        sizes.append(2 * len(tight))
    for j in loose:
        blocks_a.append(np.vstack([np.zeros(2 * n), -re_rows[j], -im_rows[j]]))
        blocks_b.append(np.array([s[j] * caps[j], 0.0, 0.0]))
        cones.append(clarabel.SecondOrderConeT(3))
        sizes.append(3)
    A = np.vstack(blocks_a)
    b = np.concatenate(blocks_b)
    return q, A, b, cones, sizes


def _solve_cone_program(q, A, b, cones, sizes):
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_gap_abs = _SOLVER_TOL
    settings.tol_gap_rel = _SOLVER_TOL
    settings.tol_feas = _SOLVER_TOL
    settings.tol_ktratio = 1e-10
    n = q.size
    solver = clarabel.DefaultSolver(
        sparse.csc_matrix((n, n)), q, sparse.csc_matrix(A), b, cones, settings
    )
    sol = solver.solve()
    status = str(sol.status)
    if "Infeasible" in status:
        raise DomainError(f"cone program reported {status}")
    x, z = np.array(sol.x), np.array(sol.z)
    # residuals from x and z only; the slack is recomputed rather than trusted
    slack = b - A @ x
    stationarity = float(np.max(np.abs(q + A.T @ z)))
    primal = dual = 0.0
    row = 0
    for cone, size in zip(cones, sizes):
        ps, dz = slack[row:row + size], z[row:row + size]
        if isinstance(cone, clarabel.ZeroConeT):
            primal = max(primal, float(np.max(np.abs(ps))))
        else:
            primal = max(primal, float(np.linalg.norm(ps[1:]) - ps[0]))
            dual = max(dual, float(np.linalg.norm(dz[1:]) - dz[0]))
        row += size
    complementarity = abs(float(slack @ z))
    gap = abs(float(q @ x + b @ z))
    kkt = max(stationarity, primal, dual, complementarity, gap) / max(1.0, float(np.max(np.abs(q))))
    return x, kkt, status


def _measure(w, coeffs, z0_index, con_pts, caps):
    """Norm, worst constraint excess and ``|g(z0)|`` of a kernel expansion."""
    g = kernel_expansion(w, coeffs)
    gram = 1.0 / (1.0 - np.conj(w)[:, None] * w[None, :])
    norm = float(math.sqrt(max(0.0, np.real(np.conj(coeffs) @ gram.T @ coeffs))))
    vals = np.abs(np.atleast_1d(g.at(con_pts))) if con_pts.size else np.zeros(0)
    excess = float(np.max(vals - caps)) if con_pts.size else -math.inf
    value = float(abs(g.at(w[z0_index])))
    return norm, excess, value, vals


def solve_extremal_at_point(prob: ExtremalProblem, z0) -> KernelCertificate:
    """Maximise ``|g(z0)|`` over ``||g||_2 <= 1`` under the sample constraints.

    Weighted mode imposes ``(1 - |zeta|) |g(zeta)| <= eps``, plain mode
    ``|g(zeta)| <= eps``, at every sample point. If solver roundoff leaves the norm or a
    constraint over by more than `REPAIR_TOL`, the coefficients are scaled
    down, so the certificate meets both to that tolerance. A zero cap
    (``eps = 0``) is met to solver accuracy.

    Raises
    ------
    ConditioningError
        If the kernel Gram matrix cannot be factored.
    """
    _require_p2(prob)
    z0 = complex(interior_array(z0, what="evaluation point")[0])
    pts, raw_caps = _constraint_caps(prob)
    pts, point_caps = _merge_constraints(pts, raw_caps)
    # merge z0 into a coinciding constraint point
    z0_index = pts.size
    for k, w in enumerate(pts):
        if pseudo_hyperbolic(z0, w) < MERGE_DIST:
            z0_index = k
            break
    w = pts if z0_index < pts.size else np.append(pts, z0)
    caps = np.append(point_caps, np.inf) if z0_index == pts.size else point_caps.copy()

    s, L = _normalized_cholesky(w)
    x, kkt, status = _solve_cone_program(*_cone_program(L, s, caps[: pts.size], z0_index))
    n = w.size
    bvec = x[:n] + 1j * x[n:]
    a_hat = scipy.linalg.solve_triangular(L.conj().T, bvec, lower=False)
    coeffs = a_hat * s

    norm, excess, _, vals = _measure(w, coeffs, z0_index, pts, point_caps)
    # scale down only for a real overshoot; a zero cap cannot be met by scaling
    scale = 1.0
    if norm > 1.0 + REPAIR_TOL:
        scale = 1.0 / norm
    if pts.size and excess > REPAIR_TOL:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where((vals > point_caps) & (point_caps > 0), point_caps / vals, np.inf)
        scale = min(scale, float(np.min(ratios)))
    coeffs = coeffs * scale
    norm, excess, value, _ = _measure(w, coeffs, z0_index, pts, point_caps)
    if kkt > KKT_TOL:
        warnings.warn(f"cone solver stopped with kkt residual {kkt:.2e} ({status})", stacklevel=2)
    return KernelCertificate(
        base_points=[DiskPoint.from_complex(v) for v in w],
        coefficients=coeffs,
        achieved_value=value,
        z0=z0,
        z0_index=z0_index,
        residuals={
            "norm_excess": max(0.0, norm - 1.0),
            "max_constraint_violation": max(0.0, excess) if pts.size else 0.0,
            "kkt_residual": kkt,
        },
    )


def validate_certificate(cert: KernelCertificate, prob: ExtremalProblem, tol=CERT_TOL, nodes=4096):
    """Re-check a kernel certificate using only the Hardy-space primitives.

    The norm comes from boundary quadrature of the kernel expansion, the
    constraints and the value from direct evaluation. Raises
    `CertificateError` on failure and returns the measured quantities.
    """
    g = kernel_expansion(cert.points, cert.coefficients)
    norm = hp_norm(g, 2, nodes=nodes)
    if norm > 1.0 + tol:
        raise CertificateError(f"certificate norm {norm!r} exceeds 1")
    pts, caps = _constraint_caps(prob)
    vals = np.abs(np.atleast_1d(g.at(pts)))
    excess = float(np.max(vals - caps))
    if excess > tol:
        k = int(np.argmax(vals - caps))
        raise CertificateError(f"constraint at {pts[k]!r} exceeded by {excess:.3e}")
    value = float(abs(g.at(cert.z0)))
    if abs(value - cert.achieved_value) > tol:
        raise CertificateError(f"value {cert.achieved_value!r} not reproduced (got {value!r})")
    return {"norm": norm, "max_constraint_excess": excess, "value": value}


def _golden_max(f, lo, hi, tol):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = hi - inv_phi * (hi - lo), lo + inv_phi * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - inv_phi * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + inv_phi * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def solve_dp_over_disk(prob: ExtremalProblem, angular_nodes=ANGULAR_NODES, lobes=2,
                       interior_check=0, seed=0) -> DiskMaximum:
    """``D_2`` on the sample: the largest `solve_extremal_at_point` value over ``|z0| <= R``.

    Only the circle ``|z0| = R`` is searched: each admissible ``g`` has its
    disk maximum there, hence so does their pointwise supremum. A uniform
    grid of ``angular_nodes`` angles is refined by golden-section search
    around the best ``lobes`` grid peaks.

    ``interior_check`` > 0 also solves at that many seeded random interior
    points and raises `CertificateError` if any beats the circle value by
    more than 1e-8.
    """
    _require_p2(prob)
    R = prob.R
    angles = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    certs = {}

    def at(theta):
        cert = solve_extremal_at_point(prob, R * complex(math.cos(theta), math.sin(theta)))
        certs[theta] = cert
        return cert.achieved_value

    values = np.array([at(t) for t in angles])
    n = angles.size
    is_peak = (values >= np.roll(values, 1)) & (values >= np.roll(values, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(-values[peaks], kind="stable")[:lobes]]
    step = 2.0 * np.pi / n
    best_t = float(angles[int(np.argmax(values))])
    best_v = float(values.max())
    for k in peaks:
        t, v = _golden_max(at, float(angles[k]) - step, float(angles[k]) + step, ANGLE_TOL)
        if v > best_v:
            best_t, best_v = t, v
    cert = certs[best_t]
    if interior_check:
        rng = np.random.default_rng(seed)
        r = R * np.sqrt(rng.random(interior_check))
        phi = 2.0 * np.pi * rng.random(interior_check)
        for z in r * np.exp(1j * phi):
            inner = solve_extremal_at_point(prob, z).achieved_value
            if inner > best_v + 1e-8:
                raise CertificateError(f"interior point {z!r} gives {inner!r} > circle value {best_v!r}")
    return DiskMaximum(best_v, cert.z0, cert, angles, values)


def lower_bound_dp_from_blaschke(bound: CertifiedBound, prob: ExtremalProblem) -> CertifiedBound:
    """Turn a configuration bound for ``g`` into a lower bound for ``D_p``.

    A finite Blaschke product has unit ``H^p`` norm for every ``p``; it meets
    the same constraints and reaches the same maximum on ``|z| <= R``.
    Both facts are re-checked before the bound is issued.
    """
    if bound.kind not in ("lower_certified", "oracle_exact"):
        raise CertificateError(f"cannot lift a bound of kind {bound.kind!r}")
    if bound.infeasible or bound.certificate is None:
        raise CertificateError("an infeasible marker certifies nothing")
    cfg = bound.certificate
    norms = {p: hp_norm(blaschke(cfg), p) for p in (1.0, 2.0, 4.0, math.inf, prob.p)}
    worst = max(abs(v - 1.0) for v in norms.values())
    if worst > INNER_NORM_TOL:
        raise CertificateError(f"Blaschke product norm differs from 1 by {worst:.3e}")
    revalidate(bound, prob)
    feas = feasibility_margin(cfg, prob)
    return CertifiedBound(
        value=bound.value,
        kind="lower_certified",
        certificate=cfg,
        residuals={
            "max_constraint_violation": max(0.0, feas.worst_value - prob.epsilon),
            "norm_excess": worst,
        },
        argmax_point=bound.argmax_point,
        sample_indices=bound.sample_indices,
        scope=bound.scope,
    )


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def certificate_to_dict(result: DiskMaximum | KernelCertificate) -> dict:
    cert = result.certificate if isinstance(result, DiskMaximum) else result
    value = result.value if isinstance(result, DiskMaximum) else cert.achieved_value
    return {
        "value": float(value),
        "argmax_z0": _pair(cert.z0),
        "base_points": [_pair(complex(w)) for w in cert.base_points],
        "coefficients": [_pair(c) for c in cert.coefficients],
        "z0_index": cert.z0_index,
        "residuals": {k: float(v) for k, v in cert.residuals.items()},
    }


def certificate_from_dict(data: dict) -> KernelCertificate:
    try:
        pts = [DiskPoint(float(a), float(b)) for a, b in data["base_points"]]
        coeffs = np.array([complex(float(a), float(b)) for a, b in data["coefficients"]])
        z0 = complex(*map(float, data["argmax_z0"]))
        return KernelCertificate(pts, coeffs, float(data["value"]), z0, int(data["z0_index"]),
                                 dict(data.get("residuals", {})))
    except (KeyError, TypeError, ValueError) as exc:
        raise CertificateError(f"malformed kernel certificate: {exc}") from exc


def save_result(path, result) -> None:
    write_json_atomic(path, certificate_to_dict(result))
