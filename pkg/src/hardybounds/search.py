"""Lower estimates of ``g(E, eps, R, q)`` over zero configurations drawn from a sample.

The objective of a configuration is ``max_{|z| <= R} |B(Z; z)|`` for the
unweighted product, the constraint is ``|B_q(Z; zeta)| <= eps`` at every
sample point (weighted mode) or ``|B(Z; zeta)| <= eps`` (plain mode).
Adding a zero multiplies the product by a factor of modulus below one,
so the objective strictly decreases and feasibility is preserved; exact
enumeration only scores configurations from which no zero can be dropped.

Because ``max over Z of max over t`` equals ``max over t of max over Z``,
freezing the angle turns the problem into a small integer program in the
multiplicities, which the search alternates with the angular maximisation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .disk import ZeroConfiguration, factor_log_moduli, product_log_modulus
from .hardy import hardy_exponent
from .pointsets import PointSample
from .errors import CertificateError, DomainError

FEAS_TOL = 1e-12
IMPROVE_TOL = 1e-12
CIRCLE_NODES = 512
BOUND_NODES = 4096
ANGLE_TOL = 1e-10
REVALIDATE_TOL = 1e-9
MULTIPLICITY_CAP = 4
BRUTE_FORCE_MAX_SAMPLE = 12
MODES = ("weighted", "plain")
_HUGE = 1e300


@dataclass(frozen=True)
class ExtremalProblem:
    """One instance ``(E, eps, R, p, mode)``.

    ``mode="weighted"`` puts the factor ``1 - |zeta|`` in the constraints,
    ``mode="plain"`` omits it.
    """

    sample: PointSample
    epsilon: float
    R: float
    p: float = 2.0
    mode: str = "weighted"

    def __post_init__(self):
        if not (self.epsilon >= 0.0 and math.isfinite(self.epsilon)):
            raise DomainError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if not 0.0 < self.R < 1.0:
            raise DomainError(f"R must lie in (0, 1), got {self.R}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "p", hardy_exponent(self.p))

    @property
    def weighted(self) -> bool:
        return self.mode == "weighted"

    def with_(self, **changes) -> "ExtremalProblem":
        fields = dict(sample=self.sample, epsilon=self.epsilon, R=self.R, p=self.p, mode=self.mode)
        fields.update(changes)
        return ExtremalProblem(**fields)


@dataclass
class CertifiedBound:
    """A numeric bound with the object that certifies it.

    ``kind`` is one of ``lower_certified``, ``heuristic`` or ``oracle_exact``.
    An infeasible marker has ``infeasible=True``, value 0 and no certificate.
    Values of ``g`` are computed on the finite sample only ("sampled-E").
    """

    value: float
    kind: str
    certificate: object = None
    residuals: dict = field(default_factory=lambda: {"max_constraint_violation": 0.0, "norm_excess": 0.0})
    argmax_point: Optional[complex] = None
    infeasible: bool = False
    sample_indices: Optional[tuple] = None
    scope: str = "sampled-E"


@dataclass(frozen=True)
class CircleMax:
    value: float
    argmax_point: complex


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    worst_point: complex
    worst_value: float
    worst_index: int


def _angular_derivatives(zeros, R, t):
    """First and second ``t``-derivatives of ``log|B(R e^{it})|``, summed over the zeros."""
    z = R * np.exp(1j * np.asarray(t, dtype=float))
    a = zeros.reshape((-1,) + (1,) * z.ndim)
    ac = np.conj(a)
    u = z - a
    v = 1.0 - ac * z
    d1 = np.real(1j * z / u + 1j * ac * z / v).sum(axis=0)
    d2 = np.real(a * z / u**2 - ac * z / v**2).sum(axis=0)
    return d1, d2


def _newton_max(zeros, R, lo, hi, t, tol, max_iter=60):
    """Safeguarded Newton search for a stationary maximum inside each bracket ``[lo, hi]``.

    Starts from ``t``. Steps that leave the bracket or head uphill in
    curvature fall back to bisection on the sign of the derivative.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    t = np.array(t, dtype=float)
    active = np.ones(t.shape, dtype=bool)
    for _ in range(max_iter):
        d1, d2 = _angular_derivatives(zeros, R, t)
        lo = np.where(d1 > 0, t, lo)
        hi = np.where(d1 < 0, t, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = t - d1 / d2
        ok = (d2 < 0) & (newton >= lo) & (newton <= hi)
        t_next = np.where(ok, newton, 0.5 * (lo + hi))
        t_next = np.where(active & (d1 != 0), t_next, t)
        active &= np.abs(t_next - t) > tol
        t = t_next
        if not np.any(active):
            break
    return t


def _refine_circle_max(zeros, R, thetas, grid_log, lobes=3, tol=ANGLE_TOL):
    """Refine the grid maximum of ``log|B|`` on ``|z| = R`` around its best local maxima."""
    n = grid_log.size
    step = 2.0 * np.pi / n
    is_peak = (grid_log >= np.roll(grid_log, 1)) & (grid_log >= np.roll(grid_log, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(-grid_log[peaks], kind="stable")[:lobes]]
    zeros = np.asarray(zeros, dtype=complex)
    # vertex of the parabola through the three grid values around each peak
    left, mid, right = grid_log[peaks - 1], grid_log[peaks], grid_log[(peaks + 1) % n]
    curv = left - 2.0 * mid + right
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(curv < 0, 0.5 * (left - right) / curv, 0.0)
    start = thetas[peaks] + step * np.clip(shift, -0.5, 0.5)
    t = _newton_max(zeros, R, thetas[peaks] - step, thetas[peaks] + step, start, 0.01 * tol)
    vals = factor_log_moduli(zeros, R * np.exp(1j * t)).sum(axis=0)
    k = int(np.argmax(vals))
    best_t, best = float(t[k]), float(vals[k])
    g = int(np.argmax(grid_log))
    if grid_log[g] > best:
        best_t, best = float(thetas[g]), float(grid_log[g])
    return best, best_t


def _circle_grid(R, nodes):
    thetas = 2.0 * np.pi * np.arange(nodes) / nodes
    return thetas, R * np.exp(1j * thetas)


def sup_on_disk(cfg, R, nodes=CIRCLE_NODES) -> CircleMax:
    """``max_{|z| <= R} |B(cfg; z)|``, attained on the circle ``|z| = R``.

    A uniform angular grid locates the peaks; safeguarded Newton steps on
    the angular derivative refine the best three.
    """
    if not 0.0 < R < 1.0:
        raise DomainError(f"R must lie in (0, 1), got {R}")
    zeros = cfg.array if isinstance(cfg, ZeroConfiguration) else ZeroConfiguration.of(cfg).array
    thetas, circle = _circle_grid(R, nodes)
    grid_log = factor_log_moduli(zeros, circle).sum(axis=0)
    best, t = _refine_circle_max(zeros, R, thetas, grid_log)
    return CircleMax(math.exp(best), R * complex(math.cos(t), math.sin(t)))


def feasibility_margin(cfg, prob: ExtremalProblem) -> FeasibilityReport:
    """Evaluate the constraint modulus at every sample point and report the worst one."""
    pts = prob.sample.points
    logs = np.atleast_1d(product_log_modulus(cfg, pts, weighted=prob.weighted))
    k = int(np.argmax(logs))
    worst = float(np.exp(logs[k]))
    return FeasibilityReport(worst <= prob.epsilon + FEAS_TOL, complex(pts[k]), worst, k)


def revalidate(bound: CertifiedBound, prob: ExtremalProblem, tol=REVALIDATE_TOL) -> CertifiedBound:
    """Re-check a configuration certificate with the public evaluators.

    Raises `CertificateError` on an infeasible marker, an infeasible
    configuration or a value that is not reproduced within ``tol``.
    """
    if bound.infeasible or not isinstance(bound.certificate, ZeroConfiguration):
        raise CertificateError("bound carries no zero-configuration certificate")
    feas = feasibility_margin(bound.certificate, prob)
    if not feas.feasible:
        raise CertificateError(
            f"constraint {feas.worst_value:.3e} > eps={prob.epsilon:.3e} at {feas.worst_point}"
        )
    top = sup_on_disk(bound.certificate, prob.R)
    if abs(top.value - bound.value) > tol:
        raise CertificateError(f"value {bound.value!r} not reproduced (got {top.value!r})")
    return bound


class _Evaluator:
    """Objective and constraint values of multisets of sample indices.

    A configuration is a nondecreasing tuple of indices into the sample.
    Factor log-moduli on the circle grid and at the sample points are
    precomputed once per problem.
    """

    def __init__(self, prob: ExtremalProblem, nodes=CIRCLE_NODES, multiplicity_cap=None):
        self.prob = prob
        self.multiplicity_cap = multiplicity_cap
        self.points = prob.sample.points
        self.m = self.points.size
        self.thetas, circle = _circle_grid(prob.R, nodes)
        self.obj_rows = factor_log_moduli(self.points, circle)
        self.con_rows = factor_log_moduli(self.points, self.points)
        with np.errstate(divide="ignore"):
            self.log_weight = np.log(1.0 - np.abs(self.points)) if prob.weighted else np.zeros(self.m)
        self.cap = prob.epsilon + FEAS_TOL
        with np.errstate(divide="ignore"):
            self.log_cap = math.log(self.cap)
        r, a = prob.R, np.abs(self.points)
        # Two bounds for log|factor_j| near grid angle t (arc half-width pi/nodes):
        # |d^2/dt^2| <= curvature[j, t] on the arc (huge once the zero nears
        # the arc), and log|factor_j| <= arc_cap[j, t] anywhere on the arc.
        half = np.pi / nodes
        dist = np.abs(circle[None, :] - self.points[:, None])
        gap = dist - r * half
        with np.errstate(divide="ignore"):
            curvature = r * a[:, None] * (1.0 / np.where(gap > 0, gap, 0.0) ** 2
                                          + 1.0 / (1.0 - r * a[:, None]) ** 2)
        self.slack = np.minimum(0.5 * half**2 * curvature, _HUGE)
        with np.errstate(divide="ignore"):
            self.arc_cap = np.minimum(0.0, np.log(dist + r * half) - np.log(1.0 - r * a)[:, None])
        self._values = {}
        self._argmax = {}

    def admissible(self, key) -> bool:
        if not key:
            return False
        if self.multiplicity_cap is None:
            return True
        return max(key.count(j) for j in set(key)) <= self.multiplicity_cap

    def constraint_logs(self, key):
        if not key:
            return self.log_weight.copy()
        return self.con_rows[list(key)].sum(axis=0) + self.log_weight

    def feasible(self, key) -> bool:
        return bool(np.exp(self.constraint_logs(key).max()) <= self.cap)

    def excess(self, key) -> float:
        """Summed log-excess over violated constraints (0 when feasible)."""
        logs = self.constraint_logs(key)
        with np.errstate(divide="ignore"):
            over = logs - math.log(self.cap)
        return float(np.sum(over[over > 0]))

    def grid_log(self, key) -> float:
        return float(self.obj_rows[list(key)].sum(axis=0).max())

    def _arc_bounds(self, idx, grid):
        """Per-arc upper bounds on the continuous maximum, from grid values.

        On the arc holding the maximiser the derivative vanishes there, so
        grid value plus curvature slack bounds it; the factor caps bound
        every arc outright.
        """
        return np.minimum(grid + self.slack[idx].sum(axis=0), self.arc_cap[idx].sum(axis=0))

    def upper_log(self, key) -> float:
        """Rigorous upper bound on `log_value` from the grid and a curvature bound."""
        if key in self._values:
            return self._values[key]
        idx = list(key)
        return float(self._arc_bounds(idx, self.obj_rows[idx].sum(axis=0)).max())

    def upper_logs(self, counts, chunk=1024) -> np.ndarray:
        """`upper_log` for each row of a multiplicity matrix ``counts`` (shape ``(K, m)``)."""
        counts = np.asarray(counts, dtype=float)
        out = np.empty(counts.shape[0])
        for lo in range(0, counts.shape[0], chunk):
            n = counts[lo:lo + chunk]
            taylor = n @ np.maximum(self.obj_rows, -_HUGE) + n @ self.slack
            out[lo:lo + chunk] = np.minimum(taylor, n @ self.arc_cap).max(axis=1)
        return out

    def log_value(self, key) -> float:
        if key not in self._values:
            grid = self.obj_rows[list(key)].sum(axis=0)
            best, t = _refine_circle_max(self.points[list(key)], self.prob.R, self.thetas, grid)
            self._values[key] = best
            self._argmax[key] = t
        return self._values[key]

    def value(self, key) -> float:
        return math.exp(self.log_value(key))

    def argmax_angle(self, key) -> float:
        self.log_value(key)
        return self._argmax[key]

    def bound(self, key, kind) -> CertifiedBound:
        cfg = ZeroConfiguration.of(self.points[list(key)])
        feas = feasibility_margin(cfg, self.prob)
        top = sup_on_disk(cfg, self.prob.R)
        return CertifiedBound(
            value=top.value,
            kind=kind,
            certificate=cfg,
            residuals={
                "max_constraint_violation": max(0.0, feas.worst_value - self.prob.epsilon),
                "norm_excess": 0.0,
            },
            argmax_point=top.argmax_point,
            sample_indices=tuple(int(k) for k in key),
        )


def infeasible_marker(kind) -> CertifiedBound:
    return CertifiedBound(
        value=0.0,
        kind=kind,
        certificate=None,
        residuals={"max_constraint_violation": math.inf, "norm_excess": 0.0},
        infeasible=True,
    )


def _add(key, j):
    return tuple(sorted(key + (j,)))


def _remove(key, pos):
    return key[:pos] + key[pos + 1:]


def _multiplicity_blocks(m, cap, max_degree, block=1 << 18):
    """Yield arrays of multiplicity vectors ``n`` in ``{0..cap}^m`` with ``1 <= sum(n) <= max_degree``.

    Vectors come in lexicographic order, in blocks of roughly ``block`` rows.
    """
    base = cap + 1
    tail = 0
    while tail < m and base ** (tail + 1) <= block:
        tail += 1
    tail_rows = np.array(list(itertools.product(range(base), repeat=tail)), dtype=np.int64).reshape(-1, tail)
    tail_sum = tail_rows.sum(axis=1)
    for head in itertools.product(range(base), repeat=m - tail):
        h = sum(head)
        if h > max_degree:
            continue
        keep = (tail_sum + h <= max_degree) & (tail_sum + h >= 1)
        rows = tail_rows[keep]
        yield np.hstack([np.broadcast_to(np.array(head, dtype=np.int64), (rows.shape[0], m - tail)), rows])


def brute_force_g(prob: ExtremalProblem, max_degree=None, multiplicity_cap=MULTIPLICITY_CAP,
                  exhaustive=False) -> CertifiedBound:
    """Exact maximum of the objective over feasible multisets of sample points.

    Every multiset of size ``1..max_degree`` (default ``len(sample) + 4``) in
    which no point appears more than ``multiplicity_cap`` times is checked
    for feasibility. By default only the minimal feasible ones (no zero can
    be dropped) are scored, since dropping a zero raises the objective
    everywhere; candidates are scored in order of a rigorous upper bound
    on their circle maximum and scoring stops once the bound falls to the
    incumbent. ``exhaustive=True`` scores every feasible multiset.
    """
    m = len(prob.sample)
    if max_degree is None:
        max_degree = m + 4
    if m > BRUTE_FORCE_MAX_SAMPLE or max_degree > m + 4:
        raise ValueError(
            f"brute force is capped at {BRUTE_FORCE_MAX_SAMPLE} points and degree <= |sample| + 4 "
            f"(got {m} points, degree {max_degree})"
        )
    if m == 0 or max_degree < 1:
        return infeasible_marker("oracle_exact")
    ev = _Evaluator(prob)
    # a fine grid makes the curvature slack small, so few candidates need refining
    fine = _Evaluator(prob, nodes=BOUND_NODES)
    # a zero on its own sample point sends that constraint to -inf; track
    # coverage separately so the products below stay finite
    con = np.where(np.eye(m, dtype=bool), 0.0, ev.con_rows)
    limit = ev.log_cap - ev.log_weight
    found = []
    for block in _multiplicity_blocks(m, multiplicity_cap, max_degree):
        logs = block @ con
        covered = block > 0
        ok = np.all(covered | (logs <= limit), axis=1)
        if not exhaustive:
            # minimal: removing any present zero breaks feasibility (or
            # leaves the empty configuration, which is not allowed)
            several = block.sum(axis=1) > 1
            for j in range(m):
                still = covered.copy()
                still[:, j] = block[:, j] > 1
                drop_ok = np.all(still | (logs - con[j] <= limit), axis=1)
                ok &= ~(covered[:, j] & drop_ok & several)
        if np.any(ok):
            found.append(block[ok])
    if not found:
        return infeasible_marker("oracle_exact")
    cands = np.vstack(found)
    uppers = fine.upper_logs(cands)
    best_key, best_log = None, -math.inf
    for i in np.argsort(-uppers, kind="stable"):
        if not exhaustive and uppers[i] <= best_log:
            break
        key = _key_of(cands[i])
        if ev.feasible(key) and ev.log_value(key) > best_log:
            best_key, best_log = key, ev.log_value(key)
    if best_key is None:
        return infeasible_marker("oracle_exact")
    return ev.bound(best_key, "oracle_exact")


def _key_of(counts):
    return tuple(int(j) for j in np.repeat(np.arange(len(counts)), counts))


def _greedy(ev: _Evaluator, start=(), rng=None, max_steps=None):
    """Add zeros until feasible.

    While no single addition yields feasibility, pick the addition with the
    smallest summed log-excess; once some additions do, take the feasible one
    with the largest objective. Ties go to the lowest sample index. With an
    ``rng`` the infeasible steps choose uniformly among the three best
    additions instead.
    """
    key = tuple(start)
    if key and not ev.admissible(key):
        return None
    if key and ev.feasible(key):
        return key
    max_steps = max_steps if max_steps is not None else 4 * ev.m + 4
    for _ in range(max_steps):
        options = [j for j in range(ev.m) if ev.admissible(_add(key, j))]
        if not options:
            return None
        feasible = [j for j in options if ev.feasible(_add(key, j))]
        if feasible:
            j = max(feasible, key=lambda j: (ev.log_value(_add(key, j)), -j))
            return _add(key, j)
        scores = sorted((ev.excess(_add(key, j)), -ev.grid_log(_add(key, j)), j) for j in options)
        pick = 0 if rng is None else int(rng.integers(min(3, len(scores))))
        key = _add(key, scores[pick][2])
    return None


def _local_search(ev: _Evaluator, key, budget):
    """Best-improvement descent over single removals and swaps.

    Additions are never improving (they lower the objective), so they are
    left to the restart and perturbation steps. Returns the local optimum
    and the number of iterations used.
    """
    current = ev.log_value(key)
    used = 0
    while used < budget:
        used += 1
        best_move, best_val = None, current + IMPROVE_TOL
        moves = []
        for pos in sorted({key.index(j) for j in key}):
            if len(key) > 1:
                moves.append(_remove(key, pos))
            rest = _remove(key, pos)
            for j in range(ev.m):
                if j != key[pos]:
                    moves.append(_add(rest, j))
        for cand in moves:
            if not ev.admissible(cand) or not ev.feasible(cand):
                continue
            if ev.upper_log(cand) <= best_val:
                continue
            v = ev.log_value(cand)
            if v > best_val:
                best_move, best_val = cand, v
        if best_move is None:
            break
        key, current = best_move, best_val
    return key, used


def _multiplicity_program(ev: _Evaluator, theta, cap):
    """Best multiset for the objective frozen at angle ``theta``.

    Maximises ``sum_j n_j log|factor_j(R e^{i theta})|`` over integer
    multiplicities ``0 <= n_j <= cap`` subject to the log-constraints, where
    a binary ``y_k <= n_k`` switches off the constraint at a covered point.
    Since ``max_Z max_t = max_t max_Z``, sweeping ``theta`` reaches the
    optimum. Returns a sorted key, or None when the program has no solution.
    """
    m = ev.m
    z = ev.prob.R * np.exp(1j * np.array([theta]))
    gain = np.maximum(factor_log_moduli(ev.points, z)[:, 0], -1e6)
    con = np.where(np.eye(m, dtype=bool), 0.0, ev.con_rows)
    limit = ev.log_cap - ev.log_weight
    # with y_k = 1 the row must hold for any n: every con entry is <= 0
    big = np.maximum(0.0, -limit)
    eye = np.eye(m)
    constraints = [
        LinearConstraint(np.hstack([con.T, -np.diag(big)]), -np.inf, limit),
        LinearConstraint(np.hstack([-eye, eye]), -np.inf, 0.0),
        LinearConstraint(np.concatenate([np.ones(m), np.zeros(m)])[None, :], 1.0, np.inf),
    ]
    upper = np.concatenate([np.full(m, cap, dtype=float), np.ones(m)])
    res = milp(np.concatenate([-gain, np.zeros(m)]), constraints=constraints,
               integrality=np.ones(2 * m), bounds=Bounds(0.0, upper))
    if res.x is None:
        return None
    return _key_of(np.round(res.x[:m]).astype(int))


def search_g(prob: ExtremalProblem, budget=200, seed=0,
             multiplicity_cap=MULTIPLICITY_CAP, sweep_angles=None) -> CertifiedBound:
    """Certified lower bound for ``g`` on the sample.

    Phases, each charged against ``budget`` (one unit per descent step,
    integer-program solve or restart):

    1. greedy construction from the empty configuration, then descent over
       removals and swaps;
    2. angle sweep: from ``sweep_angles`` equally spaced angles (default 16
       for samples within the brute-force range, 4 above it, where each
       integer program costs much more), alternate
       between `_multiplicity_program` at the current angle and the
       argmax angle of its solution until a configuration repeats; each
       solution is descended;
    3. perturbation rounds: drop one or two zeros of the incumbent, insert
       a random sample point, repair with a randomised greedy, descend.

    No zero is used more than ``multiplicity_cap`` times (``None`` means
    4 * len(sample)); the default matches `brute_force_g`. Deterministic
    for fixed ``budget`` and ``seed``; the result is always feasible (or
    the infeasible marker).
    """
    if len(prob.sample) == 0:
        return infeasible_marker("lower_certified")
    cap = multiplicity_cap if multiplicity_cap is not None else 4 * len(prob.sample)
    ev = _Evaluator(prob, multiplicity_cap=cap)
    start = _greedy(ev)
    if start is None:
        return infeasible_marker("lower_certified")
    best, used = _local_search(ev, start, budget)
    seen = {start}

    def consider(key):
        nonlocal best, used
        if key is None or key in seen or not ev.feasible(key):
            return
        seen.add(key)
        key, spent = _local_search(ev, key, max(1, budget - used))
        used += spent
        if ev.log_value(key) > ev.log_value(best) + IMPROVE_TOL:
            best = key

    if sweep_angles is None:
        sweep_angles = 16 if ev.m <= BRUTE_FORCE_MAX_SAMPLE else 4
    angles = [ev.argmax_angle(best)] + list(2.0 * np.pi * np.arange(sweep_angles) / sweep_angles)
    # chains that reach an already visited configuration follow its old path
    visited = set()
    for theta in angles:
        while used < budget:
            used += 1
            key = _multiplicity_program(ev, theta, cap)
            if key is None or key in visited or not ev.feasible(key):
                break
            visited.add(key)
            consider(key)
            theta = ev.argmax_angle(key)

    rng = np.random.default_rng(seed)
    while used < budget:
        used += 1
        key = list(best)
        for _ in range(min(len(key), int(rng.integers(1, 3)))):
            key.pop(int(rng.integers(len(key))))
        key = _add(tuple(key), int(rng.integers(ev.m)))
        consider(_greedy(ev, key, rng=rng))
    return ev.bound(best, "lower_certified")


def single_zero_best(prob: ExtremalProblem) -> CertifiedBound:
    """Best feasible one-zero configuration (infeasible marker if none)."""
    ev = _Evaluator(prob)
    feasible = [(j,) for j in range(ev.m) if ev.feasible((j,))]
    if not feasible:
        return infeasible_marker("lower_certified")
    return ev.bound(max(feasible, key=lambda k: (ev.log_value(k), -k[0])), "lower_certified")
