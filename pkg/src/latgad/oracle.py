"""Ground-truth brute-force solvers used to validate every reduction:
bounded-box closest-vector enumeration, exhaustive Max-SAT/parity evaluation,
and decision/witness comparison between the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .formulas import CspFormula
from .gadgets import Condition, VerificationReport
from .numeric import DEFAULT_TOL, Tolerance, box_volume, integer_grid, pvalue
from .reductions import CvpInstance

BOX_CAP = 10**7
MAX_BRUTE_VARS = 24


def _ranges(box, n: int) -> list[tuple[int, int]]:
    if isinstance(box, tuple) and len(box) == 2 and all(isinstance(v, (int, np.integer)) for v in box):
        box = [box] * n
    ranges = [(int(lo), int(hi)) for lo, hi in box]
    if len(ranges) != n:
        raise InvalidInputError(f"box must give one range per coordinate ({n})")
    return ranges


def _row_norms(diffs: np.ndarray, q: float) -> np.ndarray:
    if math.isinf(q):
        return np.abs(diffs).max(axis=1)
    return np.sum(np.abs(diffs) ** q, axis=1) ** (1.0 / q)


@dataclass
class CvpSolution:
    """Exact minimum distance over the searched box and every coordinate
    vector attaining it (within the relative tie band)."""

    distance: float
    closest: list[tuple[int, ...]]


def cvp_enumerate(basis, target, p, box, tol: Tolerance = DEFAULT_TOL) -> CvpSolution:
    """Exhaustive closest-vector search over an integer box.

    `box` is either one (lo, hi) pair applied to every coordinate or a
    per-coordinate list.  Vectors within relative `tol.rel` of the minimum are
    all reported, in ascending mixed-radix order.
    """
    B = np.asarray(basis, dtype=float)
    t = np.asarray(target, dtype=float).ravel()
    q = pvalue(p)
    n = B.shape[1]
    ranges = _ranges(box, n)
    if box_volume(ranges) > BOX_CAP:
        raise ResourceLimitError(f"box volume exceeds cap {BOX_CAP}")
    Bt = B.T
    best = math.inf
    for chunk in integer_grid(ranges):
        d = _row_norms(chunk @ Bt - t, q)
        m = float(d.min())
        if m < best:
            best = m
    band = best * (1.0 + tol.rel) + tol.abs
    closest: list[tuple[int, ...]] = []
    for chunk in integer_grid(ranges):
        d = _row_norms(chunk @ Bt - t, q)
        for row in chunk[d <= band]:
            closest.append(tuple(int(v) for v in row))
    return CvpSolution(distance=best, closest=closest)


def max_sat_brute(formula: CspFormula) -> tuple[int, list[tuple[int, ...]]]:
    """Exhaustive optimum over all 2^n assignments: best satisfied weight and
    every assignment attaining it, in ascending lexicographic order
    (assignment index has y_1 as the most significant bit)."""
    n = formula.n
    if n > MAX_BRUTE_VARS:
        raise ResourceLimitError(f"brute force capped at {MAX_BRUTE_VARS} variables")
    total = 1 << n
    best = -1
    winners: list[int] = []
    chunk = min(total, 1 << 20)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = [(idx >> (n - j)) & 1 for j in range(1, n + 1)]  # bits[j-1] = y_j
        score = np.zeros(idx.size, dtype=np.int64)
        for i, constraint in enumerate(formula.constraints):
            w = formula.weight_of(i)
            if w == 0:
                continue
            if hasattr(constraint, "literals"):
                sat = np.zeros(idx.size, dtype=bool)
                for lit in constraint.literals:
                    b = bits[abs(lit) - 1]
                    sat |= (b == 1) if lit > 0 else (b == 0)
            else:
                acc = np.zeros(idx.size, dtype=np.int64)
                for v in constraint.variables:
                    acc += bits[v - 1]
                sat = (acc % 2) == constraint.bit
            score += w * sat
        top = int(score.max()) if idx.size else -1
        if top > best:
            best = top
            winners = [int(a) for a in idx[score == top]]
        elif top == best:
            winners.extend(int(a) for a in idx[score == top])
    assignments = [tuple((a >> (n - j)) & 1 for j in range(1, n + 1)) for a in winners]
    return best, assignments


def validate_reduction(formula: CspFormula, inst: CvpInstance, box=None) -> VerificationReport:
    """Cross-check an instance against brute force.

    Padded and finite-norm preprocessing modes: decision agreement (distance
    <= r iff optimum >= W), witness bijection between boolean closest vectors
    and optimal assignments, and, when the box extends beyond {0, 1}^n,
    exclusion of non-boolean points.  Gap mode: the promise separation (value
    >= c gives distance <= r, value < s gives distance > gamma r).  Max-norm
    preprocessing mode: decision agreement only (every falsifying assignment
    ties at the same distance there, so no witness structure survives).
    """
    tol = DEFAULT_TOL
    n = inst.n
    if formula.n != n:
        raise InvalidInputError("formula and instance disagree on variable count")
    ranges = _ranges(box if box is not None else (0, 1), n)
    best, optimal = max_sat_brute(formula)
    sol = cvp_enumerate(inst.basis, inst.target, inst.p, ranges, tol)
    r = inst.radius
    mode = inst.meta.get("mode")
    conditions: list[Condition] = []
    dist_leq_r = sol.distance <= r * (1.0 + tol.rel) + tol.abs

    if mode == "cvpp-inf":
        W = inst.meta.get("threshold", formula.m)
        conditions.append(
            Condition("decision-agreement", dist_leq_r == (best >= W), abs(sol.distance - r))
        )
    elif mode in ("padded", "cvpp-lp"):
        W = inst.meta["threshold"]
        expect_yes = best >= W
        conditions.append(
            Condition("decision-agreement", dist_leq_r == expect_yes, abs(sol.distance - r))
        )
        boolean_closest = sorted(z for z in sol.closest if all(v in (0, 1) for v in z))
        conditions.append(
            Condition(
                "witness-bijection",
                boolean_closest == sorted(optimal),
                float(len(set(boolean_closest) ^ set(optimal))),
            )
        )
        if any(lo < 0 or hi > 1 for lo, hi in ranges):
            worst = math.inf
            witness = None
            Bt = inst.basis.T
            q = pvalue(inst.p)
            for chunk in integer_grid(ranges):
                nonbin = ~np.all((chunk == 0) | (chunk == 1), axis=1)
                pts = chunk[nonbin]
                if pts.size == 0:
                    continue
                d = _row_norms(pts @ Bt - inst.target, q)
                i = int(np.argmin(d))
                if d[i] < worst:
                    worst = float(d[i])
                    witness = tuple(int(v) for v in pts[i])
            conditions.append(
                Condition(
                    "non-binary-exclusion",
                    worst > r * (1.0 + tol.rel),
                    max(0.0, r - worst),
                    witness,
                )
            )
    elif mode == "gap":
        s, c, gamma = inst.meta["s"], inst.meta["c"], inst.meta["gamma"]
        val = best / formula.m
        if val >= c:
            conditions.append(
                Condition("gap-yes-within-radius", dist_leq_r, max(0.0, sol.distance - r))
            )
        elif val < s:
            conditions.append(
                Condition(
                    "gap-no-beyond-gamma-r",
                    sol.distance > gamma * r * (1.0 - tol.rel),
                    max(0.0, gamma * r - sol.distance),
                )
            )
        else:
            conditions.append(Condition("gap-promise-violated-no-claim", True, 0.0))
    else:
        raise InvalidInputError(f"instance has unknown mode {mode!r}")
    return VerificationReport(passed=all(c.passed for c in conditions), conditions=conditions, tol=tol)
