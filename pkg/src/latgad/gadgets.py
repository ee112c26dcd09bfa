"""Construction, transformation and verification of vertex-isolating gadgets.

A gadget is a matrix V (d x k) and target t such that the distances from t to
the parallelepiped vertices V x, x in {0, 1}^k, realize a prescribed two-level
pattern:

* kind "isolating-parallelepiped": every nonzero vertex at distance 1, the
  origin strictly farther (at 1 + eps);
* kind "two-level": vertices satisfying a k-ary boolean constraint at 1, the
  rest at 1 + eps;
* kind "isolating-lattice": a two-level gadget whose pattern extends to all
  of Z^k (every non-boolean point at distance >= 1 + eps).

On-off gadgets carry a second target equidistant from all 2^k vertices, used
to disable absent clauses in preprocessing-based reductions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import distmatrix
from .errors import (
    DegenerateConstructionError,
    InvalidInputError,
    NumericDegeneracyError,
    ResourceLimitError,
    UnsupportedParametersError,
    VerificationError,
)
from .numeric import (
    DEFAULT_TOL,
    Tolerance,
    binary_points,
    cube_points,
    finite_pvalue,
    integer_grid,
    pnorm,
    pnorm_pow,
    sin_half_pi,
)

KIND_ISOLATING = "isolating-parallelepiped"
KIND_TWO_LEVEL = "two-level"
KIND_LATTICE = "isolating-lattice"

SHIFT_SEARCH_DEPTH = 64
LATTICE_BOX_CAP = 10**7


# ---------------------------------------------------------------------------
# constraint descriptors (JSON-serializable dicts)


def parity_constraint(bit: int) -> dict:
    if bit not in (0, 1):
        raise InvalidInputError("parity bit must be 0 or 1")
    return {"type": "parity", "bit": int(bit)}


def clause_constraint(negated=()) -> dict:
    """Disjunction of the k gadget inputs, with the listed 1-based positions
    negated (empty: plain OR, falsified only by the all-zeros input)."""
    return {"type": "clause", "negated": sorted(int(s) for s in negated)}


def constraint_satisfied(constraint: dict, x) -> bool:
    kind = constraint.get("type")
    if kind == "parity":
        return sum(x) % 2 == constraint["bit"]
    if kind == "clause":
        negated = set(constraint.get("negated", ()))
        return any((x[s] == 0) if (s + 1) in negated else (x[s] == 1) for s in range(len(x)))
    raise InvalidInputError(f"unknown constraint descriptor {constraint!r}")


# ---------------------------------------------------------------------------
# gadget containers


@dataclass(eq=False)
class IsolatingGadget:
    p: float
    k: int
    V: np.ndarray  # d x k
    t: np.ndarray  # length d
    eps: float
    kind: str = KIND_ISOLATING
    constraint: dict | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=float)
        self.t = np.asarray(self.t, dtype=float).ravel()
        if self.V.ndim != 2 or self.V.shape[1] != self.k or self.V.shape[0] != self.t.size:
            raise InvalidInputError("gadget shape mismatch between V, t and k")
        if self.kind not in (KIND_ISOLATING, KIND_TWO_LEVEL, KIND_LATTICE):
            raise InvalidInputError(f"unknown gadget kind {self.kind!r}")
        if self.kind != KIND_ISOLATING and self.constraint is None:
            raise InvalidInputError(f"kind {self.kind!r} requires a constraint descriptor")

    @property
    def d(self) -> int:
        return self.t.size

    def distance(self, x) -> float:
        return pnorm(self.V @ np.asarray(x, dtype=float) - self.t, self.p)

    def satisfied(self, x) -> bool:
        """Whether the vertex x belongs to the close (distance-1) level."""
        if self.kind == KIND_ISOLATING:
            return any(x)
        return constraint_satisfied(self.constraint, x)


@dataclass(eq=False)
class OnOffGadget:
    p: float
    k: int
    V: np.ndarray
    t_on: np.ndarray
    t_off: np.ndarray
    eps: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=float)
        self.t_on = np.asarray(self.t_on, dtype=float).ravel()
        self.t_off = np.asarray(self.t_off, dtype=float).ravel()
        if self.V.shape != (self.t_on.size, self.k) or self.t_off.size != self.t_on.size:
            raise InvalidInputError("on-off gadget shape mismatch")

    @property
    def d(self) -> int:
        return self.t_on.size


@dataclass
class Condition:
    name: str
    passed: bool
    residual: float
    witness: tuple | None = None


@dataclass
class VerificationReport:
    passed: bool
    conditions: list[Condition]
    tol: Tolerance

    def worst(self) -> Condition:
        return max(self.conditions, key=lambda c: c.residual)

    def failures(self) -> list[Condition]:
        return [c for c in self.conditions if not c.passed]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "tol": {"rel": self.tol.rel, "abs": self.tol.abs},
            "conditions": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "residual": c.residual,
                    "witness": list(c.witness) if c.witness is not None else None,
                }
                for c in self.conditions
            ],
        }


def _report(conditions: list[Condition], tol: Tolerance) -> VerificationReport:
    return VerificationReport(passed=all(c.passed for c in conditions), conditions=conditions, tol=tol)


# ---------------------------------------------------------------------------
# shift search and weight solve


def find_shift(k: int, p) -> float:
    """Smallest shift of the form j + 2^-i making the distance-power matrix
    nonsingular (relative eigenvalue threshold).

    For p not an integer, or p >= k, only j = k is tried, matching the halting
    guarantee for shifts above k.  For odd integers p < k every eigenvalue of
    a full-parity-heavy character vanishes identically above k, so offsets
    j = k-1 down to 0 are tried as well.  Even integers p < k are refused:
    no isolating gadget exists there at all.
    """
    q = finite_pvalue(p)
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise InvalidInputError(f"k must be a positive integer, got {k!r}")
    integral = float(q).is_integer()
    if integral and int(q) % 2 == 0 and q < k:
        raise UnsupportedParametersError(
            f"no isolating gadget exists for even integer p={q} with p < k={k}"
        )
    if integral and q < k:
        offsets = tuple(range(k - 1, -1, -1))
    else:
        offsets = (k,)
    for i in range(1, SHIFT_SEARCH_DEPTH + 1):
        for j in offsets:
            cand = j + 2.0**-i
            if distmatrix.is_nonsingular(k, q, cand):
                return cand
    raise NumericDegeneracyError(
        f"no nonsingular shift found for k={k}, p={q} within depth {SHIFT_SEARCH_DEPTH}"
    )


def solve_weights(k: int, p, shift: float, bump) -> tuple[np.ndarray, float]:
    """Non-negative vertex weights w and eps > 0 with H w = 1 + eps * bump,
    where H is the distance-power matrix at the given shift.

    w = (1/lambda) 1 + eps * H^-1 bump with eps = 1 / (lambda |min H^-1 bump|)
    when the solve has a negative entry (which makes the minimum entry of w
    exactly zero), and eps = 1 / (lambda * max |H^-1 bump|) otherwise.
    """
    report = distmatrix.eigen_report(k, p, shift)
    if not report.nonsingular():
        raise InvalidInputError(
            f"distance matrix is singular at shift {shift!r} (min ratio {report.min_ratio:.3g})"
        )
    b = np.asarray(bump, dtype=float).ravel()
    if b.size != 2**k:
        raise InvalidInputError(f"bump must have length 2^{k}")
    H = distmatrix.distance_matrix(k, p, shift)
    aprime = np.linalg.solve(H, b)
    lam = report.lambda_all
    lo = float(aprime.min())
    hi = float(np.abs(aprime).max())
    if lo < 0.0:
        eps = 1.0 / (lam * abs(lo))
    elif hi > 0.0:
        eps = 1.0 / (lam * hi)
    else:
        eps = 1.0  # bump was zero; any positive value works and is unused
    weights = 1.0 / lam + eps * aprime
    floor = float(weights.min())
    if floor < -1e-12 * max(1.0, float(np.abs(weights).max())):
        raise NumericDegeneracyError(f"weight solve produced negative entry {floor:.3g}")
    np.clip(weights, 0.0, None, out=weights)
    return weights, eps


def signed_parallelepiped(weights, shift: float, p) -> tuple[np.ndarray, np.ndarray]:
    """V, t of the weighted +-1 parallelepiped: row u is w_u^(1/p) u^T and the
    matching target coordinate is w_u^(1/p) * shift.

    For every y in {-1, +1}^k the p-th distance power ||V y - t||_p^p equals
    the y-entry of H w.  Zero-weight rows are kept so d = 2^k is stable.
    """
    q = finite_pvalue(p)
    w = np.asarray(weights, dtype=float).ravel()
    if w.size == 0 or w.size & (w.size - 1):
        raise InvalidInputError("weights length must be a power of two")
    if float(w.min()) < 0.0:
        raise InvalidInputError(f"weights must be non-negative, got min {w.min()!r}")
    k = w.size.bit_length() - 1
    scale = w ** (1.0 / q)
    pts = np.array(cube_points(k), dtype=float)
    return scale[:, None] * pts, float(shift) * scale


def to_binary_coords(V, t) -> tuple[np.ndarray, np.ndarray]:
    """Re-express a +-1-cube gadget over {0, 1}^k: V' = 2V, t' = V 1 + t, so
    ||V' z - t'|| = ||V (2z - 1) - t|| and z = 0 maps to the all-minus vertex."""
    V = np.asarray(V, dtype=float)
    t = np.asarray(t, dtype=float).ravel()
    return 2.0 * V, V.sum(axis=1) + t


def find_isolating_parallelepiped(k: int, p) -> IsolatingGadget:
    """An isolating parallelepiped for arity k in the p norm.

    Exists iff p is not an even integer below k (or p >= k).  Pipeline: find a
    nonsingular shift, solve for vertex weights with the all-minus vertex
    bumped, re-express over {0, 1}^k, and normalize so the 2^k - 1 close
    vertices sit at distance exactly 1.
    """
    q = finite_pvalue(p)
    if float(q).is_integer() and int(q) % 2 == 0 and q < k:
        raise UnsupportedParametersError(
            f"no isolating parallelepiped exists for even integer p={q} < k={k}"
        )
    shift = find_shift(k, q)
    bump = np.zeros(2**k)
    bump[0] = 1.0  # all-minus-ones vertex is the isolated one
    weights, solve_eps = solve_weights(k, q, shift, bump)
    V, t = signed_parallelepiped(weights, shift, q)
    Vb, tb = to_binary_coords(V, t)
    ref = np.ones(k)  # any vertex off the isolated one; all-ones is z = 1^k
    scale = pnorm(Vb @ ref - tb, q)
    if scale <= 0.0:
        raise NumericDegeneracyError("degenerate construction: reference vertex at distance 0")
    Vb /= scale
    tb /= scale
    gadget = IsolatingGadget(
        p=q,
        k=int(k),
        V=Vb,
        t=tb,
        eps=pnorm(tb, q) - 1.0,
        kind=KIND_ISOLATING,
        meta={"shift": shift, "solve_eps": solve_eps},
    )
    report = verify_parallelepiped(gadget)
    if not report.passed:
        raise VerificationError(f"constructed gadget failed verification: {report.failures()}")
    return gadget


# ---------------------------------------------------------------------------
# parity gadgets


def parity_eps_lower_bound(k: int, p) -> float:
    """Guaranteed separation gap of the parity gadget:
    |sin(pi p/2)| / p^2 * (2p / (e^2 pi^2 k))^((p+1)/2)."""
    q = finite_pvalue(p)
    return abs(sin_half_pi(q)) / q**2 * (2 * q / (math.e**2 * math.pi**2 * k)) ** ((q + 1) / 2)


def parity_gadget(k: int, p, bit: int) -> IsolatingGadget:
    """Two-level gadget whose close vertices are exactly the {0, 1}^k points
    of Hamming-weight parity `bit`.

    Built from vertex weights 1 + (-1)^(eta + b') prod u_i with
    eta = floor(k/2) + floor(p/2) and shift 1 for odd k, 0 for even k; b' is
    the requested bit adjusted by k mod 2 so that the {0, 1} re-expression
    lands the requested parity class on the close level.  The level
    assignment is then checked against all 2^k vertices.
    """
    q = finite_pvalue(p)
    if bit not in (0, 1):
        raise InvalidInputError("parity bit must be 0 or 1")
    if not (isinstance(k, (int, np.integer)) and k >= 3):
        raise InvalidInputError(f"parity gadget needs k >= 3, got {k!r}")
    if not 1 <= q < k:
        raise InvalidInputError(f"parity gadget needs 1 <= p < k, got p={q}, k={k}")
    if float(q).is_integer() and int(q) % 2 == 0:
        raise DegenerateConstructionError(
            f"even integer p={q} < k makes the parity eigenvalue vanish (zero gap)"
        )

    shift = (1 + (-1) ** (k + 1)) / 2  # 1 for odd k, 0 for even k
    lam = distmatrix.eigenvalue_by_size(k, q, shift, 0)
    lam_par = distmatrix.eigenvalue_by_size(k, q, shift, k)
    if lam_par == 0.0:
        raise DegenerateConstructionError(f"parity eigenvalue vanished for k={k}, p={q}")
    low, high = lam - abs(lam_par), lam + abs(lam_par)
    if low <= 0.0:
        raise NumericDegeneracyError("parity construction lost positivity of the close level")

    eta = k // 2 + math.floor(q / 2)
    formula_bit = (bit + k) % 2
    sign = (-1) ** (eta + formula_bit)
    parities = np.array([(-1) ** v.count(-1) for v in cube_points(k)], dtype=float)
    weights = 1.0 + sign * parities
    V, t = signed_parallelepiped(weights, shift, q)
    Vb, tb = to_binary_coords(V, t)
    scale = low ** (1.0 / q)
    Vb /= scale
    tb /= scale
    eps = (high / low) ** (1.0 / q) - 1.0
    gadget = IsolatingGadget(
        p=q,
        k=int(k),
        V=Vb,
        t=tb,
        eps=eps,
        kind=KIND_TWO_LEVEL,
        constraint=parity_constraint(bit),
        meta={
            "shift": shift,
            "lambda": lam,
            "lambda_par": lam_par,
            "levels": (low, high),
        },
    )
    report = verify_parallelepiped(gadget)
    if not report.passed:
        raise VerificationError(f"parity gadget failed its level check: {report.failures()}")
    return gadget


# ---------------------------------------------------------------------------
# gadget transformations


def to_isolating_lattice(gadget: IsolatingGadget, constraint: dict | None = None) -> IsolatingGadget:
    """Extend a two-level gadget so the separation holds over all of Z^k.

    Appends scaled identity rows 2 mu^(1/p) I_k to V and mu^(1/p) 1 to t with
    mu = (1 + eps)^p / (3^p - 1), then rescales by (1 + k mu)^(-1/p).  The new
    gap is eps' = (((1+eps)^p + k mu) / (1 + k mu))^(1/p) - 1 >= eps/(1+k mu).
    """
    if gadget.eps <= 0.0:
        raise InvalidInputError("lattice extension needs a strictly positive gap")
    q = gadget.p
    k = gadget.k
    if constraint is None:
        constraint = gadget.constraint if gadget.constraint is not None else clause_constraint()
    mu = (1.0 + gadget.eps) ** q / (3.0**q - 1.0)
    denom = (1.0 + k * mu) ** (1.0 / q)
    V = np.vstack([gadget.V, 2.0 * mu ** (1.0 / q) * np.eye(k)]) / denom
    t = np.concatenate([gadget.t, mu ** (1.0 / q) * np.ones(k)]) / denom
    eps = (((1.0 + gadget.eps) ** q + k * mu) / (1.0 + k * mu)) ** (1.0 / q) - 1.0
    return IsolatingGadget(
        p=q,
        k=k,
        V=V,
        t=t,
        eps=eps,
        kind=KIND_LATTICE,
        constraint=constraint,
        meta={"mu": mu, "parent_eps": gadget.eps, **gadget.meta},
    )


def to_on_off(gadget: IsolatingGadget) -> OnOffGadget:
    """Drop the last column of a (k+1)-ary isolating parallelepiped to get an
    arity-k on-off gadget: t_on = t and t_off = t - v_{k+1}."""
    if gadget.kind != KIND_ISOLATING:
        raise InvalidInputError("on-off conversion needs an isolating parallelepiped")
    if gadget.k < 2:
        raise InvalidInputError("on-off conversion needs arity k >= 2")
    k = gadget.k - 1
    out = OnOffGadget(
        p=gadget.p,
        k=k,
        V=gadget.V[:, :k].copy(),
        t_on=gadget.t.copy(),
        t_off=gadget.t - gadget.V[:, k],
        eps=gadget.eps,
        meta=dict(gadget.meta),
    )
    report = verify_on_off(out)
    if not report.passed:
        raise VerificationError(f"on-off conversion failed verification: {report.failures()}")
    return out


def on_off_to_ip(gadget: OnOffGadget) -> IsolatingGadget:
    """Inverse direction: columns v_1..v_k plus v_{k+1} = t_on - t_off form a
    (k+1)-ary isolating parallelepiped with target t_on."""
    V = np.hstack([gadget.V, (gadget.t_on - gadget.t_off)[:, None]])
    return IsolatingGadget(
        p=gadget.p,
        k=gadget.k + 1,
        V=V,
        t=gadget.t_on.copy(),
        eps=pnorm(gadget.t_on, gadget.p) - 1.0,
        kind=KIND_ISOLATING,
        meta=dict(gadget.meta),
    )


# ---------------------------------------------------------------------------
# verification


def verify_parallelepiped(gadget: IsolatingGadget, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    """Check the two-level distance pattern over all 2^k boolean vertices.

    Conditions: close vertices at distance 1, far vertices at 1 + eps, gap
    above the noise floor, and (for the lattice kind only) full column rank.
    Failures are report entries, never exceptions.
    """
    close_res, close_wit = -1.0, None
    far_res, far_wit = -1.0, None
    for x in binary_points(gadget.k):
        d = gadget.distance(x)
        if gadget.satisfied(x):
            r = abs(d - 1.0)
            if r > close_res:
                close_res, close_wit = r, x
        else:
            r = abs(d - (1.0 + gadget.eps))
            if r > far_res:
                far_res, far_wit = r, x
    conditions = [
        Condition("close-vertices-at-1", close_res <= tol.allowance(1.0), max(close_res, 0.0), close_wit),
        Condition(
            "far-vertices-at-1+eps",
            far_res <= tol.allowance(1.0 + gadget.eps),
            max(far_res, 0.0),
            far_wit,
        ),
        Condition("positive-gap", gadget.eps > tol.rel, max(0.0, tol.rel - gadget.eps)),
    ]
    if gadget.kind == KIND_LATTICE:
        rank = int(np.linalg.matrix_rank(gadget.V))
        conditions.append(Condition("full-column-rank", rank == gadget.k, float(gadget.k - rank)))
    return _report(conditions, tol)


def verify_on_off(gadget: OnOffGadget, tol: Tolerance = DEFAULT_TOL) -> VerificationReport:
    on_res, on_wit = -1.0, None
    off_res, off_wit = -1.0, None
    origin_dist = pnorm(gadget.t_on, gadget.p)
    for x in binary_points(gadget.k):
        xv = np.asarray(x, dtype=float)
        d_off = pnorm(gadget.V @ xv - gadget.t_off, gadget.p)
        r = abs(d_off - 1.0)
        if r > off_res:
            off_res, off_wit = r, x
        if any(x):
            d_on = pnorm(gadget.V @ xv - gadget.t_on, gadget.p)
            r = abs(d_on - 1.0)
            if r > on_res:
                on_res, on_wit = r, x
    conditions = [
        Condition("on-target-nonzero-at-1", on_res <= tol.allowance(1.0), max(on_res, 0.0), on_wit),
        Condition(
            "on-target-origin-isolated",
            abs(origin_dist - (1.0 + gadget.eps)) <= tol.allowance(1.0 + gadget.eps),
            abs(origin_dist - (1.0 + gadget.eps)),
        ),
        Condition("off-target-all-at-1", off_res <= tol.allowance(1.0), max(off_res, 0.0), off_wit),
        Condition("positive-gap", gadget.eps > tol.rel, max(0.0, tol.rel - gadget.eps)),
    ]
    return _report(conditions, tol)


def verify_lattice_condition(
    gadget: IsolatingGadget, box_radius: int = 3, tol: Tolerance = DEFAULT_TOL
) -> VerificationReport:
    """Enumerate x in [-R, R+1]^k outside {0, 1}^k and check every distance is
    at least 1 + eps - tol.  A finite box is the only desk-scale certificate;
    the residual risk of points beyond it is inherent to the check."""
    if box_radius < 1:
        raise InvalidInputError("box_radius must be at least 1")
    ranges = [(-box_radius, box_radius + 1)] * gadget.k
    volume = (2 * box_radius + 2) ** gadget.k
    if volume > LATTICE_BOX_CAP:
        raise ResourceLimitError(f"lattice box of {volume} points exceeds cap {LATTICE_BOX_CAP}")
    floor = 1.0 + gadget.eps
    worst = math.inf
    witness = None
    q = gadget.p
    for chunk in integer_grid(ranges):
        inside = np.all((chunk == 0) | (chunk == 1), axis=1)
        pts = chunk[~inside]
        if pts.size == 0:
            continue
        diffs = pts @ gadget.V.T - gadget.t
        dists = np.sum(np.abs(diffs) ** q, axis=1) ** (1.0 / q)
        i = int(np.argmin(dists))
        if dists[i] < worst:
            worst = float(dists[i])
            witness = tuple(int(v) for v in pts[i])
    shortfall = max(0.0, floor - worst)
    condition = Condition(
        "non-boolean-points-far",
        worst >= floor - tol.allowance(floor),
        shortfall,
        witness,
    )
    return _report([condition], tol)


# ---------------------------------------------------------------------------
# even-exponent obstruction


def even_p_obstruction(V, t, p: int, k: int):
    """Alternating inclusion-exclusion sum over vertex subsets:
    sum_S (-1)^|S| ||t - sum_{i in S} v_i||_p^p.

    Identically zero for even integer p < k (the obstruction killing
    isolating gadgets there); generically nonzero for odd p.  Computed
    exactly in arbitrary-precision integers when all inputs are integers.
    """
    if not (isinstance(p, (int, np.integer)) and p >= 1):
        raise InvalidInputError(f"obstruction sum takes an integer p >= 1, got {p!r}")
    if not k > p:
        raise InvalidInputError(f"obstruction needs k > p, got k={k}, p={p}")
    rows = list(V)
    if len(rows) == 0:
        raise InvalidInputError("V must have at least one row")
    exact = all(
        isinstance(x, (int, np.integer)) and not isinstance(x, bool) for row in rows for x in row
    ) and all(isinstance(x, (int, np.integer)) and not isinstance(x, bool) for x in t)
    if exact:
        cols = [[int(rows[r][c]) for r in range(len(rows))] for c in range(k)]
        tt = [int(x) for x in t]
        total = 0
        for size in range(k + 1):
            for S in combinations(range(k), size):
                term = 0
                for r in range(len(tt)):
                    w = tt[r] - sum(cols[c][r] for c in S)
                    term += abs(w) ** p
                total += (-1) ** size * term
        return total
    Vf = np.asarray(V, dtype=float)
    tf = np.asarray(t, dtype=float).ravel()
    if Vf.shape != (tf.size, k):
        raise InvalidInputError("V must be d x k with t of length d")
    terms = []
    for size in range(k + 1):
        for S in combinations(range(k), size):
            w = tf - (Vf[:, S].sum(axis=1) if S else 0.0)
            terms.append((-1) ** size * float(pnorm_pow(w, p)))
    return math.fsum(terms)
