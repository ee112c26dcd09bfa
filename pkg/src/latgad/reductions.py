"""Compile boolean formulas into closest-vector instances.

Padded mode stacks one gadget block per clause plus a scaled identity block
that forces closest vectors to be boolean; gap mode stacks isolating-lattice
blocks with no padding and yields a promise instance with an explicit
approximation factor.  Preprocessing mode builds one basis per (n, k) that
covers every possible k-clause and serves any number of query formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InvalidInputError, ResourceLimitError, UnsupportedParametersError
from .formulas import Clause, CspFormula
from .gadgets import KIND_LATTICE, IsolatingGadget, OnOffGadget
from .numeric import PNorm, finite_pvalue, pvalue, sin_half_pi

MAX_TOTAL_WEIGHT = 10**4
MAX_BASIS_ENTRIES = 5 * 10**7


@dataclass(eq=False)
class CvpInstance:
    """Basis B (d x n), target t, decision radius r, and provenance metadata."""

    p: PNorm
    basis: np.ndarray
    target: np.ndarray
    radius: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.basis = np.asarray(self.basis, dtype=float)
        self.target = np.asarray(self.target, dtype=float).ravel()
        if not isinstance(self.p, PNorm):
            self.p = PNorm(pvalue(self.p))
        if self.basis.ndim != 2 or self.basis.shape[0] != self.target.size:
            raise InvalidInputError("basis and target dimensions disagree")
        if not self.radius > 0:
            raise InvalidInputError("radius must be positive")
        if np.linalg.matrix_rank(self.basis) != self.basis.shape[1]:
            raise InvalidInputError("basis must have full column rank")

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    @property
    def d(self) -> int:
        return self.basis.shape[0]


def _clause_block(gadget_V: np.ndarray, gadget_t: np.ndarray, clause: Clause, n: int):
    """Block matrix and shifted target for one clause: column s of the gadget
    lands on the clause's s-th variable, negated literals flip the sign and
    shift the target.  Unused gadget columns act as always-false literals."""
    d = gadget_t.size
    block = np.zeros((d, n))
    t = gadget_t.copy()
    for s, lit in enumerate(clause.literals):
        col = gadget_V[:, s]
        if lit > 0:
            block[:, lit - 1] += col
        else:
            block[:, -lit - 1] -= col
            t -= col
    return block, t


def sat_to_cvp(formula: CspFormula, gadget: IsolatingGadget, mode: str = "padded") -> CvpInstance:
    """Exact reduction: distance <= r over boolean coordinates iff some
    assignment satisfies weight at least W (W defaults to the total weight,
    i.e. plain satisfiability).

    Weighted formulas are encoded by repeating clause blocks, capped at total
    weight 10^4.  Clause arity up to the gadget arity is allowed; shorter
    clauses leave the remaining gadget columns unused.
    """
    if mode != "padded":
        raise InvalidInputError(f"sat_to_cvp handles mode 'padded', got {mode!r}")
    q = finite_pvalue(gadget.p)
    if not all(isinstance(c, Clause) for c in formula.constraints):
        raise InvalidInputError("sat_to_cvp takes clause formulas; use the gap path for parity")
    worst = max((c.arity for c in formula.constraints), default=0)
    if worst > gadget.k:
        raise InvalidInputError(f"clause arity {worst} exceeds gadget arity {gadget.k}")
    total = formula.total_weight()
    if total > MAX_TOTAL_WEIGHT:
        raise ResourceLimitError(f"total weight {total} exceeds cap {MAX_TOTAL_WEIGHT}")
    W = formula.threshold if formula.threshold is not None else total

    n = formula.n
    eps = gadget.eps
    # the empty formula keeps a positive identity scale: every boolean point
    # then sits at distance exactly r = n^(1/p) alpha (trivially satisfiable)
    alpha = max(total, 1) ** (1.0 / q) * (1.0 + eps)
    blocks, targets = [], []
    for i, clause in enumerate(formula.constraints):
        w = formula.weight_of(i)
        if w == 0:
            continue
        block, t = _clause_block(gadget.V, gadget.t, clause, n)
        blocks.extend([block] * w)
        targets.extend([t] * w)
    blocks.append(2.0 * alpha * np.eye(n))
    targets.append(alpha * np.ones(n))
    radius = (W + (total - W) * (1.0 + eps) ** q + n * alpha**q) ** (1.0 / q)
    return CvpInstance(
        p=PNorm(q),
        basis=np.vstack(blocks),
        target=np.concatenate(targets),
        radius=radius,
        meta={
            "mode": "padded",
            "n": n,
            "m": total,
            "threshold": W,
            "eps": eps,
            "alpha": alpha,
            "gadget_kind": gadget.kind,
            "gadget_k": gadget.k,
            "formula_sha256": formula.content_hash(),
        },
    )


def csp_to_cvp_gap(
    formula: CspFormula, lattices: list[IsolatingGadget], s: float, c: float
) -> tuple[CvpInstance, float]:
    """Gap reduction from a constraint formula with per-constraint isolating
    lattices: value >= c implies distance <= r, value < s implies distance
    > gamma * r, with gamma^p = (1 - s(1 - 1/(1+eps)^p)) / (1 - c(1 - 1/(1+eps)^p)).

    The smallest gadget eps is used when they differ.  Unused variables are
    rejected (the stacked basis would lose full column rank).
    """
    if not 0 < s <= c <= 1:
        raise InvalidInputError(f"need 0 < s <= c <= 1, got s={s}, c={c}")
    if formula.weights is not None:
        raise InvalidInputError("gap reduction takes unweighted formulas")
    if formula.m == 0:
        raise InvalidInputError("formula has no constraints")
    if len(lattices) != formula.m:
        raise InvalidInputError("one isolating lattice per constraint required")
    if any(g.kind != KIND_LATTICE for g in lattices):
        raise InvalidInputError("gap reduction needs isolating-lattice gadgets")
    q = finite_pvalue(lattices[0].p)
    if any(abs(finite_pvalue(g.p) - q) > 1e-12 for g in lattices):
        raise InvalidInputError("all gadgets must share the norm exponent")
    eps = min(g.eps for g in lattices)
    if eps <= 0:
        raise InvalidInputError("gap reduction is vacuous with eps = 0")
    used = set()
    for constraint in formula.constraints:
        used.update(constraint.variables() if isinstance(constraint, Clause) else constraint.variables)
    if used != set(range(1, formula.n + 1)):
        missing = sorted(set(range(1, formula.n + 1)) - used)
        raise InvalidInputError(f"variables never used (basis would be rank deficient): {missing}")

    n = formula.n
    blocks, targets = [], []
    for constraint, gadget in zip(formula.constraints, lattices):
        if isinstance(constraint, Clause):
            if constraint.arity > gadget.k:
                raise InvalidInputError("clause arity exceeds its gadget arity")
            block, t = _clause_block(gadget.V, gadget.t, constraint, n)
        else:
            if constraint.arity != gadget.k:
                raise InvalidInputError("parity constraint arity must match its gadget arity")
            block = np.zeros((gadget.d, n))
            for pos, var in enumerate(constraint.variables):
                block[:, var - 1] += gadget.V[:, pos]
            t = gadget.t.copy()
        blocks.append(block)
        targets.append(t)

    m = formula.m
    grow = (1.0 + eps) ** q
    radius = ((grow - c * (grow - 1.0)) * m) ** (1.0 / q)
    shrink = 1.0 - 1.0 / grow
    gamma = ((1.0 - s * shrink) / (1.0 - c * shrink)) ** (1.0 / q)
    inst = CvpInstance(
        p=PNorm(q),
        basis=np.vstack(blocks),
        target=np.concatenate(targets),
        radius=radius,
        meta={
            "mode": "gap",
            "n": n,
            "m": m,
            "s": s,
            "c": c,
            "eps": eps,
            "gamma": gamma,
            "formula_sha256": formula.content_hash(),
        },
    )
    return inst, gamma


# ---------------------------------------------------------------------------
# gap parameter calculators


@dataclass(frozen=True)
class GapParams:
    """Closed-form lower bound on the approximation factor, with the sharper
    value implied by an actual gadget gap when one is supplied."""

    gamma_bound: float
    degenerate: bool
    gamma: float | None = None


def gamma_from_eps(p, eps: float, s: float, c: float) -> float:
    q = finite_pvalue(p)
    grow = (1.0 + eps) ** q
    shrink = 1.0 - 1.0 / grow
    return ((1.0 - s * shrink) / (1.0 - c * shrink)) ** (1.0 / q)


def parity_gap_params(p, k: int, s: float, c: float, eps: float | None = None) -> GapParams:
    """Approximation-factor bound of the parity gap reduction:
    gamma >= 1 + (c - s) |sin(pi p/2)| / (4 p^3 k) * (2p / (e^2 pi^2 k))^((p+1)/2).

    Even integer p zeroes the sine and is reported as degenerate (bound 1).
    """
    q = finite_pvalue(p)
    if not (isinstance(k, (int, np.integer)) and k > max(2, q)):
        raise InvalidInputError(f"need integer k > max(2, p), got k={k}, p={q}")
    if not 0.5 < s <= c < 1:
        raise InvalidInputError(f"need 1/2 < s <= c < 1, got s={s}, c={c}")
    sine = abs(sin_half_pi(q))
    bound = 1.0 + (c - s) * sine / (4.0 * q**3 * k) * (
        2.0 * q / (math.e**2 * math.pi**2 * k)
    ) ** ((q + 1.0) / 2.0)
    degenerate = sine == 0.0
    gamma = gamma_from_eps(q, eps, s, c) if eps is not None else None
    return GapParams(gamma_bound=bound, degenerate=degenerate, gamma=gamma)


@dataclass(frozen=True)
class SatGapParams:
    s_prime: float
    c_prime: float
    params: GapParams


def sat_gap_params(p, k: int, s: float, c: float, eps: float | None = None) -> SatGapParams:
    """Chain the clause-to-parity promise map s' = 2^(k-1)/(2^k - 1) * s
    (likewise c') into the parity gap bound."""
    if not (isinstance(k, (int, np.integer)) and k >= 2):
        raise InvalidInputError(f"need integer k >= 2, got {k!r}")
    if not 1.0 - 2.0**-k < s <= c <= 1.0:
        raise InvalidInputError(f"need 1 - 2^-k < s <= c <= 1, got s={s}, c={c}")
    factor = 2.0 ** (k - 1) / (2.0**k - 1.0)
    s_prime, c_prime = factor * s, factor * c
    return SatGapParams(s_prime=s_prime, c_prime=c_prime, params=parity_gap_params(p, k, s_prime, c_prime, eps))


# ---------------------------------------------------------------------------
# preprocessing-based reductions


def _comb_rank(varset: tuple[int, ...], n: int, k: int) -> int:
    """Lexicographic rank of a sorted k-subset of {1..n}."""
    rank = 0
    prev = 0
    for pos, v in enumerate(varset):
        for skipped in range(prev + 1, v):
            rank += math.comb(n - skipped, k - pos - 1)
        prev = v
    return rank


@dataclass(eq=False)
class CvppArtifacts:
    """Fixed preprocessing basis covering all M = 2^k C(n, k) possible
    k-clauses on n variables, in lexicographic (variable set, polarity mask)
    order, plus the data needed to shape query targets."""

    n: int
    k: int
    mode: str  # "lp" | "inf"
    basis: np.ndarray
    block_rows: int
    gadget: OnOffGadget | None = None
    alpha: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def M(self) -> int:
        return 2**self.k * math.comb(self.n, self.k)

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    def clause_position(self, clause: Clause) -> tuple[int, int]:
        """(table index, polarity mask) of a clause with k distinct variables;
        the gadget column order is the sorted variable order."""
        if clause.arity != self.k:
            raise InvalidInputError(f"table holds {self.k}-clauses, got arity {clause.arity}")
        pairs = sorted((abs(lit), lit < 0) for lit in clause.literals)
        varset = tuple(v for v, _ in pairs)
        if len(set(varset)) != self.k:
            raise InvalidInputError(f"clause repeats variables, not in table: {clause.literals}")
        if varset[-1] > self.n:
            raise InvalidInputError(f"clause variable {varset[-1]} exceeds n={self.n}")
        mask = 0
        for _, neg in pairs:
            mask = (mask << 1) | int(neg)
        return _comb_rank(varset, self.n, self.k) * 2**self.k + mask, mask


def _iter_table(n: int, k: int):
    """All (varset, mask) table entries in deterministic order."""
    for varset in combinations(range(1, n + 1), k):
        for mask in range(2**k):
            yield varset, mask


def cvpp_preprocess(n: int, k: int, gadget: OnOffGadget) -> CvppArtifacts:
    """Basis with one on-off gadget block per possible k-clause plus the
    scaled identity block, alpha = M^(1/p) (1 + eps)."""
    if n < k:
        raise InvalidInputError(f"need n >= k, got n={n}, k={k}")
    if gadget.k != k:
        raise InvalidInputError(f"gadget arity {gadget.k} does not match k={k}")
    q = finite_pvalue(gadget.p)
    M = 2**k * math.comb(n, k)
    d = M * gadget.d + n
    if d * n > MAX_BASIS_ENTRIES:
        raise ResourceLimitError(f"basis of {d}x{n} entries exceeds cap {MAX_BASIS_ENTRIES}")
    alpha = M ** (1.0 / q) * (1.0 + gadget.eps)
    basis = np.zeros((d, n))
    row = 0
    for varset, mask in _iter_table(n, k):
        for s, var in enumerate(varset):
            sign = -1.0 if (mask >> (k - 1 - s)) & 1 else 1.0
            basis[row : row + gadget.d, var - 1] = sign * gadget.V[:, s]
        row += gadget.d
    basis[row:, :] = 2.0 * alpha * np.eye(n)
    return CvppArtifacts(
        n=n,
        k=k,
        mode="lp",
        basis=basis,
        block_rows=gadget.d,
        gadget=gadget,
        alpha=alpha,
        meta={"p": q, "eps": gadget.eps},
    )


def cvpp_query(artifacts: CvppArtifacts, formula: CspFormula) -> tuple[np.ndarray, float]:
    """Target and radius for one formula against the fixed basis: present
    clauses point at the on target, absent ones at the off target, both
    shifted by the clause's negated columns."""
    if artifacts.mode != "lp":
        raise InvalidInputError("artifacts were preprocessed for the max norm")
    if formula.weights is not None:
        raise UnsupportedParametersError(
            "weighted formulas are not expressible against a fixed clause table"
        )
    if formula.n != artifacts.n:
        raise InvalidInputError(f"formula has n={formula.n}, table was built for n={artifacts.n}")
    if not all(isinstance(c, Clause) for c in formula.constraints):
        raise InvalidInputError("preprocessing reduction takes clause formulas")
    gadget = artifacts.gadget
    q = finite_pvalue(gadget.p)
    k = artifacts.k
    present: dict[int, int] = {}
    for clause in formula.constraints:
        pos, mask = artifacts.clause_position(clause)
        if pos in present:
            raise InvalidInputError(f"duplicate clause in query formula: {clause.literals}")
        present[pos] = mask
    m = formula.m
    W = formula.threshold if formula.threshold is not None else m

    mask_shift = [gadget.V[:, [s for s in range(k) if (mask >> (k - 1 - s)) & 1]].sum(axis=1) for mask in range(2**k)]
    target = np.empty(artifacts.d)
    row = 0
    for pos, (_, mask) in enumerate(_iter_table(artifacts.n, k)):
        base = gadget.t_on if pos in present else gadget.t_off
        target[row : row + gadget.d] = base - mask_shift[mask]
        row += gadget.d
    target[row:] = artifacts.alpha
    M = artifacts.M
    radius = (
        (M - (m - W)) + (m - W) * (1.0 + gadget.eps) ** q + artifacts.n * artifacts.alpha**q
    ) ** (1.0 / q)
    return target, radius


def cvpp_inf_preprocess(n: int, k: int) -> CvppArtifacts:
    """Max-norm variant: one +-1 row per possible clause plus k I_n."""
    if n < k:
        raise InvalidInputError(f"need n >= k, got n={n}, k={k}")
    M = 2**k * math.comb(n, k)
    if (M + n) * n > MAX_BASIS_ENTRIES:
        raise ResourceLimitError("basis exceeds entry cap")
    basis = np.zeros((M + n, n))
    for row, (varset, mask) in enumerate(_iter_table(n, k)):
        for s, var in enumerate(varset):
            basis[row, var - 1] = -1.0 if (mask >> (k - 1 - s)) & 1 else 1.0
    basis[M:, :] = float(k) * np.eye(n)
    return CvppArtifacts(n=n, k=k, mode="inf", basis=basis, block_rows=1, meta={"p": "inf"})


def cvpp_inf_query(artifacts: CvppArtifacts, formula: CspFormula) -> tuple[np.ndarray, float]:
    """Max-norm query: t_i = (k+1)/2 - |N_i| for present clauses, k/2 - |N_i|
    for absent ones; the distance is at most k/2 iff the formula is satisfiable."""
    if artifacts.mode != "inf":
        raise InvalidInputError("artifacts were preprocessed for a finite norm")
    if formula.weights is not None or formula.threshold is not None:
        raise UnsupportedParametersError("max-norm preprocessing handles plain satisfiability only")
    if formula.n != artifacts.n:
        raise InvalidInputError(f"formula has n={formula.n}, table was built for n={artifacts.n}")
    k = artifacts.k
    present: dict[int, int] = {}
    for clause in formula.constraints:
        if not isinstance(clause, Clause):
            raise InvalidInputError("preprocessing reduction takes clause formulas")
        pos, mask = artifacts.clause_position(clause)
        if pos in present:
            raise InvalidInputError(f"duplicate clause in query formula: {clause.literals}")
        present[pos] = mask
    M = artifacts.M
    target = np.empty(M + artifacts.n)
    for pos, (_, mask) in enumerate(_iter_table(artifacts.n, k)):
        negs = bin(mask).count("1")
        target[pos] = ((k + 1) / 2 if pos in present else k / 2) - negs
    target[M:] = k / 2
    return target, k / 2
