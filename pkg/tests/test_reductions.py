import hashlib
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latgad import gadgets, oracle, reductions, serialize
from latgad.errors import InvalidInputError, UnsupportedParametersError
from latgad.formulas import Clause, CspFormula, XorConstraint
from latgad.numeric import binary_points, pnorm


@pytest.fixture(scope="module")
def gadget3():
    return gadgets.find_isolating_parallelepiped(3, 2.5)


@pytest.fixture(scope="module")
def onoff2(gadget3):
    return gadgets.to_on_off(gadget3)


@pytest.fixture(scope="module")
def parity_lattices():
    return {
        0: gadgets.to_isolating_lattice(gadgets.parity_gadget(3, 1.0, 0)),
        1: gadgets.to_isolating_lattice(gadgets.parity_gadget(3, 1.0, 1)),
    }


def random_3sat(n, m, seed, distinct=False):
    rng = random.Random(seed)
    clauses, seen = [], set()
    while len(clauses) < m:
        variables = sorted(rng.sample(range(1, n + 1), 3))
        literals = tuple(v if rng.random() < 0.5 else -v for v in variables)
        if distinct and literals in seen:
            continue
        seen.add(literals)
        clauses.append(Clause(literals))
    return CspFormula(n=n, constraints=clauses)


class TestSatToCvp:
    def test_single_clause_block_distances(self, gadget3):
        f = CspFormula(n=3, constraints=[Clause((1, 2, 3))])
        inst = reductions.sat_to_cvp(f, gadget3)
        d_star = gadget3.d
        block = inst.basis[:d_star, :]
        t = inst.target[:d_star]
        for z in binary_points(3):
            dist = pnorm(block @ np.array(z, float) - t, gadget3.p)
            if any(z):
                assert dist == pytest.approx(1.0, abs=1e-9)
            else:
                assert dist == pytest.approx(1.0 + gadget3.eps, rel=1e-9)

    def test_negated_literal_flips_sign_and_shifts(self, gadget3):
        f = CspFormula(n=3, constraints=[Clause((-1, 2, 3))])
        inst = reductions.sat_to_cvp(f, gadget3)
        d_star = gadget3.d
        assert np.allclose(inst.basis[:d_star, 0], -gadget3.V[:, 0])
        assert np.allclose(inst.target[:d_star], gadget3.t - gadget3.V[:, 0])

    def test_short_clause_leaves_columns_unused(self, gadget3):
        f = CspFormula(n=2, constraints=[Clause((1, -2))])
        inst = reductions.sat_to_cvp(f, gadget3)
        for z in binary_points(2):
            dist = pnorm(inst.basis[: gadget3.d] @ np.array(z, float) - inst.target[: gadget3.d], 2.5)
            expected = 1.0 if Clause((1, -2)).satisfied(z) else 1.0 + gadget3.eps
            assert dist == pytest.approx(expected, rel=1e-9)

    def test_alpha_and_radius_formulas(self, gadget3):
        f = random_3sat(5, 7, 3)
        inst = reductions.sat_to_cvp(f, gadget3)
        q = 2.5
        alpha = 7 ** (1 / q) * (1 + gadget3.eps)
        assert inst.meta["alpha"] == pytest.approx(alpha)
        r = (7 + 0 + 5 * alpha**q) ** (1 / q)  # W = m for plain SAT
        assert inst.radius == pytest.approx(r)

    def test_empty_formula(self, gadget3):
        f = CspFormula(n=4, constraints=[])
        inst = reductions.sat_to_cvp(f, gadget3)
        alpha = inst.meta["alpha"]
        assert inst.radius == pytest.approx(4 ** (1 / 2.5) * alpha)
        for z in binary_points(4):
            d = pnorm(inst.basis @ np.array(z, float) - inst.target, 2.5)
            assert d == pytest.approx(inst.radius, rel=1e-12)
        assert oracle.validate_reduction(f, inst).passed

    def test_weighted_duplicates_blocks(self, gadget3):
        f = CspFormula(n=3, constraints=[Clause((1, 2, 3))], weights=[3], threshold=3)
        inst = reductions.sat_to_cvp(f, gadget3)
        assert inst.d == 3 * gadget3.d + 3

    def test_weight_cap(self, gadget3):
        f = CspFormula(n=3, constraints=[Clause((1, 2, 3))], weights=[10**4 + 1])
        with pytest.raises(Exception):
            reductions.sat_to_cvp(f, gadget3)

    def test_arity_above_gadget_rejected(self, gadget3):
        f = CspFormula(n=4, constraints=[Clause((1, 2, 3, 4))])
        with pytest.raises(InvalidInputError):
            reductions.sat_to_cvp(f, gadget3)

    @given(seed=st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=15, deadline=None)
    def test_distance_decomposition(self, gadget3, seed):
        rng = np.random.default_rng(seed)
        f = random_3sat(4, 5, seed)
        inst = reductions.sat_to_cvp(f, gadget3)
        z = rng.integers(-2, 3, size=4).astype(float)
        q = 2.5
        total = pnorm(inst.basis @ z - inst.target, q) ** q
        d_star = gadget3.d
        parts = sum(
            pnorm(inst.basis[i * d_star : (i + 1) * d_star] @ z - inst.target[i * d_star : (i + 1) * d_star], q) ** q
            for i in range(5)
        )
        parts += pnorm(inst.basis[5 * d_star :] @ z - inst.target[5 * d_star :], q) ** q
        assert total == pytest.approx(parts, rel=1e-9)

    def test_witness_correspondence(self, gadget3):
        for seed in range(4):
            f = random_3sat(5, 9, seed)
            inst = reductions.sat_to_cvp(f, gadget3)
            best, optimal = oracle.max_sat_brute(f)
            sol = oracle.cvp_enumerate(inst.basis, inst.target, inst.p, (0, 1))
            assert sorted(sol.closest) == sorted(optimal)

    def test_non_binary_exclusion(self, gadget3):
        f = random_3sat(4, 6, 17)
        inst = reductions.sat_to_cvp(f, gadget3)
        report = oracle.validate_reduction(f, inst, box=(-1, 2))
        assert report.passed
        assert any(c.name == "non-binary-exclusion" for c in report.conditions)


class TestGapReduction:
    def _formula(self, seed, n=5, m=8):
        rng = random.Random(seed)
        constraints = [
            XorConstraint(tuple(sorted(rng.sample(range(1, n + 1), 3))), rng.randint(0, 1))
            for _ in range(m)
        ]
        return CspFormula(n=n, constraints=constraints)

    def test_c_equals_s_collapses_gamma(self, parity_lattices):
        f = self._formula(0)
        lattices = [parity_lattices[c.bit] for c in f.constraints]
        _, gamma = reductions.csp_to_cvp_gap(f, lattices, s=0.75, c=0.75)
        assert gamma == pytest.approx(1.0)

    def test_c_one_radius(self, parity_lattices):
        f = self._formula(1)
        lattices = [parity_lattices[c.bit] for c in f.constraints]
        inst, _ = reductions.csp_to_cvp_gap(f, lattices, s=0.6, c=1.0)
        assert inst.radius == pytest.approx(f.m ** (1 / 1.0))

    def test_gamma_formula(self, parity_lattices):
        f = self._formula(2)
        lattices = [parity_lattices[c.bit] for c in f.constraints]
        _, gamma = reductions.csp_to_cvp_gap(f, lattices, s=0.6, c=0.9)
        eps = lattices[0].eps
        grow = (1 + eps) ** 1.0
        shrink = 1 - 1 / grow
        assert gamma == pytest.approx((1 - 0.6 * shrink) / (1 - 0.9 * shrink))

    def test_unused_variable_rejected(self, parity_lattices):
        f = CspFormula(n=4, constraints=[XorConstraint((1, 2, 3), 0)])
        with pytest.raises(InvalidInputError):
            reductions.csp_to_cvp_gap(f, [parity_lattices[0]], s=0.6, c=0.9)

    @given(
        s=st.floats(min_value=0.55, max_value=0.9),
        dc=st.floats(min_value=0.0, max_value=0.09),
    )
    @settings(max_examples=30, deadline=None)
    def test_gamma_monotone(self, s, dc):
        # non-decreasing in c, non-increasing in s
        eps = 0.25
        c = s + dc
        g = reductions.gamma_from_eps(1.0, eps, s, c)
        assert reductions.gamma_from_eps(1.0, eps, s, min(c + 0.05, 0.999)) >= g - 1e-12
        assert reductions.gamma_from_eps(1.0, eps, max(0.51, s - 0.04), c) >= g - 1e-12


class TestGapParams:
    def test_printed_bound_value(self):
        params = reductions.parity_gap_params(1.0, 3, s=0.8, c=0.9)
        expected = 1.0 + 0.1 * (1.0 / 12.0) * (2.0 / (3.0 * math.e**2 * math.pi**2))
        assert params.gamma_bound == pytest.approx(expected, rel=1e-9)
        assert params.gamma_bound == pytest.approx(1.0000762, abs=2e-6)

    def test_s_equals_c(self):
        params = reductions.parity_gap_params(1.5, 4, s=0.8, c=0.8)
        assert params.gamma_bound == pytest.approx(1.0)

    def test_even_p_degenerate_flag(self):
        params = reductions.parity_gap_params(2.0, 4, s=0.7, c=0.9)
        assert params.degenerate
        assert params.gamma_bound == pytest.approx(1.0)

    def test_sharper_gamma_dominates_bound(self):
        lattice = gadgets.to_isolating_lattice(gadgets.parity_gadget(3, 1.0, 0))
        params = reductions.parity_gap_params(1.0, 3, s=0.8, c=0.9, eps=lattice.eps)
        assert params.gamma is not None
        assert params.gamma >= params.gamma_bound

    def test_range_validation(self):
        with pytest.raises(InvalidInputError):
            reductions.parity_gap_params(1.0, 3, s=0.4, c=0.9)
        with pytest.raises(InvalidInputError):
            reductions.parity_gap_params(3.5, 3, s=0.8, c=0.9)  # k must exceed p


class TestSatGapParams:
    def test_promise_map(self):
        result = reductions.sat_gap_params(1.0, 3, s=1.0, c=1.0)
        assert result.s_prime == pytest.approx(4.0 / 7.0)
        assert result.c_prime == pytest.approx(4.0 / 7.0)

    def test_large_k_factor_limit(self):
        result = reductions.sat_gap_params(1.0, 12, s=1.0, c=1.0)
        assert result.s_prime == pytest.approx(0.5, abs=1e-3)

    def test_chained_gamma_matches_closed_form(self):
        p, k, s, c = 1.5, 4, 0.95, 1.0
        result = reductions.sat_gap_params(p, k, s, c)
        factor = 2.0 ** (k - 1) / (2.0**k - 1.0)
        expected = 1.0 + factor * (c - s) * abs(math.sin(math.pi * p / 2)) / (4 * p**3 * k) * (
            2 * p / (math.e**2 * math.pi**2 * k)
        ) ** ((p + 1) / 2)
        assert result.params.gamma_bound == pytest.approx(expected, rel=1e-12)

    def test_range_validation(self):
        with pytest.raises(InvalidInputError):
            reductions.sat_gap_params(1.0, 3, s=0.8, c=0.9)  # s must exceed 1 - 2^-k


class TestCvppFinite:
    def test_clause_table_rank_is_enumeration_order(self, onoff2):
        from itertools import combinations

        art = reductions.cvpp_preprocess(6, 2, onoff2)
        expected = 0
        for varset in combinations(range(1, 7), 2):
            for mask in range(4):
                lits = tuple(-v if (mask >> (1 - s)) & 1 else v for s, v in enumerate(varset))
                pos, got_mask = art.clause_position(Clause(lits))
                assert (pos, got_mask) == (expected, mask)
                expected += 1
        assert expected == art.M

    def test_table_size(self, onoff2):
        art = reductions.cvpp_preprocess(6, 2, onoff2)
        assert art.M == 4 * math.comb(6, 2)
        assert art.d == art.M * onoff2.d + 6

    def test_n_equals_k(self, onoff2):
        art = reductions.cvpp_preprocess(2, 2, onoff2)
        assert art.M == 4

    def test_sign_convention(self, onoff2):
        art = reductions.cvpp_preprocess(3, 2, onoff2)
        pos, mask = art.clause_position(Clause((-1, 2)))
        assert mask == 2  # first (sorted) literal negated
        block = art.basis[pos * onoff2.d : (pos + 1) * onoff2.d]
        assert np.allclose(block[:, 0], -onoff2.V[:, 0])
        assert np.allclose(block[:, 1], onoff2.V[:, 1])

    def test_query_radius_full_table(self, onoff2):
        art = reductions.cvpp_preprocess(3, 2, onoff2)
        all_clauses = []
        for a in (1, -1):
            for b in (2, -2):
                all_clauses.append(Clause((a, b)))
        for a in (1, -1):
            for b in (3, -3):
                all_clauses.append(Clause((a, b)))
        for a in (2, -2):
            for b in (3, -3):
                all_clauses.append(Clause((a, b)))
        f = CspFormula(n=3, constraints=all_clauses)
        _, radius = reductions.cvpp_query(art, f)
        q = onoff2.p
        expected = (art.M + 3 * art.alpha**q) ** (1 / q)  # m = M, W = m
        assert radius == pytest.approx(expected)

    def test_decisions_match_brute_force(self, onoff2):
        art = reductions.cvpp_preprocess(5, 2, onoff2)
        rng = random.Random(4)
        for _ in range(6):
            clauses, seen = [], set()
            while len(clauses) < 6:
                vs = tuple(sorted(rng.sample(range(1, 6), 2)))
                lits = tuple(v if rng.random() < 0.5 else -v for v in vs)
                if lits in seen:
                    continue
                seen.add(lits)
                clauses.append(Clause(lits))
            f = CspFormula(n=5, constraints=clauses)
            target, radius = reductions.cvpp_query(art, f)
            sol = oracle.cvp_enumerate(art.basis, target, onoff2.p, (0, 1))
            best, _ = oracle.max_sat_brute(f)
            assert (sol.distance <= radius * (1 + 1e-9)) == (best == f.m)

    def test_basis_stable_across_queries(self, onoff2):
        art = reductions.cvpp_preprocess(4, 2, onoff2)
        digest = hashlib.sha256(serialize.dumps(serialize.cvpp_to_json(art)).encode()).hexdigest()
        f = CspFormula(n=4, constraints=[Clause((1, 2)), Clause((-3, 4))])
        reductions.cvpp_query(art, f)
        reductions.cvpp_query(art, CspFormula(n=4, constraints=[Clause((-1, -2))]))
        again = hashlib.sha256(serialize.dumps(serialize.cvpp_to_json(art)).encode()).hexdigest()
        assert digest == again

    def test_duplicate_clause_rejected(self, onoff2):
        art = reductions.cvpp_preprocess(4, 2, onoff2)
        f = CspFormula(n=4, constraints=[Clause((1, 2)), Clause((2, 1))])
        with pytest.raises(InvalidInputError):
            reductions.cvpp_query(art, f)

    def test_clause_not_in_table(self, onoff2):
        art = reductions.cvpp_preprocess(4, 2, onoff2)
        f = CspFormula(n=4, constraints=[Clause((1, 1))])  # repeated variable
        with pytest.raises(InvalidInputError):
            reductions.cvpp_query(art, f)

    def test_weights_rejected(self, onoff2):
        art = reductions.cvpp_preprocess(4, 2, onoff2)
        f = CspFormula(n=4, constraints=[Clause((1, 2))], weights=[2])
        with pytest.raises(UnsupportedParametersError):
            reductions.cvpp_query(art, f)


class TestCvppMaxNorm:
    def test_residual_levels_k3(self):
        # satisfied clause rows land within 1, falsified at exactly 2,
        # absent-clause rows within 1.5
        art = reductions.cvpp_inf_preprocess(4, 3)
        f = CspFormula(n=4, constraints=[Clause((1, 2, 3))])
        target, radius = reductions.cvpp_inf_query(art, f)
        assert radius == 1.5
        pos, _ = art.clause_position(Clause((1, 2, 3)))
        y = np.array([0.0, 0.0, 0.0, 0.0])
        assert abs(art.basis[pos] @ y - target[pos]) == pytest.approx(2.0)
        y = np.array([1.0, 0.0, 0.0, 0.0])
        assert abs(art.basis[pos] @ y - target[pos]) <= 1.0
        other, _ = art.clause_position(Clause((1, 2, 4)))
        for z in binary_points(4):
            assert abs(art.basis[other] @ np.array(z, float) - target[other]) <= 1.5

    def test_decisions_match_brute_force(self):
        art = reductions.cvpp_inf_preprocess(6, 3)
        rng = random.Random(11)
        for _ in range(6):
            clauses, seen = [], set()
            while len(clauses) < 9:
                vs = tuple(sorted(rng.sample(range(1, 7), 3)))
                lits = tuple(v if rng.random() < 0.5 else -v for v in vs)
                if lits in seen:
                    continue
                seen.add(lits)
                clauses.append(Clause(lits))
            f = CspFormula(n=6, constraints=clauses)
            target, radius = reductions.cvpp_inf_query(art, f)
            sol = oracle.cvp_enumerate(art.basis, target, math.inf, (0, 1))
            best, _ = oracle.max_sat_brute(f)
            assert (sol.distance <= radius + 1e-12) == (best == f.m)

    def test_weights_rejected(self):
        art = reductions.cvpp_inf_preprocess(4, 3)
        f = CspFormula(n=4, constraints=[Clause((1, 2, 3))], weights=[1])
        with pytest.raises(UnsupportedParametersError):
            reductions.cvpp_inf_query(art, f)
