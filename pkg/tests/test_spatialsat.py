"""Spatial decision procedures: broom encoding, type elimination, and
the RCC-8 translation route, cross-checked against exhaustive oracles."""

import random

import pytest

import stlogic.frames as F
import stlogic.spatialsat as SP
import stlogic.syntax as S
from stlogic._status import BUDGET_EXCEEDED, UNKNOWN, UNSAT

from .oracles import rc_broom_oracle, tiny_s4u_oracle

P = S.parse_formula

EC3 = P("some (reg(x) & reg(y) & reg(z))"
        " && !some (int reg(x) & int reg(y))"
        " && !some (int reg(y) & int reg(z))"
        " && !some (int reg(z) & int reg(x))")
CLOPEN = P("all (~cl p | p) && all (~p | int p) && some p && !all p")
DENSE_CODENSE = P("some p && all (~p | cl ~p) && all (p | cl p)")
BOUNDARY_CHAIN = P("some (reg(q1) & ~int reg(q1))"
                   " && all (~(reg(q1) & ~int reg(q1))"
                   " | cl (int reg(q1) & reg(q2) & ~int reg(q2)))")


def is_sat(v):
    return v not in (UNSAT, UNKNOWN, BUDGET_EXCEEDED)


def broom_layout(fr):
    """Map root -> leaf set for a union-of-brooms frame."""
    roots = {x for x in fr.points if fr.succ[x] != frozenset({x})}
    layout = {}
    covered = set()
    for r in sorted(roots):
        leaves = fr.succ[r] - {r}
        for l in leaves:
            assert fr.succ[l] == frozenset({l})
        layout[r] = leaves
        covered |= leaves | {r}
    assert covered == set(fr.points)
    return layout


def region_subterms(f):
    out = set()

    def wt(t):
        match t:
            case S.Closure(S.Interior(x)):
                out.add(t)
                wt(x)
            case S.Var() | S.Top() | S.Bot():
                pass
            case S.Comp(a) | S.Interior(a) | S.Closure(a):
                wt(a)
            case S.Inter(a, b) | S.UnionT(a, b):
                wt(a)
                wt(b)

    def wf(g):
        match g:
            case S.All(t):
                wt(t)
            case S.Not(a):
                wf(a)
            case S.And(a, b):
                wf(a)
                wf(b)
            case _:
                pass

    wf(f)
    return out


def check_rc_witness(f, m, bounds=None):
    """Soundness, bound adherence, and the roots-are-the-only-boundary
    property for an rc_sat witness."""
    assert F.eval_formula(m, f, 0)
    if bounds is None:
        bounds = SP.BroomBudget.for_formula(f)
    layout = broom_layout(m.frame)
    assert len(layout) <= bounds.max_brooms
    for leaves in layout.values():
        assert 1 <= len(leaves) <= bounds.max_leaves_per_broom
    for t in region_subterms(f):
        v = F.eval_term(m, t, 0)
        boundary = F.closure_of(m.frame, v) - F.interior_of(m.frame, v)
        for x in boundary:
            assert x in layout, "boundary point is not a root"
            assert layout[x] & v and layout[x] - v


def cluster_levels(fr):
    """Length of the longest strict chain of clusters, in clusters."""
    clus = {x: frozenset(y for y in fr.points
                         if (x, y) in fr.rel and (y, x) in fr.rel)
            for x in fr.points}
    memo = {}

    def h(c):
        if c not in memo:
            nxt = {clus[y] for x in c for y in fr.succ[x]} - {c}
            memo[c] = 1 + max((h(d) for d in nxt), default=0)
        return memo[c]

    return max(h(c) for c in set(clus.values()))


class TestRcSat:
    def test_ec3_sat_needs_three_leaves(self):
        m = SP.rc_sat(EC3)
        check_rc_witness(EC3, m)
        n = S.metrics(EC3).length
        # external contact of three regions forces an n-broom, n >= 3
        assert SP.rc_sat(EC3, bounds=SP.BroomBudget(n, 2)) is UNSAT
        m3 = SP.rc_sat(EC3, bounds=SP.BroomBudget(n, 3))
        check_rc_witness(EC3, m3, SP.BroomBudget(n, 3))

    def test_dc_self_with_nonempty_region_unsat(self):
        f = S.And(S.expand_rcc8(P("DC(p,p)")), P("some reg(p)"))
        assert SP.rc_sat(f) is UNSAT

    def test_eq_self_sat(self):
        f = S.expand_rcc8(P("EQ(p,p)"))
        m = SP.rc_sat(f)
        check_rc_witness(f, m)

    def test_flag_formulas(self):
        assert SP.rc_sat(P("all p && !all p")) is UNSAT
        m = SP.rc_sat(P("all p && some reg(q)"))
        assert F.eval_formula(m, P("all p"), 0)

    def test_constant_formulas(self):
        assert is_sat(SP.rc_sat(S.TrueF()))
        assert SP.rc_sat(S.FalseF()) is UNSAT

    def test_budget_exceeded(self):
        assert SP.rc_sat(EC3, budget=1) is BUDGET_EXCEEDED

    def test_fragment_errors(self):
        with pytest.raises(SP.FragmentError):
            SP.rc_sat(DENSE_CODENSE)
        with pytest.raises(SP.FragmentError):
            SP.rc_sat(P("all Xt reg(p)"))
        with pytest.raises(SP.FragmentError):
            SP.rc_sat(P("EC(a,b)"))

    def test_deterministic(self):
        a = SP.rc_sat(EC3)
        b = SP.rc_sat(EC3)
        assert F.model_to_json(a) == F.model_to_json(b)


class TestS4uSat:
    def test_clopen_proper_subset_needs_disconnected_space(self):
        m = SP.s4u_sat(CLOPEN)
        assert F.eval_formula(m, CLOPEN, 0)
        # the witness splits into at least two components
        pts = list(m.frame.points)
        comp = {pts[0]}
        stack = [pts[0]]
        sym = m.frame.rel | {(b, a) for (a, b) in m.frame.rel}
        while stack:
            x = stack.pop()
            for y in pts:
                if y not in comp and ((x, y) in sym or (y, x) in sym):
                    comp.add(y)
                    stack.append(y)
        assert len(comp) < len(pts)

    def test_dense_codense_two_point_cluster(self):
        m = SP.s4u_sat(DENSE_CODENSE)
        assert F.eval_formula(m, DENSE_CODENSE, 0)
        # brute force: no 1-point model, and the first 2-point model
        # found is a proper cluster
        assert tiny_s4u_oracle(DENSE_CODENSE, max_points=1) is None
        w = tiny_s4u_oracle(DENSE_CODENSE, max_points=2)
        assert w is not None
        assert w.frame.rel == frozenset({(0, 0), (0, 1), (1, 0), (1, 1)})
        assert len(m.frame.points) == 2

    def test_full_flag_with_complement_unsat(self):
        assert SP.s4u_sat(P("all p && some ~p")) is UNSAT

    def test_type_cap_unknown(self):
        assert SP.s4u_sat(DENSE_CODENSE, type_cap=1) is UNKNOWN

    def test_fragment_error(self):
        with pytest.raises(SP.FragmentError):
            SP.s4u_sat(P("all p U all q"))


class TestRcmaxSat:
    def test_boundary_chain_depth_two_witness(self):
        m = SP.rcmax_sat(BOUNDARY_CHAIN)
        assert F.eval_formula(m, BOUNDARY_CHAIN, 0)
        # three cluster levels = two strict steps; two points are too few
        assert cluster_levels(m.frame) == 3
        assert tiny_s4u_oracle(BOUNDARY_CHAIN, max_points=2) is None

    def test_full_region_with_complement_unsat(self):
        assert SP.rcmax_sat(P("all reg(q) && some ~reg(q)")) is UNSAT

    def test_fragment_error(self):
        with pytest.raises(SP.FragmentError):
            SP.rcmax_sat(DENSE_CODENSE)


class TestRcc8Brcc8Sat:
    def test_ec_nttp_conflict(self):
        assert SP.rcc8_brcc8_sat(P("EC(a,b) && NTPP(a,b)")) is UNSAT

    def test_eq_with_boolean_region(self):
        f = P("EQ(s, reg(x & y))")
        m = SP.rcc8_brcc8_sat(f)
        assert F.eval_formula(m, S.expand_rcc8(f), 0)

    def test_tpp_both_ways_conflict(self):
        assert SP.rcc8_brcc8_sat(P("TPP(a,b) && TPPi(a,b)")) is UNSAT

    def test_each_predicate_alone_sat(self):
        for name in S.RCC8_PREDICATES:
            f = P(f"{name}(a,b)")
            m = SP.rcc8_brcc8_sat(f)
            assert F.eval_formula(m, S.expand_rcc8(f), 0), name

    def test_fragment_error(self):
        with pytest.raises(SP.FragmentError):
            SP.rcc8_brcc8_sat(P("all p"))


def _random_rc_formula(rng):
    names = ("p", "q")

    def rho():
        return S.Closure(S.Interior(S.Var(rng.choice(names))))

    def term(depth):
        r = rng.random()
        if depth <= 0 or r < 0.35:
            t = rho()
            return S.Interior(t) if rng.random() < 0.4 else t
        if r < 0.55:
            return S.Comp(term(depth - 1))
        if r < 0.8:
            return S.Inter(term(depth - 1), term(depth - 1))
        return S.UnionT(term(depth - 1), term(depth - 1))

    def skel(depth):
        r = rng.random()
        if depth <= 0 or r < 0.45:
            return S.All(term(rng.randint(0, 2)))
        if r < 0.7:
            return S.Not(skel(depth - 1))
        return S.And(skel(depth - 1), skel(depth - 1))

    return skel(rng.randint(0, 2))


def _sample_rc_formulas(n):
    rng = random.Random(20260815)
    out = []
    guard = 0
    while len(out) < n and guard < 40000:
        guard += 1
        f = _random_rc_formula(rng)
        met = S.metrics(f)
        if met.length <= 8 and S.spatial_leq(
                S.classify(f).spatial_fragment, "RC"):
            out.append(f)
    assert len(out) == n
    return out


class TestOracleAgreement:
    SAMPLE = _sample_rc_formulas(500)

    def test_rc_sat_matches_exhaustive_broom_search(self):
        for f in self.SAMPLE:
            expect = rc_broom_oracle(f)
            got = SP.rc_sat(f)
            assert is_sat(got) == expect, S.print_formula(f)
            if is_sat(got):
                check_rc_witness(f, got)

    def test_s4u_agrees_with_rc_on_rc_formulas(self):
        for f in self.SAMPLE:
            rc = SP.rc_sat(f)
            s4 = SP.s4u_sat(f)
            assert is_sat(rc) == is_sat(s4), S.print_formula(f)
            if is_sat(s4):
                assert F.eval_formula(s4, f, 0)
