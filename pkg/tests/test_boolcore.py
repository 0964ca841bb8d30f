"""Clause sets, the DPLL kernel (both backends) and Krom closure."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from stlogic import boolcore as B
from stlogic._status import BUDGET_EXCEEDED, INCONSISTENT, UNSAT


def cs(*clauses):
    out = B.ClauseSet()
    for cl in clauses:
        out.add_clause(cl)
    return out


class TestClauseSet:
    def test_dedup_and_tautology(self):
        c = cs([("a", True), ("a", True), ("b", False)])
        assert c.literal_clauses() == [frozenset({("a", True), ("b", False)})]
        c.add_clause([("a", True), ("a", False)])  # tautology dropped
        assert len(c.clauses) == 1

    def test_krom_flag(self):
        assert cs([("a", True), ("b", True)]).krom
        assert not cs([("a", True), ("b", True), ("c", True)]).krom

    def test_atoms_keep_first_seen_order(self):
        c = cs([("z", True)], [("a", True), ("z", False)])
        assert c.atoms == ["z", "a"]


class TestDpll:
    def test_spec_example(self):
        c = cs([("a", True), ("b", True)],
               [("a", False), ("b", True)],
               [("b", False), ("c", True)])
        model = B.dpll_sat(c)
        assert model["b"] and model["c"]

    def test_empty_set_all_false(self):
        assert B.dpll_sat(B.ClauseSet()) == {}
        c = B.ClauseSet()
        c.add_clause([("a", True), ("b", False)])
        model = B.dpll_sat(c)
        # lowest atom, true first; the untouched atom defaults to false
        assert model == {"a": True, "b": False}

    def test_unsat(self):
        c = cs([("a", True)], [("a", False)])
        assert B.dpll_sat(c) is UNSAT

    def test_budget(self):
        c = cs(*([[(f"x{i}", True), (f"x{i+1}", False)] for i in range(8)]
                 + [[("x0", False), ("x8", True)]]))
        assert B.dpll_sat(c, budget=1) is BUDGET_EXCEEDED

    def test_deterministic(self):
        c = cs([("b", True), ("a", True)], [("c", True), ("a", False)])
        assert B.dpll_sat(c) == B.dpll_sat(c.copy())

    def test_models_satisfy(self):
        c = cs([("p", True), ("q", True)], [("p", False), ("r", True)],
               [("q", False), ("r", False)])
        model = B.dpll_sat(c)
        for clause in c.literal_clauses():
            assert any(model[a] == pos for a, pos in clause)


def _truth_table_sat(c: B.ClauseSet):
    atoms = c.atoms
    for bits in itertools.product([False, True], repeat=len(atoms)):
        asg = dict(zip(atoms, bits))
        if all(any(asg[a] == pos for a, pos in cl)
               for cl in c.literal_clauses()):
            return asg
    return None


_atom_ids = st.integers(min_value=0, max_value=5).map(lambda i: f"v{i}")
_literals = st.tuples(_atom_ids, st.booleans())
_clauses = st.lists(_literals, min_size=1, max_size=3)
_clause_sets = st.lists(_clauses, min_size=0, max_size=12)
_krom_sets = st.lists(st.lists(_literals, min_size=1, max_size=2),
                      min_size=0, max_size=12)


def _build(cls):
    out = B.ClauseSet()
    for cl in cls:
        out.add_clause(cl)
    return out


class TestAgainstTruthTable:
    @settings(max_examples=300, deadline=None)
    @given(_clause_sets)
    def test_dpll_agrees_with_enumeration(self, cls):
        c = _build(cls)
        model = B.dpll_sat(c)
        brute = _truth_table_sat(c)
        if brute is None:
            assert model is UNSAT
        else:
            assert model is not UNSAT
            for clause in c.literal_clauses():
                assert any(model[a] == pos for a, pos in clause)

    @settings(max_examples=200, deadline=None)
    @given(_clause_sets)
    def test_kernels_agree(self, cls):
        c = _build(cls)
        assert (B.dpll_sat(c, kernel="pure")
                == B.dpll_sat(c.copy(), kernel=B.KERNEL))


class TestKromClose:
    def test_spec_resolvent(self):
        c = cs([("a", True), ("b", True)], [("b", False), ("c", True)])
        closed = B.krom_close(c)
        assert frozenset({("a", True), ("c", True)}) in {
            frozenset(cl) for cl in closed.literal_clauses()}

    def test_inconsistent(self):
        c = cs([("a", True)], [("a", False)])
        assert B.krom_close(c) is INCONSISTENT

    def test_rejects_wide_clauses(self):
        c = cs([("a", True), ("b", True), ("c", True)])
        with pytest.raises(ValueError):
            B.krom_close(c)

    def test_unit_subsumes_binary(self):
        c = cs([("a", True)], [("a", True), ("b", True)])
        closed = B.krom_close(c)
        assert closed.literal_clauses() == [frozenset({("a", True)})]

    @settings(max_examples=200, deadline=None)
    @given(_krom_sets)
    def test_closure_operator_laws(self, cls):
        c = _build(cls)
        closed = B.krom_close(c)
        if closed is INCONSISTENT:
            assert _truth_table_sat(c) is None
            return
        again = B.krom_close(closed)
        assert again == closed  # idempotent
        # extensive up to subsumption: every original clause is implied
        have = {frozenset(cl) for cl in closed.literal_clauses()}
        units = {next(iter(cl)) for cl in have if len(cl) == 1}
        for cl in c.literal_clauses():
            fs = frozenset(cl)
            assert fs in have or any(lit in fs for lit in units)

    @settings(max_examples=200, deadline=None)
    @given(_krom_sets)
    def test_closure_consistency_matches_sat(self, cls):
        c = _build(cls)
        sat = _truth_table_sat(c) is not None
        assert (B.krom_close(c) is not INCONSISTENT) == sat

    @settings(max_examples=100, deadline=None)
    @given(_krom_sets, _krom_sets)
    def test_monotone(self, xs, ys):
        small = _build(xs)
        big = _build(xs + ys)
        cs_small = B.krom_close(small)
        cs_big = B.krom_close(big)
        if cs_small is INCONSISTENT:
            assert cs_big is INCONSISTENT
        elif cs_big is not INCONSISTENT:
            units_big = {next(iter(cl)) for cl
                         in cs_big.literal_clauses() if len(cl) == 1}
            have_big = {frozenset(cl) for cl in cs_big.literal_clauses()}
            for cl in cs_small.literal_clauses():
                fs = frozenset(cl)
                assert fs in have_big or any(lit in fs for lit in units_big)


class TestKernelSelection:
    def test_a_kernel_is_active(self):
        assert B.KERNEL in ("pure", "compiled")

    def test_pure_always_importable(self):
        from stlogic.boolcore import _pure
        assert _pure.solve(1, [[1]], -1)[0] == _pure.SAT
