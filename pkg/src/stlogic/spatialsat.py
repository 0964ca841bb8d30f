"""Decision procedures for the pure spatial fragments.

rc_sat solves RC formulas by encoding bounded broom models into one
DPLL call: every universal atom guessed false gets its own broom whose
root carries the counterexample, and term values at roots reduce to
and/or combinations of the leaf values. s4u_sat covers full S4u (and
RCmax) by type elimination over Boolean-saturated subterm types.
RCC-8 and BRCC-8 go through their S4u translation into rc_sat.

SAT verdicts return the witness tt-model itself, already checked by
eval_formula; UNSAT and UNKNOWN are status sentinels.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from . import frames as F
from . import syntax as S
from ._status import BUDGET_EXCEEDED, UNKNOWN, UNSAT
from .boolcore import ClauseSet, dpll_sat


class FragmentError(ValueError):
    pass


@dataclass(frozen=True)
class BroomBudget:
    max_brooms: int
    max_leaves_per_broom: int

    @staticmethod
    def for_formula(f) -> "BroomBudget":
        n = S.metrics(f).length
        return BroomBudget(max_brooms=n, max_leaves_per_broom=2 * n)


def _flagify(f):
    """Propositional flags are universal atoms over a raw variable."""
    match f:
        case S.PropAtom(name):
            return S.All(S.Var(name))
        case S.Not(a):
            return S.Not(_flagify(a))
        case S.And(a, b):
            return S.And(_flagify(a), _flagify(b))
        case _:
            return f


def _skeleton(f, atoms: list):
    """Boolean skeleton over universal atoms; atoms list is appended to
    in first-occurrence order."""
    match f:
        case S.All(t):
            if t not in atoms:
                atoms.append(t)
            return ("atom", atoms.index(t))
        case S.TrueF():
            return ("const", True)
        case S.FalseF():
            return ("const", False)
        case S.Not(a):
            return ("not", _skeleton(a, atoms))
        case S.And(a, b):
            return ("and", _skeleton(a, atoms), _skeleton(b, atoms))
        case S.Rcc8Atom():
            raise FragmentError("expand RCC-8 atoms before spatial solving")
        case _:
            raise FragmentError(f"not a pure spatial formula: {f!r}")


class _Tseitin:
    """CNF builder over (tag, ...) atoms with structural gate sharing."""

    def __init__(self):
        self.cs = ClauseSet()
        self._memo: dict = {}
        self._n = 0
        self.true_lit = (("const",), True)
        self.cs.add_clause([self.true_lit])

    @staticmethod
    def neg(lit):
        atom, pos = lit
        return (atom, not pos)

    def atom(self, name):
        return (name, True)

    def lor(self, lits):
        lits = tuple(dict.fromkeys(lits))
        if not lits:
            return self.neg(self.true_lit)
        if len(lits) == 1:
            return lits[0]
        key = ("or", frozenset(lits))
        if key in self._memo:
            return self._memo[key]
        self._n += 1
        aux = (("aux", self._n), True)
        self.cs.add_clause([self.neg(aux)] + list(lits))
        for l in lits:
            self.cs.add_clause([aux, self.neg(l)])
        self._memo[key] = aux
        return aux

    def land(self, lits):
        return self.neg(self.lor([self.neg(l) for l in lits]))

    def add(self, lits):
        self.cs.add_clause(lits)


def _skeleton_lit(enc: _Tseitin, node, d_atoms):
    match node:
        case ("atom", k):
            return (d_atoms[k], True)
        case ("const", v):
            return enc.true_lit if v else enc.neg(enc.true_lit)
        case ("not", a):
            return enc.neg(_skeleton_lit(enc, a, d_atoms))
        case ("and", a, b):
            return enc.land([_skeleton_lit(enc, a, d_atoms),
                             _skeleton_lit(enc, b, d_atoms)])
    raise AssertionError(node)


def _term_vars(t, out: set):
    match t:
        case S.Var(name):
            out.add(name)
        case S.Comp(a) | S.Interior(a) | S.Closure(a):
            _term_vars(a, out)
        case S.Inter(a, b) | S.UnionT(a, b):
            _term_vars(a, out)
            _term_vars(b, out)
        case S.Top() | S.Bot():
            pass
        case _:
            raise FragmentError(f"temporal operator in spatial term: {t!r}")


def _count_ci_atoms(atoms) -> int:
    seen = set()

    def walk(t):
        match t:
            case S.Closure(S.Interior(_)):
                seen.add(t)
                walk(t.arg.arg)
            case S.Comp(a) | S.Interior(a) | S.Closure(a):
                walk(a)
            case S.Inter(a, b) | S.UnionT(a, b):
                walk(a)
                walk(b)
            case _:
                pass

    for t in atoms:
        walk(t)
    return len(seen)


def rc_sat(f, bounds: BroomBudget | None = None, budget: int | None = None):
    """Satisfiability of an RC formula over bounded unions of brooms.

    Returns the witness TTModel (Finite(1) flow) or UNSAT; may return
    BUDGET_EXCEEDED when a DPLL node budget is given. With the default
    bounds, UNSAT is definitive for the fragment.
    """
    prof = S.classify(f)
    if prof.term_temporal != "none" or prof.formula_temporal != "none":
        raise FragmentError("rc_sat handles purely spatial formulas")
    if not S.spatial_leq(prof.spatial_fragment, "RC"):
        raise FragmentError(
            f"formula classifies as {prof.spatial_fragment}, beyond RC")
    g = _flagify(f)
    atoms: list = []
    skel = _skeleton(g, atoms)
    if bounds is None:
        bounds = BroomBudget.for_formula(f)
    n_brooms = max(1, min(len(atoms), bounds.max_brooms))
    ci = _count_ci_atoms(atoms)
    n_leaves = max(1, min(bounds.max_leaves_per_broom, 2 * ci))

    enc = _Tseitin()
    val_memo: dict = {}

    def val(t, i, j):
        """Literal for membership of point j of broom i (None = root)
        in the extension of t."""
        key = (t, i, j)
        if key in val_memo:
            return val_memo[key]
        match t:
            case S.Var(name):
                out = enc.atom(("xr", name, i) if j is None
                               else ("x", name, i, j))
            case S.Top():
                out = enc.true_lit
            case S.Bot():
                out = enc.neg(enc.true_lit)
            case S.Comp(a):
                out = enc.neg(val(a, i, j))
            case S.Inter(a, b):
                out = enc.land([val(a, i, j), val(b, i, j)])
            case S.UnionT(a, b):
                out = enc.lor([val(a, i, j), val(b, i, j)])
            case S.Interior(a):
                if j is None:
                    out = enc.land([val(a, i, None)]
                                   + [val(a, i, l) for l in range(n_leaves)])
                else:
                    out = val(a, i, j)
            case S.Closure(a):
                if j is None:
                    out = enc.lor([val(a, i, None)]
                                  + [val(a, i, l) for l in range(n_leaves)])
                else:
                    out = val(a, i, j)
            case _:
                raise FragmentError(f"temporal operator in term: {t!r}")
        val_memo[key] = out
        return out

    d_atoms = [("d", k) for k in range(len(atoms))]
    enc.add([_skeleton_lit(enc, skel, d_atoms)])
    for k, t in enumerate(atoms):
        dk = (d_atoms[k], True)
        for i in range(n_brooms):
            for j in list(range(n_leaves)) + [None]:
                enc.add([enc.neg(dk), val(t, i, j)])
        # a false universal atom is witnessed at the root of its broom
        enc.add([dk, enc.neg(val(t, k % n_brooms, None))])

    model = dpll_sat(enc.cs, budget=budget)
    if model is BUDGET_EXCEEDED:
        return BUDGET_EXCEEDED
    if model is UNSAT:
        return UNSAT

    frame = F.disjoint_union([F.broom(n_leaves) for _ in range(n_brooms)])
    names: set = set()
    for t in atoms:
        _term_vars(t, names)
    valuation = {}
    for name in sorted(names):
        pts = set()
        for i in range(n_brooms):
            base = i * (n_leaves + 1)
            if model.get(("xr", name, i), False):
                pts.add(base)
            for j in range(n_leaves):
                if model.get(("x", name, i, j), False):
                    pts.add(base + 1 + j)
        valuation[name] = [pts]
    m = F.TTModel(F.Finite(1), frame, valuation)
    if not F.eval_formula(m, f, 0):
        raise AssertionError("internal error: rc witness failed evaluation")
    return m


# ------------------------------------------------------------ s4u types

def _closure_nodes(atoms) -> list:
    """All subterms of the universal atoms, smallest first."""
    seen: dict = {}

    def walk(t):
        if t in seen:
            return
        match t:
            case S.Var() | S.Top() | S.Bot():
                pass
            case S.Comp(a) | S.Interior(a) | S.Closure(a):
                walk(a)
            case S.Inter(a, b) | S.UnionT(a, b):
                walk(a)
                walk(b)
            case _:
                raise FragmentError(f"temporal operator in term: {t!r}")
        seen[t] = len(seen)

    for t in atoms:
        walk(t)
    return list(seen)


def s4u_sat(f, type_cap: int = 1 << 20, deadline: float | None = None):
    """Satisfiability of an arbitrary S4u formula by type elimination.

    Types are Boolean-saturated subsets of the subterm closure; the
    maximal quasi-order keeps interior terms persistent upward and
    closure terms persistent downward. Returns a witness TTModel,
    UNSAT, or UNKNOWN when the type space exceeds type_cap.
    """
    prof = S.classify(f)
    if prof.term_temporal != "none" or prof.formula_temporal != "none":
        raise FragmentError("s4u_sat handles purely spatial formulas")
    g = _flagify(f)
    atoms: list = []
    skel = _skeleton(g, atoms)
    if not atoms:
        ok = _eval_skeleton(skel, ())
        if not ok:
            return UNSAT
        m = F.TTModel(F.Finite(1), F.broom(1), {})
        return m

    nodes = _closure_nodes(atoms)
    idx = {t: i for i, t in enumerate(nodes)}
    free = [t for t in nodes
            if isinstance(t, (S.Var, S.Interior, S.Closure))]
    if 2 ** len(free) > type_cap:
        return UNKNOWN
    if len(atoms) > 24:
        return UNKNOWN

    i_nodes = [(idx[t], idx[t.arg]) for t in nodes if isinstance(t, S.Interior)]
    c_nodes = [(idx[t], idx[t.arg]) for t in nodes if isinstance(t, S.Closure)]

    types = []
    for bits in itertools.product((False, True), repeat=len(free)):
        fv = dict(zip(free, bits))
        row = [False] * len(nodes)
        ok = True
        for t in nodes:
            match t:
                case S.Var() | S.Interior() | S.Closure():
                    v = fv[t]
                case S.Top():
                    v = True
                case S.Bot():
                    v = False
                case S.Comp(a):
                    v = not row[idx[a]]
                case S.Inter(a, b):
                    v = row[idx[a]] and row[idx[b]]
                case S.UnionT(a, b):
                    v = row[idx[a]] or row[idx[b]]
            row[idx[t]] = v
        # local S4 axioms: It <= t and t <= Ct
        for it, at in i_nodes:
            if row[it] and not row[at]:
                ok = False
                break
        if ok:
            for ct, at in c_nodes:
                if row[at] and not row[ct]:
                    ok = False
                    break
        if ok:
            types.append(tuple(row))

    def related(t, u):
        for it, at in i_nodes:
            if t[it] and not (u[it] and u[at]):
                return False
        for ct, _ in c_nodes:
            if u[ct] and not t[ct]:
                return False
        return True

    atom_idx = [idx[t] for t in atoms]

    for assign in itertools.product((True, False), repeat=len(atoms)):
        if deadline is not None and time.monotonic() > deadline:
            return UNKNOWN
        if not _eval_skeleton(skel, assign):
            continue
        survivors = [t for t in types
                     if all(t[atom_idx[k]] for k, on in enumerate(assign) if on)]
        changed = True
        while changed:
            changed = False
            kept = []
            for t in survivors:
                ok = True
                for ct, at in c_nodes:
                    if t[ct] and not any(
                            u[at] and related(t, u) for u in survivors):
                        ok = False
                        break
                if ok:
                    for it, at in i_nodes:
                        if not t[it] and not any(
                                not u[at] and related(t, u) for u in survivors):
                            ok = False
                            break
                if ok:
                    kept.append(t)
                else:
                    changed = True
            survivors = kept
        if not survivors:
            continue
        if not all(any(not t[atom_idx[k]] for t in survivors)
                   for k, on in enumerate(assign) if not on):
            continue
        points = list(range(len(survivors)))
        order = [(i, j) for i in points for j in points
                 if i != j and related(survivors[i], survivors[j])]
        frame = F.Frame(points, order)
        names = sorted({t.name for t in nodes if isinstance(t, S.Var)})
        valuation = {name: [{i for i, t in enumerate(survivors)
                             if t[idx[S.Var(name)]]}]
                     for name in names}
        m = F.TTModel(F.Finite(1), frame, valuation)
        if not F.eval_formula(m, f, 0):
            raise AssertionError("internal error: s4u witness failed evaluation")
        return shrink_witness(m, f)
    return UNSAT


def shrink_witness(m: F.TTModel, f, point_cap: int = 64) -> F.TTModel:
    """Greedily drop points from a spatial witness while the formula
    stays true. Spatial formulas are point-independent, so truth is
    checked once per candidate. Models above point_cap are returned
    unshrunk."""
    pts = sorted(m.frame.points)
    if len(pts) > point_cap:
        return m
    rel = m.frame.rel
    val = {k: set(v[0]) for k, v in m.valuation.items()}

    def build(points):
        order = [(a, b) for (a, b) in rel
                 if a != b and a in points and b in points]
        return F.TTModel(F.Finite(1), F.Frame(list(points), order),
                         {k: [val[k] & set(points)] for k in val})

    changed = True
    while changed:
        changed = False
        for p in list(pts):
            if len(pts) == 1:
                break
            cand = [x for x in pts if x != p]
            m2 = build(cand)
            if F.eval_formula(m2, f, 0):
                pts = cand
                changed = True
    return build(pts)


def _eval_skeleton(node, assign) -> bool:
    match node:
        case ("atom", k):
            return assign[k]
        case ("const", v):
            return v
        case ("not", a):
            return not _eval_skeleton(a, assign)
        case ("and", a, b):
            return _eval_skeleton(a, assign) and _eval_skeleton(b, assign)
    raise AssertionError(node)


def rcmax_sat(f, type_cap: int = 1 << 20, deadline: float | None = None):
    """RCmax satisfiability; delegates to the S4u procedure."""
    prof = S.classify(f)
    if prof.term_temporal != "none" or prof.formula_temporal != "none":
        raise FragmentError("rcmax_sat handles purely spatial formulas")
    if not S.spatial_leq(prof.spatial_fragment, "RCmax"):
        raise FragmentError(
            f"formula classifies as {prof.spatial_fragment}, beyond RCmax")
    return s4u_sat(f, type_cap=type_cap, deadline=deadline)


def rcc8_brcc8_sat(f, bounds: BroomBudget | None = None,
                   budget: int | None = None):
    """RCC-8/BRCC-8 constraint satisfiability via the S4u translation."""
    _check_rcc8_shape(f)
    g = S.expand_rcc8(f)
    return rc_sat(g, bounds=bounds, budget=budget)


def _check_rcc8_shape(f) -> None:
    match f:
        case S.Rcc8Atom():
            return
        case S.TrueF() | S.FalseF():
            return
        case S.Not(a):
            _check_rcc8_shape(a)
        case S.And(a, b):
            _check_rcc8_shape(a)
            _check_rcc8_shape(b)
        case _:
            raise FragmentError(
                "rcc8_brcc8_sat expects a Boolean combination of RCC-8 atoms")
