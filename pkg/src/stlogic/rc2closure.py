"""Atomic RC2 formulas over forks: the Krom encoding, closure under
fork-consequence, the rule formula Gamma, and model completion.

RC2 formulas have width 2, so fork models (2-brooms) suffice. An
atomic formula is a universal union of two shape literals over region
variables; every such atom compiles to one or two-literal clauses over
atoms q_{p,i} = "CIp holds at leaf i", which makes consequence and
closure a Krom-resolution matter.

Shape kinds, per variable p (rho abbreviates CIp):
  sigma (regular closed): rho | comp int rho
  delta (regular open):   int rho | comp rho
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import syntax as S
from ._status import INCONSISTENT, UNSAT
from .boolcore import ClauseSet, dpll_sat, krom_close

KIND_RANK = {"rho": 0, "cirho": 1, "irho": 2, "crho": 3}
SIGMA_KINDS = ("rho", "cirho")
DELTA_KINDS = ("irho", "crho")
# shapes whose leaf value is q_{p,i} rather than its negation
POSITIVE_KINDS = ("rho", "irho")


@dataclass(frozen=True)
class Shape:
    kind: str
    var: str

    def __post_init__(self):
        if self.kind not in KIND_RANK:
            raise ValueError(f"unknown shape kind {self.kind!r}")

    @property
    def is_sigma(self) -> bool:
        return self.kind in SIGMA_KINDS

    def term(self):
        rho = S.Closure(S.Interior(S.Var(self.var)))
        match self.kind:
            case "rho":
                return rho
            case "cirho":
                return S.Comp(S.Interior(rho))
            case "irho":
                return S.Interior(rho)
            case "crho":
                return S.Comp(rho)

    def _key(self):
        return (self.var, KIND_RANK[self.kind])


def shape_of_term(t) -> Shape:
    match t:
        case S.Closure(S.Interior(S.Var(v))):
            return Shape("rho", v)
        case S.Comp(S.Interior(S.Closure(S.Interior(S.Var(v))))):
            return Shape("cirho", v)
        case S.Interior(S.Closure(S.Interior(S.Var(v)))):
            return Shape("irho", v)
        case S.Comp(S.Closure(S.Interior(S.Var(v)))):
            return Shape("crho", v)
    raise ValueError(f"not an atomic RC2 shape: {S.print_term(t)}")


@dataclass(frozen=True)
class AtFmAtom:
    """Universal union of two shapes, disjuncts in canonical order.
    Unary atoms are stored as the idempotent pair."""
    left: Shape
    right: Shape

    def __post_init__(self):
        if self.left._key() > self.right._key():
            l, r = self.left, self.right
            object.__setattr__(self, "left", r)
            object.__setattr__(self, "right", l)

    @staticmethod
    def of(a: Shape, b: Shape) -> "AtFmAtom":
        if a._key() <= b._key():
            return AtFmAtom(a, b)
        return AtFmAtom(b, a)

    @property
    def vars(self) -> frozenset:
        return frozenset({self.left.var, self.right.var})

    def formula(self):
        return S.All(S.UnionT(self.left.term(), self.right.term()))


def atom_from_formula(f) -> AtFmAtom:
    match f:
        case S.All(S.UnionT(a, b)):
            return AtFmAtom.of(shape_of_term(a), shape_of_term(b))
        case S.All(t):
            s = shape_of_term(t)
            return AtFmAtom(s, s)
    raise ValueError(f"not an atomic RC2 formula: {S.print_formula(f)}")


def _universal_atoms(omega) -> list:
    """Atoms true in every fork model; their clauses are all tautologies."""
    out = []
    for p in omega:
        out.append(AtFmAtom.of(Shape("rho", p), Shape("cirho", p)))
        out.append(AtFmAtom.of(Shape("rho", p), Shape("crho", p)))
        out.append(AtFmAtom.of(Shape("cirho", p), Shape("irho", p)))
    return out


def enumerate_atfm(omega) -> list:
    """All atomic formulas over the given variables, deduplicated, in a
    fixed order; at most 16 |omega|^2 of them."""
    omega = tuple(omega)
    if not omega:
        raise ValueError("empty variable set")
    shapes = [Shape(k, p) for p in sorted(set(omega))
              for k in KIND_RANK]
    seen = dict.fromkeys(AtFmAtom.of(a, b)
                         for a, b in itertools.product(shapes, shapes))
    out = sorted(seen, key=lambda a: (a.left._key(), a.right._key()))
    assert len(out) <= 16 * len(set(omega)) ** 2
    return out


def _leaf_lit(shape: Shape, i: int):
    return (("q", shape.var, i), shape.kind in POSITIVE_KINDS)


def krom_encode(atom: AtFmAtom) -> list:
    """Clauses over q_{p,i} equivalent to the atom on a single fork:
    same-index pairs unless both disjuncts are delta shapes, which also
    constrain the root through the cross-index pairs."""
    l, r = atom.left, atom.right
    if l.is_sigma or r.is_sigma:
        idx = [(1, 1), (2, 2)]
    else:
        idx = [(1, 1), (2, 2), (1, 2), (2, 1)]
    return [frozenset({_leaf_lit(l, i), _leaf_lit(r, j)}) for i, j in idx]


@dataclass(frozen=True)
class RegionAtomSet:
    omega: tuple
    atoms: frozenset
    status: str = "raw"

    def __post_init__(self):
        if self.status not in ("raw", "closed", "inconsistent"):
            raise ValueError(f"bad status {self.status!r}")
        for a in self.atoms:
            if not a.vars <= set(self.omega):
                raise ValueError("atom over a variable outside omega")


def region_atom_set(omega, atoms) -> RegionAtomSet:
    return RegionAtomSet(tuple(omega), frozenset(atoms))


def _encode_set(atoms) -> ClauseSet:
    cs = ClauseSet()
    for a in atoms:
        for c in krom_encode(a):
            cs.add_clause(c)
    return cs


def restrict(phi: RegionAtomSet, omega0) -> RegionAtomSet:
    """Restriction of a closed set to a subset of its variables.

    The restriction of a closed set is itself closed, so the result
    keeps the closed status without re-running the closure."""
    if phi.status != "closed":
        raise ValueError("restrict expects a closed atom set")
    omega0 = tuple(omega0)
    if not set(omega0) <= set(phi.omega):
        raise ValueError("omega0 must be a subset of omega")
    keep = frozenset(a for a in phi.atoms if a.vars <= set(omega0))
    return RegionAtomSet(omega0, keep, "closed")


def _entailed(closed_clauses, clause) -> bool:
    lits = set(clause)
    if any((a, not v) in lits for (a, v) in lits):
        return True
    return any(set(d) <= lits for d in closed_clauses)


def close_set(phi: RegionAtomSet) -> RegionAtomSet:
    """Fork-consequence closure, computed through the Krom encoding.

    Consequence over a single fork coincides with entailment between
    the clause translations, and Krom resolution with subsumption is
    consequence-complete, so an atom belongs to the closure exactly
    when each of its clauses is a tautology or is subsumed."""
    if phi.status != "raw":
        raise ValueError("close_set expects a raw atom set")
    closed = krom_close(_encode_set(phi.atoms))
    if closed is INCONSISTENT:
        return RegionAtomSet(phi.omega, phi.atoms, "inconsistent")
    clauses = closed.literal_clauses()
    out = [a for a in enumerate_atfm(phi.omega)
           if all(_entailed(clauses, c) for c in krom_encode(a))]
    return RegionAtomSet(phi.omega, frozenset(out), "closed")


def close_set_rules(phi: RegionAtomSet) -> RegionAtomSet:
    """The same closure by direct saturation of the inference rules:
    (sigma sigma), (sigma delta)_1, (sigma delta)_2, (delta delta),
    (bottom), the four shape equivalences, plus weakening from unary
    atoms and the universally true atoms as seeds. Kept as an
    independent route and tested equal to close_set."""
    if phi.status != "raw":
        raise ValueError("close_set_rules expects a raw atom set")
    omega = sorted({v for a in phi.atoms for v in a.vars} | set(phi.omega))
    shapes = [Shape(k, p) for p in omega for k in KIND_RANK]
    atoms = set(phi.atoms) | set(_universal_atoms(omega))
    swap = {"rho": "irho", "irho": "rho", "crho": "cirho", "cirho": "crho"}

    def canon(a, b):
        return AtFmAtom.of(a, b)

    changed = True
    while changed:
        changed = False
        new = set()

        def emit(a):
            if a not in atoms:
                new.add(a)

        for a in atoms:
            # unary equivalences swap both copies at once
            if a.left == a.right:
                emit(canon(Shape(swap[a.left.kind], a.left.var),
                           Shape(swap[a.left.kind], a.left.var)))
                for z in shapes:
                    # weakening from a unary atom
                    emit(canon(a.left, z))
            pairs = [(a.left, a.right), (a.right, a.left)]
            for x, y in pairs:
                # equivalences with a sigma partner
                if y.is_sigma:
                    emit(canon(Shape(swap[x.kind], x.var), y))
                # (sigma delta)_1 and (sigma delta)_2
                if x.kind == "irho" and not y.is_sigma:
                    emit(canon(Shape("rho", x.var), y))
                if x.kind == "crho" and not y.is_sigma:
                    emit(canon(Shape("cirho", x.var), y))
        for a, b in itertools.product(atoms, atoms):
            for (s1, x) in ((a.left, a.right), (a.right, a.left)):
                for (y, s2) in ((b.left, b.right), (b.right, b.left)):
                    # (sigma sigma): resolve rho p against comp int rho p
                    if (x.kind == "rho" and y.kind == "cirho"
                            and x.var == y.var and s1.is_sigma
                            and s2.is_sigma):
                        emit(canon(s1, s2))
                    # (delta delta) in its three theta configurations
                    if (not s1.is_sigma and not s2.is_sigma
                            and x.var == y.var
                            and (x.kind, y.kind) in (("crho", "irho"),
                                                     ("rho", "crho"),
                                                     ("cirho", "irho"))):
                        emit(canon(s1, s2))
        if new - atoms:
            atoms |= new
            changed = True

    for p in omega:
        bot_l = AtFmAtom.of(Shape("rho", p), Shape("rho", p))
        bot_r = AtFmAtom.of(Shape("crho", p), Shape("crho", p))
        if bot_l in atoms and bot_r in atoms:
            return RegionAtomSet(phi.omega, phi.atoms, "inconsistent")
    return RegionAtomSet(phi.omega, frozenset(atoms), "closed")


def gamma_of(omega):
    """Propositional formula over atoms at0, at1, ... (indexed by the
    enumerate_atfm order) whose models are exactly the closed
    satisfiable subsets of the atomic universe."""
    omega = tuple(sorted(set(omega)))
    universe = enumerate_atfm(omega)
    index = {a: k for k, a in enumerate(universe)}

    def at(a: AtFmAtom):
        return S.PropAtom(f"at{index[a]}")

    shapes = [Shape(k, p) for p in omega for k in KIND_RANK]
    sigmas = [s for s in shapes if s.is_sigma]
    deltas = [s for s in shapes if not s.is_sigma]
    conjuncts: dict = {}

    def add(f):
        conjuncts.setdefault(f)

    def implies(premises, concl):
        body = premises[0]
        for p in premises[1:]:
            body = S.And(body, p)
        add(S.Implies(body, concl))

    for a in _universal_atoms(omega):
        add(at(a))
    for p in omega:
        rho, irho = Shape("rho", p), Shape("irho", p)
        crho, cirho = Shape("crho", p), Shape("cirho", p)
        # equivalences, unary and with a sigma partner
        for x, y in ((rho, irho), (crho, cirho)):
            add(S.Implies(at(AtFmAtom.of(x, x)), at(AtFmAtom.of(y, y))))
            add(S.Implies(at(AtFmAtom.of(y, y)), at(AtFmAtom.of(x, x))))
            for s1 in sigmas:
                add(S.Implies(at(AtFmAtom.of(x, s1)), at(AtFmAtom.of(y, s1))))
                add(S.Implies(at(AtFmAtom.of(y, s1)), at(AtFmAtom.of(x, s1))))
        # (sigma sigma)
        for s1, s2 in itertools.product(sigmas, sigmas):
            implies([at(AtFmAtom.of(s1, rho)), at(AtFmAtom.of(cirho, s2))],
                    at(AtFmAtom.of(s1, s2)))
        # (sigma delta)_1 and (sigma delta)_2
        for d1 in deltas:
            implies([at(AtFmAtom.of(irho, d1))], at(AtFmAtom.of(rho, d1)))
            implies([at(AtFmAtom.of(crho, d1))], at(AtFmAtom.of(cirho, d1)))
        # (delta delta)
        for d1, d2 in itertools.product(deltas, deltas):
            for theta, theta2 in ((crho, irho), (rho, crho), (cirho, irho)):
                implies([at(AtFmAtom.of(d1, theta)),
                         at(AtFmAtom.of(theta2, d2))],
                        at(AtFmAtom.of(d1, d2)))
        # (bottom)
        add(S.Not(S.And(at(AtFmAtom.of(rho, rho)),
                        at(AtFmAtom.of(crho, crho)))))
    # weakening from unary atoms
    for x in shapes:
        for y in shapes:
            implies([at(AtFmAtom.of(x, x))], at(AtFmAtom.of(x, y)))

    out = None
    for f in conjuncts:
        out = f if out is None else S.And(out, f)
    return out


@dataclass(frozen=True)
class ForkModel:
    """Valuation of CIp at the two leaves of a fork; root values derive
    (union of leaves for rho, intersection for int rho)."""
    omega: tuple
    leaf1: frozenset
    leaf2: frozenset

    def __post_init__(self):
        if not (self.leaf1 | self.leaf2) <= set(self.omega):
            raise ValueError("leaf valuation outside omega")

    def _shape_at_leaf(self, s: Shape, i: int) -> bool:
        inside = s.var in (self.leaf1 if i == 1 else self.leaf2)
        return inside if s.kind in POSITIVE_KINDS else not inside

    def _shape_at_root(self, s: Shape) -> bool:
        a, b = s.var in self.leaf1, s.var in self.leaf2
        match s.kind:
            case "rho":
                return a or b
            case "irho":
                return a and b
            case "crho":
                return not (a or b)
            case "cirho":
                return not (a and b)

    def satisfies(self, atom: AtFmAtom) -> bool:
        l, r = atom.left, atom.right
        return ((self._shape_at_leaf(l, 1) or self._shape_at_leaf(r, 1))
                and (self._shape_at_leaf(l, 2) or self._shape_at_leaf(r, 2))
                and (self._shape_at_root(l) or self._shape_at_root(r)))

    def equivalent(self, other: "ForkModel", omega0) -> bool:
        o = set(omega0)
        return (self.leaf1 & o == other.leaf1 & o
                and self.leaf2 & o == other.leaf2 & o)


def fork_models_of(phi: RegionAtomSet) -> list:
    """All fork models satisfying every atom; empty exactly when the
    set is inconsistent."""
    if phi.status == "raw":
        raise ValueError("close the set first")
    if len(phi.omega) > 12:
        raise ValueError("omega too large to enumerate fork models")
    if phi.status == "inconsistent":
        return []
    out = []
    omega = tuple(phi.omega)
    for combo in itertools.product(((False, False), (False, True),
                                    (True, False), (True, True)),
                                   repeat=len(omega)):
        m = ForkModel(omega,
                      frozenset(p for p, (a, _) in zip(omega, combo) if a),
                      frozenset(p for p, (_, b) in zip(omega, combo) if b))
        if all(m.satisfies(a) for a in phi.atoms):
            out.append(m)
    return out


def complete_model(phi: RegionAtomSet, omega0, m0: ForkModel) -> ForkModel:
    """Extend a fork model of the omega0-restriction of a closed set to
    a fork model of the whole set, agreeing on omega0."""
    if phi.status != "closed":
        raise ValueError("complete_model expects a closed set")
    omega0 = tuple(omega0)
    if not set(omega0) <= set(phi.omega):
        raise ValueError("omega0 not a subset of omega")
    phi0 = [a for a in phi.atoms if a.vars <= set(omega0)]
    if not all(m0.satisfies(a) for a in phi0):
        raise ValueError("m0 does not satisfy the omega0-restriction")
    cs = _encode_set(phi.atoms)
    for p in omega0:
        cs.add_clause([(("q", p, 1), p in m0.leaf1)])
        cs.add_clause([(("q", p, 2), p in m0.leaf2)])
    model = dpll_sat(cs)
    if model is UNSAT:
        raise AssertionError("internal error: completion must exist")
    return ForkModel(
        tuple(phi.omega),
        frozenset(p for p in phi.omega if model.get(("q", p, 1), False)),
        frozenset(p for p in phi.omega if model.get(("q", p, 2), False)))
