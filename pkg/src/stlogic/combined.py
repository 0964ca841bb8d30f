"""Temporal formulas over spatial states.

Two pipelines share one shape: pull the spatial content out of the
formula, run the propositional temporal solver with the spatial side
folded back in as state and edge constraints, and return a witness an
independent checker can replay.

ptl_s4u_sat handles formulas whose terms are constant in time. Every
spatial subformula becomes a fresh atom and a per-state filter keeps
only atom assignments whose conjunction of spatial literals has a
model; SAT comes with the trace plus one finite spatial model per
distinct assignment.

ptl_rc2_sat handles the closed-set fragment where region terms may
step through time (Xt under the region wrappers, which covers the
RCC-8 surface). Term-level next is compiled away with primed
variables, the remainder is starred into pure temporal logic over the
atomic-formula universe, and the solver runs over pairs of (atom
assignment, closed-set handoff) with closure feasibility checks on
states and edges. SAT verdicts carry a certificate made of closed
atom sets and fork models; certify replays it from scratch and
rebuild_model turns it back into a concrete spatio-temporal model.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import frames as F
from . import rc2closure as R
from . import syntax as S
from ._status import BUDGET_EXCEEDED, UNKNOWN, UNSAT
from .spatialsat import FragmentError, s4u_sat
from .temporalsat import Trace, ptl_sat, validate_trace


# ------------------------------------------------------------ tree walks

def _map_leaves(f, leaf):
    """Rebuild a formula bottom-up, sending every non-connective leaf
    (atoms and constants) through leaf()."""
    match f:
        case S.Not(a):
            return S.Not(_map_leaves(a, leaf))
        case S.And(a, b):
            return S.And(_map_leaves(a, leaf), _map_leaves(b, leaf))
        case S.UntilF(a, b):
            return S.UntilF(_map_leaves(a, leaf), _map_leaves(b, leaf))
        case S.SinceF(a, b):
            return S.SinceF(_map_leaves(a, leaf), _map_leaves(b, leaf))
        case S.NextF(a):
            return S.NextF(_map_leaves(a, leaf))
        case S.DiamFF(a):
            return S.DiamFF(_map_leaves(a, leaf))
        case S.BoxFF(a):
            return S.BoxFF(_map_leaves(a, leaf))
        case S.DiamPF(a):
            return S.DiamPF(_map_leaves(a, leaf))
        case S.BoxPF(a):
            return S.BoxPF(_map_leaves(a, leaf))
    return leaf(f)


def _formula_leaves(f):
    match f:
        case (S.Not(a) | S.NextF(a) | S.DiamFF(a) | S.BoxFF(a)
              | S.DiamPF(a) | S.BoxPF(a)):
            yield from _formula_leaves(a)
        case S.And(a, b) | S.UntilF(a, b) | S.SinceF(a, b):
            yield from _formula_leaves(a)
            yield from _formula_leaves(b)
        case _:
            yield f


def _map_term(t, fn):
    """Rebuild a term bottom-up, sending every node through fn after
    its children were rebuilt. Term-level until/since and the derived
    term modalities are outside the next-only pipeline."""
    match t:
        case S.Var() | S.Top() | S.Bot():
            out = t
        case S.Comp(a):
            out = S.Comp(_map_term(a, fn))
        case S.Interior(a):
            out = S.Interior(_map_term(a, fn))
        case S.Closure(a):
            out = S.Closure(_map_term(a, fn))
        case S.NextT(a):
            out = S.NextT(_map_term(a, fn))
        case S.Inter(a, b):
            out = S.Inter(_map_term(a, fn), _map_term(b, fn))
        case S.UnionT(a, b):
            out = S.UnionT(_map_term(a, fn), _map_term(b, fn))
        case _:
            raise FragmentError(
                f"term operator outside the next-only fragment: "
                f"{S.print_term(t)}")
    return fn(out)


def _term_has_next(t) -> bool:
    found = [False]

    def spot(x):
        if isinstance(x, S.NextT):
            found[0] = True
        return x

    _map_term(t, spot)
    return found[0]


# ------------------------------------------------- constant-term pipeline

@dataclass(frozen=True)
class Abstraction:
    """Propositional skeleton plus the map from fresh atoms back to
    the spatial subformulas they replaced; restore() undoes the
    substitution exactly."""
    skeleton: S.Formula
    atom_map: dict

    def restore(self) -> S.Formula:
        def leaf(x):
            if isinstance(x, S.PropAtom) and x.name in self.atom_map:
                return self.atom_map[x.name]
            return x
        return _map_leaves(self.skeleton, leaf)


def abstract_spatial(f: S.Formula) -> Abstraction:
    """Replace every maximal spatial subformula by a fresh atom.
    RCC-8 sugar is expanded first; terms must be constant in time."""
    g = S.expand_rcc8(f)
    prof = S.classify(g)
    if prof.term_temporal != "none":
        raise FragmentError(
            "terms must stay constant in time here; found a temporal "
            "operator inside a term")
    taken = {x.name for x in _formula_leaves(g) if isinstance(x, S.PropAtom)}
    atom_map: dict = {}
    seen: dict = {}
    counter = itertools.count()

    def fresh() -> str:
        while True:
            n = f"s{next(counter)}"
            if n not in taken:
                taken.add(n)
                return n

    def leaf(x):
        if isinstance(x, S.All):
            if x not in seen:
                name = fresh()
                seen[x] = name
                atom_map[name] = x
            return S.PropAtom(seen[x])
        return x

    return Abstraction(_map_leaves(g, leaf), atom_map)


@dataclass(frozen=True)
class S4uTemporalWitness:
    """Trace over the spatial skeleton plus one finite spatial model
    per distinct spatial-atom assignment the trace uses."""
    trace: Trace
    abstraction: Abstraction
    spatial_models: dict

    def assignment_at(self, w: int) -> frozenset:
        slots = list(F.represented_instants(self.trace.flow))
        st = self.trace.states[slots.index(w)]
        return frozenset(n for n in st if n in self.abstraction.atom_map)

    def model_at(self, w: int) -> F.TTModel:
        return self.spatial_models[self.assignment_at(w)]


def ptl_s4u_sat(f: S.Formula, flow="nat", budget=None, type_cap=1 << 20):
    """Satisfiability of a temporal formula over constant-in-time
    spatial states. SAT returns a witness; UNSAT is definitive unless
    the spatial solver hit its cap on some assignment along the way,
    in which case UNKNOWN."""
    ab = abstract_spatial(f)
    spatial = frozenset(ab.atom_map)
    memo: dict = {}
    capped = [False]

    def spatial_ok(assign) -> bool:
        key = assign & spatial
        if key not in memo:
            lits = [ab.atom_map[n] if n in key else S.Not(ab.atom_map[n])
                    for n in ab.atom_map]
            v = s4u_sat(S.conj(lits), type_cap=type_cap)
            if v is UNKNOWN:
                capped[0] = True
                v = None
            elif v is UNSAT:
                v = None
            memo[key] = v
        return memo[key] is not None

    res = ptl_sat(ab.skeleton, flow=flow, budget=budget,
                  state_filter=spatial_ok)
    if res is BUDGET_EXCEEDED:
        return BUDGET_EXCEEDED
    if res is UNSAT:
        return UNKNOWN if capped[0] else UNSAT
    models = {}
    for st in res.states:
        key = st & spatial
        models[key] = memo[key]
    return S4uTemporalWitness(res, ab, models)


# --------------------------------------------- stepping-term compilation

@dataclass(frozen=True)
class NextElimination:
    """Term-level next compiled away: psi no longer steps any term,
    omega_phi maps each variable that fed a next to its fresh primed
    stand-in, and guards force each stand-in to hold now exactly the
    region its base variable holds one instant later."""
    psi: S.Formula
    omega_phi: dict
    guards: tuple

    @property
    def formula(self) -> S.Formula:
        return S.conj([self.psi, *self.guards])


_COMP_KIND = {"rho": "crho", "crho": "rho", "irho": "cirho", "cirho": "irho"}


def _rc2_normalize(f) -> S.Formula:
    """Rewrite every universal atom into two-shape normal form:
    complements pushed onto the four atomic shapes (whose complements
    are again shapes), meets split into conjunctions of atoms, joins
    capped at two shapes. The RCC-8 expansions all land inside."""

    def clauses(t, neg):
        # meet of joins over shapes; [] is true, a frozenset() clause
        # is false, and the join product handles both constants
        match t:
            case S.Comp(a):
                return clauses(a, not neg)
            case S.Top():
                return [frozenset()] if neg else []
            case S.Bot():
                return [] if neg else [frozenset()]
            case S.Inter(a, b) if not neg:
                return clauses(a, False) + clauses(b, False)
            case S.Inter(a, b):
                return [x | y for x in clauses(a, True)
                        for y in clauses(b, True)]
            case S.UnionT(a, b) if not neg:
                return [x | y for x in clauses(a, False)
                        for y in clauses(b, False)]
            case S.UnionT(a, b):
                return clauses(a, True) + clauses(b, True)
        try:
            s = R.shape_of_term(t)
        except ValueError as e:
            raise FragmentError(str(e)) from None
        if neg:
            s = R.Shape(_COMP_KIND[s.kind], s.var)
        return [frozenset({s})]

    def atomize(clause) -> S.Formula:
        shapes = sorted(clause, key=lambda s: s._key())
        if not shapes:
            return S.FalseF()
        if len(shapes) == 1:
            return R.AtFmAtom(shapes[0], shapes[0]).formula()
        if len(shapes) == 2:
            return R.AtFmAtom.of(shapes[0], shapes[1]).formula()
        raise FragmentError(
            "universal atom joins more than two shapes: "
            + " | ".join(S.print_term(s.term()) for s in shapes))

    def leaf(x):
        if isinstance(x, S.All):
            return S.conj([atomize(cl) for cl in clauses(x.term, False)])
        return x

    return _map_leaves(f, leaf)


def eliminate_term_next(f: S.Formula) -> NextElimination:
    g = S.expand_rcc8(f)
    for leaf in _formula_leaves(g):
        if isinstance(leaf, S.PropAtom):
            raise FragmentError(
                "plain propositional atoms are not part of this fragment; "
                "write 'all p' for a propositional flag p")
    taken = set()

    def record(x):
        if isinstance(x, S.Var):
            taken.add(x.name)
        return x

    for leaf in _formula_leaves(g):
        if isinstance(leaf, S.All):
            _map_term(leaf.term, record)

    omega_phi: dict = {}

    def fresh(p: str) -> str:
        c = p + "'"
        while c in taken:
            c += "'"
        taken.add(c)
        return c

    def step(t):
        match t:
            case S.Closure(S.Interior(S.NextT(
                    S.Closure(S.Interior(S.Var(p)))))):
                if p not in omega_phi:
                    omega_phi[p] = fresh(p)
                return S.CI(S.Var(omega_phi[p]))
        return t

    def leaf(x):
        if isinstance(x, S.All):
            return S.All(_map_term(x.term, step))
        return x

    psi = _map_leaves(g, leaf)
    for lf in _formula_leaves(psi):
        if isinstance(lf, S.All) and _term_has_next(lf.term):
            raise FragmentError(
                "term-level next must sit directly on a region "
                f"(written Xt): {S.print_formula(lf)}")
    psi = _rc2_normalize(psi)

    guards = []
    for p, pp in omega_phi.items():
        stepped = S.CI(S.NextT(S.CI(S.Var(p))))
        alias = S.CI(S.Var(pp))
        same = S.And(S.All(S.UnionT(S.Comp(stepped), alias)),
                     S.All(S.UnionT(stepped, S.Comp(alias))))
        guards.append(S.BoxPPlus(S.BoxFPlus(
            S.Implies(S.NextF(S.TrueF()), same))))
    return NextElimination(psi, omega_phi, tuple(guards))


def _omega_of(ne: NextElimination) -> tuple:
    vs = set()
    for leaf in _formula_leaves(ne.psi):
        if isinstance(leaf, S.All):
            vs |= R.atom_from_formula(leaf).vars
    vs |= set(ne.omega_phi) | set(ne.omega_phi.values())
    return tuple(sorted(vs))


def _atom_names(omega):
    """Shared naming with the closed-set axioms: atom k of the
    enumeration is the propositional variable at{k}."""
    universe = R.enumerate_atfm(tuple(omega)) if omega else []
    return universe, {a: f"at{k}" for k, a in enumerate(universe)}


def _star(psi, names) -> S.Formula:
    def leaf(x):
        if isinstance(x, S.All):
            return S.PropAtom(names[R.atom_from_formula(x)])
        if isinstance(x, (S.TrueF, S.FalseF)):
            return x
        raise FragmentError(
            f"unexpected atom in the closed-set pipeline: "
            f"{S.print_formula(x)}")
    return _map_leaves(psi, leaf)


def _rename_atom(a: R.AtFmAtom, mapping: dict) -> R.AtFmAtom:
    return R.AtFmAtom.of(
        R.Shape(a.left.kind, mapping.get(a.left.var, a.left.var)),
        R.Shape(a.right.kind, mapping.get(a.right.var, a.right.var)))


def build_bullet(ne: NextElimination) -> S.Formula:
    """Purely temporal companion: the starred remainder, the
    closed-set axioms boxed over the whole flow, and the handoff
    conjunct tying next-instant base atoms to primed atoms now."""
    omega = _omega_of(ne)
    universe, names = _atom_names(omega)
    parts = [_star(ne.psi, names)]
    if omega:
        parts.append(S.BoxPPlus(S.BoxFPlus(R.gamma_of(omega))))
    if ne.omega_phi:
        prime = dict(ne.omega_phi)
        hand = []
        for a in R.enumerate_atfm(tuple(ne.omega_phi)):
            pa = S.PropAtom(names[a])
            pap = S.PropAtom(names[_rename_atom(a, prime)])
            hand.append(S.And(S.Implies(S.NextF(pa), pap),
                              S.Implies(pap, S.NextF(pa))))
        parts.append(S.BoxPPlus(S.BoxFPlus(
            S.Implies(S.NextF(S.TrueF()), S.conj(hand)))))
    return S.conj(parts)


# ------------------------------------------------ closed-set satisfiability

_THEORY_CACHE: dict = {}


def closed_theories(omega) -> list:
    """Every closed satisfiable subset of the atomic universe over
    omega, each one the theory of some nonempty set of fork models.
    Enumerated over model subsets, so omega is capped at two
    variables (16 models, 65535 subsets)."""
    omega = tuple(sorted(set(omega)))
    if omega in _THEORY_CACHE:
        return _THEORY_CACHE[omega]
    if len(omega) > 2:
        raise FragmentError(
            "more than two stepped variables; the handoff alphabet "
            "would need 4^%d fork models per instant" % len(omega))
    universe = R.enumerate_atfm(omega)
    base = R.close_set(R.region_atom_set(omega, ()))
    models = R.fork_models_of(base)
    sat = []
    for m in models:
        mask = 0
        for k, a in enumerate(universe):
            if m.satisfies(a):
                mask |= 1 << k
        sat.append(mask)
    nm = len(models)
    th = [0] * (1 << nm)
    seenmasks = set()
    for mset in range(1, 1 << nm):
        low = (mset & -mset).bit_length() - 1
        rest = mset & (mset - 1)
        th[mset] = sat[low] if not rest else th[rest] & sat[low]
        seenmasks.add(th[mset])
    out = [frozenset(universe[k] for k in range(len(universe))
                     if mask >> k & 1)
           for mask in sorted(seenmasks)]
    _THEORY_CACHE[omega] = out
    return out


@dataclass(frozen=True)
class Rc2Certificate:
    """Replayable satisfiability witness: per represented instant a
    closed atom set and the fork models realizing it, plus the
    suitable-successor relation along every edge of the flow."""
    flow: F.FlowSpec
    eval_point: int
    atom_trace: tuple
    lambdas: tuple
    suitable: tuple


def _flow_edges(flow) -> list:
    """Successor edges between represented instants, wrap edges
    included."""
    n = len(list(F.represented_instants(flow)))
    edges = [(i, i + 1) for i in range(n - 1)]
    if isinstance(flow, F.Nat):
        edges.append((n - 1, flow.prefix))
    elif isinstance(flow, F.Int):
        edges.append((flow.left - 1, 0))
        edges.append((n - 1, flow.left + flow.core))
    return edges


def _suitable_pair(m: R.ForkModel, m2: R.ForkModel, omega_phi: dict) -> bool:
    # primed now == base next, leafwise
    for p, pp in omega_phi.items():
        if (pp in m.leaf1) != (p in m2.leaf1):
            return False
        if (pp in m.leaf2) != (p in m2.leaf2):
            return False
    return True


class _Feasibility:
    """Exactness checks behind the solver filters: a state or edge is
    kept iff some closed satisfiable set over the whole universe hits
    the positive formula atoms, misses the negative ones, and projects
    exactly onto the required handoff boxes. The minimal closure of
    the required atoms decides this: closures only grow with their
    seed, so any overshoot at the minimum rules every candidate out."""

    def __init__(self, ne: NextElimination):
        self.omega = _omega_of(ne)
        self.universe, self.names = _atom_names(self.omega)
        self.rev = {n: a for a, n in self.names.items()}
        fatoms = []
        for leaf in _formula_leaves(ne.psi):
            if isinstance(leaf, S.All):
                a = R.atom_from_formula(leaf)
                if a not in fatoms:
                    fatoms.append(a)
        self.fatoms = tuple(fatoms)
        self.fnames = frozenset(self.names[a] for a in fatoms)
        self.base_vars = tuple(ne.omega_phi)
        self.primed_vars = tuple(sorted(ne.omega_phi.values()))
        self.base_of = {v: k for k, v in ne.omega_phi.items()}
        bset, pset = set(self.base_vars), set(self.primed_vars)
        self.base_box = frozenset(a for a in self.universe
                                  if a.vars <= bset)
        self.prime_box = frozenset(a for a in self.universe
                                   if a.vars <= pset)
        if self.base_vars:
            self.alphabet = closed_theories(self.primed_vars)
            self.nbits = max(1, (len(self.alphabet) - 1).bit_length())
            self.ebits = [f"e{i}" for i in range(self.nbits)]
            self.unprimed = [frozenset(_rename_atom(a, self.base_of)
                                       for a in E)
                             for E in self.alphabet]
        else:
            self.alphabet = []
            self.nbits = 0
            self.ebits = []
            self.unprimed = []
        self._memo: dict = {}
        self._sigs: dict = {}
        # fork-model satisfaction bitmasks make fit a handful of int
        # ops; closed satisfiable sets are exactly the theories of
        # nonempty fork-model families, so this path and close_set
        # agree. past 4 variables the model table gets big, fall back.
        self._masks = None
        if len(self.omega) <= 4:
            subsets = [frozenset(c)
                       for r in range(len(self.omega) + 1)
                       for c in itertools.combinations(self.omega, r)]
            models = [R.ForkModel(tuple(self.omega), l1, l2)
                      for l1 in subsets for l2 in subsets]
            self._masks = {a: 0 for a in self.universe}
            for i, fm in enumerate(models):
                bit = 1 << i
                for a in self.universe:
                    if fm.satisfies(a):
                        self._masks[a] |= bit
            self._full = (1 << len(models)) - 1

    def decode(self, assign) -> int | None:
        k = 0
        for i, e in enumerate(self.ebits):
            if e in assign:
                k |= 1 << i
        return k if k < max(1, len(self.alphabet)) else None

    def positives(self, assign) -> frozenset:
        return frozenset(self.rev[n] for n in assign & self.fnames)

    def _sig(self, assign):
        s = self._sigs.get(assign)
        if s is None:
            s = (self.decode(assign), self.positives(assign))
            self._sigs[assign] = s
        return s

    def fit(self, din: int | None, assign):
        """Minimal closed set with the assignment's formula atoms, the
        handoff box of the assignment, and (when din names an incoming
        theory) an exact base box; None when no closed set fits."""
        eidx, pos = self._sig(assign)
        if eidx is None:
            return None
        return self._fit(din, pos, eidx)

    def _fit(self, din: int | None, pos: frozenset, eidx: int):
        key = (din, pos, eidx)
        if key in self._memo:
            return self._memo[key]
        seed = set(pos)
        if self.alphabet:
            seed |= self.alphabet[eidx]
        if din is not None:
            seed |= self.unprimed[din]
        if self._masks is not None:
            out = self._fit_masks(seed, pos, eidx, din)
            self._memo[key] = out
            return out
        closed = R.close_set(R.region_atom_set(self.omega, seed))
        out = closed
        if closed.status != "closed":
            out = None
        else:
            at = closed.atoms
            if any(self.rev[n] in at for n in self.fnames
                   if self.rev[n] not in pos):
                out = None
            elif self.alphabet and at & self.prime_box != self.alphabet[eidx]:
                out = None
            elif din is not None and at & self.base_box != self.unprimed[din]:
                out = None
        self._memo[key] = out
        return out

    def _fit_masks(self, seed, pos, eidx, din):
        mod = self._full
        for a in seed:
            mod &= self._masks[a]
            if not mod:
                return None
        masks = self._masks

        def holds(a) -> bool:
            return mod & ~masks[a] == 0

        for n in self.fnames:
            a = self.rev[n]
            if a not in pos and holds(a):
                return None
        if self.alphabet:
            want = self.alphabet[eidx]
            for a in self.prime_box:
                if holds(a) != (a in want):
                    return None
        if din is not None:
            want = self.unprimed[din]
            for a in self.base_box:
                if holds(a) != (a in want):
                    return None
        th = frozenset(a for a in self.universe if holds(a))
        return R.RegionAtomSet(tuple(self.omega), th, "closed")

    def state_ok(self, assign) -> bool:
        eidx, pos = self._sig(assign)
        if eidx is None:
            return False
        return self._fit(None, pos, eidx) is not None

    def edge_ok(self, a, b) -> bool:
        ea, _ = self._sig(a)
        if ea is None:
            return False
        eb, pb = self._sig(b)
        if eb is None:
            return False
        return self._fit(ea, pb, eb) is not None


def ptl_rc2_sat(f: S.Formula, flow="nat", budget=None):
    """Satisfiability of a closed-set formula whose regions may step
    through time, over the given flow. UNSAT is definitive; SAT
    returns an Rc2Certificate that certify() replays independently."""
    ne = eliminate_term_next(f)
    feas = _Feasibility(ne)
    psi_star = _star(ne.psi, feas.names)
    res = ptl_sat(psi_star, flow=flow, budget=budget,
                  state_filter=feas.state_ok,
                  transition_filter=feas.edge_ok if feas.base_vars else None,
                  extra_atoms=feas.ebits)
    if res is BUDGET_EXCEEDED or res is UNSAT:
        return res
    return _certificate(ne, feas, res)


def _certificate(ne: NextElimination, feas: _Feasibility,
                 tr: Trace) -> Rc2Certificate:
    fl = tr.flow
    coupled = bool(feas.base_vars)
    # Loop entries with two incoming edges would need one closed set
    # to project exactly onto two different handoff boxes; unrolling
    # one loop pass gives every represented instant a single demand.
    if coupled and isinstance(fl, F.Nat) and fl.prefix >= 1:
        cflow = F.Nat(fl.prefix + fl.loop, fl.loop)
        mapping = [i if i < fl.prefix + fl.loop else i - fl.loop
                   for i in range(fl.prefix + 2 * fl.loop)]
    elif coupled and isinstance(fl, F.Int):
        old_n = fl.left + fl.core + fl.right
        cflow = F.Int(fl.left, fl.core + fl.right, fl.right)
        mapping = [i if i < old_n else i - fl.right
                   for i in range(old_n + fl.right)]
    else:
        cflow = fl
        mapping = list(range(len(tr.states)))

    incoming: dict = {}
    for u, v in _flow_edges(cflow):
        incoming.setdefault(v, u)

    atom_trace = []
    lambdas = []
    for j, old in enumerate(mapping):
        assign = tr.states[old]
        din = None
        if coupled and j in incoming:
            src = tr.states[mapping[incoming[j]]]
            din = feas.decode(src)
        closed = feas.fit(din, assign)
        assert closed is not None, \
            "internal error: solver state lost feasibility in replay"
        atom_trace.append(closed)
        lam = tuple(R.fork_models_of(closed))
        assert lam, "internal error: closed satisfiable set has no models"
        lambdas.append(lam)

    suitable = []
    for u, v in _flow_edges(cflow):
        pairs = tuple((i, j)
                      for i, m in enumerate(lambdas[u])
                      for j, m2 in enumerate(lambdas[v])
                      if _suitable_pair(m, m2, ne.omega_phi))
        suitable.append((u, v, pairs))
    return Rc2Certificate(cflow, tr.eval_point, tuple(atom_trace),
                          tuple(lambdas), tuple(suitable))


# ------------------------------------------------------------- replaying

def certify(c: Rc2Certificate, ne: NextElimination) -> list:
    """Replay a certificate from scratch. Returns the list of
    violations, empty when the certificate is good: every atom set
    closed and consistent, fork-model families exactly the models of
    their sets and totally connected by the suitable relation along
    every edge, handoff boxes matching across each step, and the atom
    trace satisfying the starred remainder."""
    out = []
    omega = _omega_of(ne)
    universe, names = _atom_names(omega)
    n = len(list(F.represented_instants(c.flow)))
    if len(c.atom_trace) != n or len(c.lambdas) != n:
        return [f"layout mismatch: flow represents {n} instants, "
                f"certificate carries {len(c.atom_trace)}"]
    for w, phi in enumerate(c.atom_trace):
        if tuple(phi.omega) != omega:
            return [f"instant {w}: atom set ranges over "
                    f"{tuple(phi.omega)}, expected {omega}"]
    redone = []
    for w, phi in enumerate(c.atom_trace):
        redo = R.close_set(R.region_atom_set(omega, phi.atoms))
        redone.append(redo)
        if redo.status != "closed":
            out.append(f"instant {w}: atom set is inconsistent")
        elif redo.atoms != phi.atoms:
            out.append(f"instant {w}: atom set is not closed")
        lam = tuple(R.fork_models_of(redo)) if redo.status == "closed" else ()
        if not c.lambdas[w]:
            out.append(f"instant {w}: empty fork-model family")
        elif set(c.lambdas[w]) != set(lam):
            out.append(f"instant {w}: fork models differ from the "
                       f"models of the atom set")
    edges = _flow_edges(c.flow)
    stored = {(u, v): pairs for u, v, pairs in c.suitable}
    if set(stored) != set(edges):
        out.append("suitable relation does not cover exactly the "
                   "flow's successor edges")
    bset = set(ne.omega_phi)
    pset = set(ne.omega_phi.values())
    base_box = frozenset(a for a in universe if a.vars <= bset)
    prime_box = frozenset(a for a in universe if a.vars <= pset)
    for u, v in edges:
        if (u, v) not in stored:
            continue
        lam_u, lam_v = c.lambdas[u], c.lambdas[v]
        good = {(i, j)
                for i, m in enumerate(lam_u)
                for j, m2 in enumerate(lam_v)
                if _suitable_pair(m, m2, ne.omega_phi)}
        if {tuple(p) for p in stored[(u, v)]} != good:
            out.append(f"edge {u}->{v}: stored suitable pairs differ "
                       f"from recomputation")
        if {i for i, _ in good} != set(range(len(lam_u))):
            out.append(f"edge {u}->{v}: some fork model has no "
                       f"suitable successor")
        if {j for _, j in good} != set(range(len(lam_v))):
            out.append(f"edge {u}->{v}: some fork model has no "
                       f"suitable predecessor")
        if ne.omega_phi:
            handed = frozenset(_rename_atom(a, {v2: k for k, v2
                                                in ne.omega_phi.items()})
                               for a in c.atom_trace[u].atoms & prime_box)
            taken = c.atom_trace[v].atoms & base_box
            if handed != taken:
                out.append(f"edge {u}->{v}: handoff boxes do not match")
    states = tuple(frozenset(names[a] for a in phi.atoms)
                   for phi in c.atom_trace)
    try:
        tr = Trace(c.flow, states, c.eval_point)
        if not validate_trace(tr, _star(ne.psi, names)):
            out.append("atom trace does not satisfy the temporal remainder")
    except ValueError as e:
        out.append(f"atom trace is not a valid trace: {e}")
    return out


def rebuild_model(c: Rc2Certificate, ne: NextElimination,
                  horizon: int | None = None):
    """Concrete spatio-temporal model from a certificate: one fork per
    run through the fork-model families, glued along the suitable
    relation. Finite flows rebuild exactly and the report confirms
    the whole compiled formula; the infinite flow rebuilds a window
    of `horizon` instants and reports which top-level conjuncts hold
    there. Returns (model, report)."""
    if isinstance(c.flow, F.Int):
        raise ValueError("rebuilding needs a left-bounded flow")
    if isinstance(c.flow, F.Finite):
        length = c.flow.length
        exact = True
    else:
        if horizon is None or horizon <= 0:
            raise ValueError("a positive horizon is required on the "
                             "infinite flow")
        length = max(horizon, c.eval_point + 1)
        exact = False

    def slot(w: int) -> int:
        if isinstance(c.flow, F.Finite) or w < c.flow.prefix + c.flow.loop:
            return w
        return c.flow.prefix + (w - c.flow.prefix) % c.flow.loop

    suit = {(u, v): set(map(tuple, pairs)) for u, v, pairs in c.suitable}

    def pairs_at(w: int) -> set:
        return suit[(slot(w), slot(w + 1))] if isinstance(c.flow, F.Nat) \
            else suit[(w, w + 1)]

    runs = set()
    for w0 in range(length):
        for i0 in range(len(c.lambdas[slot(w0)])):
            traj = [0] * length
            traj[w0] = i0
            ok = True
            for w in range(w0, length - 1):
                nxt = [j for i, j in pairs_at(w) if i == traj[w]]
                if not nxt:
                    ok = False
                    break
                traj[w + 1] = min(nxt)
            for w in range(w0, 0, -1):
                prv = [i for i, j in pairs_at(w - 1) if j == traj[w]]
                if not prv:
                    ok = False
                    break
                traj[w - 1] = min(prv)
            if ok:
                runs.add(tuple(traj))
    runs = sorted(runs)
    if not runs:
        raise ValueError("certificate admits no runs; certify it first")

    omega = _omega_of(ne)
    frame = F.disjoint_union([F.fork() for _ in runs])
    valuation: dict = {}
    for p in omega:
        per = []
        for w in range(length):
            pts = set()
            for r, traj in enumerate(runs):
                m = c.lambdas[slot(w)][traj[w]]
                root, l1, l2 = 3 * r, 3 * r + 1, 3 * r + 2
                if p in m.leaf1:
                    pts.add(l1)
                if p in m.leaf2:
                    pts.add(l2)
                if p in m.leaf1 or p in m.leaf2:
                    pts.add(root)
            per.append(frozenset(pts))
        valuation[p] = per
    model = F.TTModel(F.Finite(length), frame, valuation)
    g = ne.formula
    report = {
        "exact": exact,
        "instants": length,
        "runs": len(runs),
        "holds": F.eval_formula(model, g, c.eval_point),
        "conjuncts": {S.print_formula(cj): F.eval_formula(model, cj,
                                                          c.eval_point)
                      for cj in _top_conjuncts(g)},
    }
    return model, report


def _top_conjuncts(f):
    if isinstance(f, S.And):
        yield from _top_conjuncts(f.left)
        yield from _top_conjuncts(f.right)
    else:
        yield f


# ------------------------------------------------------------------ JSON

def certificate_to_json(c: Rc2Certificate) -> dict:
    omega = tuple(c.atom_trace[0].omega) if c.atom_trace else ()
    universe, names = _atom_names(omega)
    index = {a: k for k, a in enumerate(universe)}
    return {
        "flow": F.flow_to_json(c.flow),
        "eval_point": c.eval_point,
        "omega": list(omega),
        "atoms": [[S.print_formula(a.formula())
                   for a in sorted(phi.atoms, key=index.get)]
                  for phi in c.atom_trace],
        "forks": [[{"leaf1": sorted(m.leaf1), "leaf2": sorted(m.leaf2)}
                   for m in lam]
                  for lam in c.lambdas],
        "suitable": [{"from": u, "to": v, "pairs": [list(p) for p in pairs]}
                     for u, v, pairs in c.suitable],
    }


def certificate_from_json(d: dict) -> Rc2Certificate:
    flow = F.flow_from_json(d["flow"])
    omega = tuple(d["omega"])
    atom_trace = tuple(
        R.RegionAtomSet(omega,
                        frozenset(R.atom_from_formula(S.parse_formula(t))
                                  for t in row),
                        "closed")
        for row in d["atoms"])
    lambdas = tuple(
        tuple(R.ForkModel(omega, frozenset(m["leaf1"]), frozenset(m["leaf2"]))
              for m in lam)
        for lam in d["forks"])
    suitable = tuple((e["from"], e["to"],
                      tuple((int(i), int(j)) for i, j in e["pairs"]))
                     for e in d["suitable"])
    return Rc2Certificate(flow, int(d.get("eval_point", 0)),
                          atom_trace, lambdas, suitable)
