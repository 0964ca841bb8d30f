"""Propositional Until/Since satisfiability over discrete flows.

ptl_sat decides formulas whose atoms are plain propositional variables
over four flows: ultimately periodic naturals (prefix + loop), finite
strict orders of a given or of any length, and two-sided ultimately
periodic integers. The search works on Hintikka states: bit masks over
the atoms and the Until/Since subformulas of the strict-core rewrite,
with the one-step expansion laws as the transition relation. Loops must
fulfil their own eventualities (the self-fulfilling-set criterion);
over the integers the left loop plays the same role for Since.

Lasso ties are broken by shortest prefix, then shortest loop, then
state order. Over the integers the evaluation state is chosen to
minimise the distance back to a Since-fulfilling loop, then forward to
an Until-fulfilling one.

brute_force_sat enumerates whole traces within explicit bounds and
evaluates via the frames module; it is the independent oracle the
tests pit ptl_sat against.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from . import frames as F
from . import syntax as S
from ._status import BUDGET_EXCEEDED, UNKNOWN, UNSAT


class _BudgetHit(Exception):
    pass


class _Budget:
    __slots__ = ("left",)

    def __init__(self, n):
        self.left = n

    def spend(self, k: int):
        if self.left is None:
            return
        self.left -= k
        if self.left < 0:
            raise _BudgetHit


# ------------------------------------------------------------------ traces

@dataclass(frozen=True)
class Trace:
    """Purely propositional tt-model: one set of true atoms per
    represented instant, laid out exactly like the flow stores them."""
    flow: F.FlowSpec
    states: tuple
    eval_point: int = 0

    def __post_init__(self):
        states = tuple(frozenset(s) for s in self.states)
        object.__setattr__(self, "states", states)
        instants = list(F.represented_instants(self.flow))
        if len(states) != len(instants):
            raise ValueError(
                f"flow stores {len(instants)} instants, got {len(states)}")
        if self.eval_point not in instants:
            raise ValueError(
                f"eval point {self.eval_point} is not a represented instant")

    @property
    def atoms(self) -> tuple:
        return tuple(sorted(set().union(*self.states) if self.states else ()))


def trace_model(tr: Trace, atoms=()) -> F.TTModel:
    """The trace as a tt-model on a single reflexive point, atoms as
    variables covering the whole space when true. Extra atom names get
    the everywhere-false valuation the trace leaves implicit."""
    frame = F.discrete(1)
    val = {}
    for a in set(tr.atoms) | set(atoms):
        val[a] = [frozenset({0}) if a in s else frozenset() for s in tr.states]
    return F.TTModel(tr.flow, frame, val)


def _atom_formula(name: str):
    return S.PropAtom(name)


def _us_subformulas(g) -> list:
    out: dict = {}

    def walk(x):
        match x:
            case S.PropAtom() | S.TrueF() | S.FalseF():
                return
            case S.Not(a):
                walk(a)
            case S.And(a, b):
                walk(a)
                walk(b)
            case S.UntilF(a, b) | S.SinceF(a, b):
                out.setdefault(x)
                walk(a)
                walk(b)
            case _:
                raise ValueError(
                    "ptl_sat needs purely propositional atoms; found "
                    + S.print_formula(x))

    walk(g)
    return list(out)


def validate_trace(tr: Trace, f) -> bool:
    """Dedicated trace check: the formula must hold at the evaluation
    point, and every Until/Since subformula must obey its one-step
    expansion law at every represented instant, so each recorded
    obligation is genuinely discharged inside the trace."""
    m = trace_model(tr, _prop_atoms(f))
    g = S.normalize_formula(f)
    subs = _us_subformulas(g)
    if not F.eval_formula(m, f, tr.eval_point):
        return False
    for sub in subs:
        a, b = sub.left, sub.right
        for w in F.represented_instants(tr.flow):
            here = F.eval_formula(m, sub, w)
            if isinstance(sub, S.UntilF):
                if not m.has_successor(w):
                    if here:
                        return False
                    continue
                step = F.eval_formula(m, b, w + 1) or (
                    F.eval_formula(m, a, w + 1)
                    and F.eval_formula(m, sub, w + 1))
            else:
                if not m.has_predecessor(w):
                    if here:
                        return False
                    continue
                step = F.eval_formula(m, b, w - 1) or (
                    F.eval_formula(m, a, w - 1)
                    and F.eval_formula(m, sub, w - 1))
            if here != step:
                return False
    return True


def trace_to_json(tr: Trace) -> dict:
    return {
        "flow": F.flow_to_json(tr.flow),
        "states": [sorted(s) for s in tr.states],
        "eval_point": tr.eval_point,
    }


def trace_from_json(d: dict) -> Trace:
    return Trace(F.flow_from_json(d["flow"]),
                 tuple(frozenset(s) for s in d["states"]),
                 d.get("eval_point", 0))


# ---------------------------------------------------------- state system

class _System:
    """Hintikka-state machinery for one formula: bit layout, state
    truth evaluation, successor and predecessor enumeration."""

    def __init__(self, f, budget=None, state_filter=None,
                 transition_filter=None, extra_atoms=()):
        self.goal = S.normalize_formula(f)
        self.sf = state_filter
        self.tf = transition_filter
        subs = _us_subformulas(self.goal)
        names: dict = {}
        for n in extra_atoms:
            names.setdefault(n)

        def grab_atoms(x):
            match x:
                case S.PropAtom(n):
                    names.setdefault(n)
                case S.Not(a):
                    grab_atoms(a)
                case S.And(a, b) | S.UntilF(a, b) | S.SinceF(a, b):
                    grab_atoms(a)
                    grab_atoms(b)

        grab_atoms(self.goal)
        self.atoms = sorted(names)
        self.untils = [x for x in subs if isinstance(x, S.UntilF)]
        self.sinces = [x for x in subs if isinstance(x, S.SinceF)]
        self.na, self.nu, self.ns = (len(self.atoms), len(self.untils),
                                     len(self.sinces))
        self.idx: dict = {}
        for i, a in enumerate(self.atoms):
            self.idx[_atom_formula(a)] = i
        for i, u in enumerate(self.untils):
            self.idx[u] = self.na + i
        for i, s in enumerate(self.sinces):
            self.idx[s] = self.na + self.nu + i
        self.nbits = self.na + self.nu + self.ns
        self.budget = _Budget(budget)
        self._succ: dict = {}
        self._pred: dict = {}
        self._ubits: dict = {}
        self._ufuls: dict = {}
        self._sbits: dict = {}
        self._sfuls: dict = {}
        self._asn: dict = {}
        self._sok: dict = {}
        self._ugot: dict = {}
        self._sgot: dict = {}
        self._goodS: dict | None = None
        self._goodU: dict | None = None

    def assign(self, x: int) -> frozenset:
        if x not in self._asn:
            self._asn[x] = self.atoms_of(x)
        return self._asn[x]

    def state_ok(self, x: int) -> bool:
        if self.sf is None:
            return True
        if x not in self._sok:
            self._sok[x] = bool(self.sf(self.assign(x)))
        return self._sok[x]

    def edge_ok(self, a: int, b: int) -> bool:
        if self.tf is None:
            return True
        return bool(self.tf(self.assign(a), self.assign(b)))

    def truth(self, g, bits: int) -> bool:
        match g:
            case S.PropAtom() | S.UntilF() | S.SinceF():
                return bits >> self.idx[g] & 1 == 1
            case S.TrueF():
                return True
            case S.FalseF():
                return False
            case S.Not(a):
                return not self.truth(a, bits)
            case S.And(a, b):
                return self.truth(a, bits) and self.truth(b, bits)
        raise TypeError(f"not in the propositional core: {g!r}")

    # obligation/fulfilment masks over the until (resp. since) indices
    def ubits(self, x: int) -> int:
        if x not in self._ubits:
            self._ubits[x] = (x >> self.na) & ((1 << self.nu) - 1)
        return self._ubits[x]

    def ufuls(self, x: int) -> int:
        if x not in self._ufuls:
            m = 0
            for i, u in enumerate(self.untils):
                if self.truth(u.right, x):
                    m |= 1 << i
            self._ufuls[x] = m
        return self._ufuls[x]

    def sbits(self, x: int) -> int:
        if x not in self._sbits:
            self._sbits[x] = x >> (self.na + self.nu)
        return self._sbits[x]

    def sfuls(self, x: int) -> int:
        if x not in self._sfuls:
            m = 0
            for i, s in enumerate(self.sinces):
                if self.truth(s.right, x):
                    m |= 1 << i
            self._sfuls[x] = m
        return self._sfuls[x]

    # fulfil-or-continue masks: an edge a -> b is temporally consistent
    # iff ubits(a) == ugot(b) and sgot(a) == sbits(b)
    def ugot(self, x: int) -> int:
        if x not in self._ugot:
            m = 0
            for i, u in enumerate(self.untils):
                if self.truth(u.right, x) or (
                        self.truth(u.left, x) and x >> self.idx[u] & 1):
                    m |= 1 << i
            self._ugot[x] = m
        return self._ugot[x]

    def sgot(self, x: int) -> int:
        if x not in self._sgot:
            m = 0
            for i, s in enumerate(self.sinces):
                if self.truth(s.right, x) or (
                        self.truth(s.left, x) and x >> self.idx[s] & 1):
                    m |= 1 << i
            self._sgot[x] = m
        return self._sgot[x]

    def _good_groups(self):
        # with a state filter the surviving states are usually sparse;
        # enumerate them once and bucket by the consistency keys so
        # succs/preds only ever touch temporally consistent pairs
        if self._goodS is None:
            byS: dict = {}
            byU: dict = {}
            for x in range(1 << self.nbits):
                if self.state_ok(x):
                    byS.setdefault((self.sbits(x), self.ugot(x)),
                                   []).append(x)
                    byU.setdefault((self.ubits(x), self.sgot(x)),
                                   []).append(x)
            self._goodS, self._goodU = byS, byU
        return self._goodS, self._goodU

    def succs(self, a: int) -> tuple:
        if a in self._succ:
            return self._succ[a]
        if self.sf is not None and self.nbits <= 22:
            byS, _ = self._good_groups()
            cands = byS.get((self.sgot(a), self.ubits(a)), ())
            self.budget.spend(len(cands) + 1)
            out = [b for b in cands if self.edge_ok(a, b)]
            self._succ[a] = tuple(out)
            return self._succ[a]
        forced = self.sgot(a) << (self.na + self.nu)
        nfree = self.na + self.nu
        self.budget.spend(1 << nfree)
        out = []
        for c in range(1 << nfree):
            b = c | forced
            if self.ugot(b) == self.ubits(a) and self.state_ok(b) \
                    and self.edge_ok(a, b):
                out.append(b)
        self._succ[a] = tuple(out)
        return self._succ[a]

    def preds(self, b: int) -> tuple:
        if b in self._pred:
            return self._pred[b]
        if self.sf is not None and self.nbits <= 22:
            _, byU = self._good_groups()
            cands = byU.get((self.ugot(b), self.sbits(b)), ())
            self.budget.spend(len(cands) + 1)
            out = [a for a in cands if self.edge_ok(a, b)]
            self._pred[b] = tuple(out)
            return self._pred[b]
        forced = self.ugot(b) << self.na
        self.budget.spend(1 << (self.na + self.ns))
        out = []
        for c in range(1 << (self.na + self.ns)):
            a = (c & ((1 << self.na) - 1)) | forced | (
                (c >> self.na) << (self.na + self.nu))
            if self.sgot(a) == self.sbits(b) and self.state_ok(a) \
                    and self.edge_ok(a, b):
                out.append(a)
        self._pred[b] = tuple(out)
        return self._pred[b]

    def atoms_of(self, x: int) -> frozenset:
        return frozenset(a for i, a in enumerate(self.atoms) if x >> i & 1)


# --------------------------------------------------------- cycle search

def _sccs(nodes, succ_fn):
    nodes = set(nodes)
    index: dict = {}
    low: dict = {}
    on: set = set()
    stack: list = []
    out = []
    for root in sorted(nodes):
        if root in index:
            continue
        index[root] = low[root] = len(index)
        stack.append(root)
        on.add(root)
        work = [(root, iter(succ_fn(root)))]
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if w not in nodes:
                    continue
                if w not in index:
                    index[w] = low[w] = len(index)
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succ_fn(w))))
                    pushed = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if pushed:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                out.append(comp)
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return out


def _cycle_states(nodes, succ_fn, obl_fn, ful_fn) -> set:
    """States on some closed walk all of whose pending obligations are
    fulfilled on the walk, by SCC refinement."""
    good: set = set()
    work = [set(nodes)]
    while work:
        part = work.pop()
        for comp in _sccs(part, succ_fn):
            if len(comp) == 1:
                v = next(iter(comp))
                if v not in succ_fn(v):
                    continue
            obls = fuls = 0
            for x in comp:
                obls |= obl_fn(x)
                fuls |= ful_fn(x)
            missing = obls & ~fuls
            if not missing:
                good |= comp
                continue
            rest = {x for x in comp if not obl_fn(x) & missing}
            if rest and rest != part:
                work.append(rest)
    return good


def _shortest_cycle(sys: _System, s: int, nodes, succ_fn, obl_fn, ful_fn,
                    bound: int | None = None):
    """Shortest fulfilling closed walk from s back to s, as the list of
    walk states starting at s; None when there is none (or none shorter
    than the bound)."""
    obl = {v: obl_fn(v) for v in nodes}
    ful = {v: ful_fn(v) for v in nodes}
    start = (s, obl[s], ful[s])
    parent: dict = {start: None}
    depth = {start: 0}
    q = deque([start])
    while q:
        sys.budget.spend(1)
        node = q.popleft()
        v, ob, fu = node
        d = depth[node]
        if bound is not None and d + 1 >= bound:
            continue
        for w in succ_fn(v):
            if w not in obl:
                continue
            nob, nfu = ob | obl[w], fu | ful[w]
            if w == s and nob & ~nfu == 0:
                walk = [v]
                cur = node
                while parent[cur] is not None:
                    cur = parent[cur]
                    walk.append(cur[0])
                walk.reverse()
                return walk
            nxt = (w, nob, nfu)
            if nxt not in parent:
                parent[nxt] = node
                depth[nxt] = d + 1
                q.append(nxt)
    return None


def _bfs(sys: _System, inits, step_fn):
    dist: dict = {}
    parent: dict = {}
    layers = []
    frontier = sorted(set(inits))
    for v in frontier:
        dist[v] = 0
    while frontier:
        layers.append(frontier)
        nxt = []
        for v in frontier:
            sys.budget.spend(1)
            for w in step_fn(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    nxt.append(w)
        frontier = sorted(set(nxt))
    return dist, parent, layers


def _path_back(parent, v) -> list:
    path = [v]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    path.reverse()
    return path


# -------------------------------------------------------------- solvers

def _init_states(sys: _System):
    """States legal at instant 0 of a flow with no past: every Since
    bit off (strict semantics give Since no witness there)."""
    nfree = sys.na + sys.nu
    sys.budget.spend(1 << nfree)
    return [c for c in range(1 << nfree)
            if sys.truth(sys.goal, c) and sys.state_ok(c)]


def _solve_nat(sys: _System):
    inits = _init_states(sys)
    if not inits:
        return None
    dist, parent, layers = _bfs(sys, inits, sys.succs)
    good = _cycle_states(dist.keys(), sys.succs, sys.ubits, sys.ufuls)
    for layer in layers:
        cands = sorted(set(layer) & good)
        if not cands:
            continue
        best = None
        for s in cands:
            bound = None if best is None else len(best[1])
            cyc = _shortest_cycle(sys, s, dist.keys(), sys.succs,
                                  sys.ubits, sys.ufuls, bound=bound)
            if cyc and (best is None or len(cyc) < len(best[1])):
                best = (s, cyc)
                if len(cyc) == 1:
                    break
        if best is None:
            continue
        s, cyc = best
        prefix = _path_back(parent, s)[:-1]
        flow = F.Nat(len(prefix), len(cyc))
        return flow, prefix + cyc, 0
    return None


def _solve_finite_any(sys: _System):
    inits = _init_states(sys)
    dist, parent, layers = ({}, {}, [])
    if inits:
        dist, parent, layers = _bfs(sys, inits, sys.succs)
    accepting = sorted(v for v in dist if sys.ubits(v) == 0)
    if not accepting:
        return None
    last = min(accepting, key=lambda v: (dist[v], v))
    path = _path_back(parent, last)
    return F.Finite(len(path)), path, 0


def _solve_finite(sys: _System, k: int):
    if k > 100000:
        raise ValueError("finite flow length too large to search")
    layer = {v: None for v in _init_states(sys)}
    history = [layer]
    for _ in range(k - 1):
        sys.budget.spend(1)
        nxt: dict = {}
        for v in sorted(layer):
            for w in sys.succs(v):
                nxt.setdefault(w, v)
        if not nxt:
            return None
        layer = nxt
        history.append(layer)
    finals = sorted(v for v in layer if sys.ubits(v) == 0)
    if not finals:
        return None
    path = [finals[0]]
    for t in range(k - 1, 0, -1):
        path.append(history[t][path[-1]])
    path.reverse()
    return F.Finite(k), path, 0


def _hops_toward(sys: _System, targets, edges_rev) -> dict:
    """BFS from the target set along reversed edges: for every state
    that can reach a target, the chosen next hop and distance."""
    hop = {t: (0, None) for t in targets}
    frontier = sorted(targets)
    while frontier:
        nxt = []
        for v in frontier:
            sys.budget.spend(1)
            for w in edges_rev.get(v, ()):
                if w not in hop:
                    hop[w] = (hop[v][0] + 1, v)
                    nxt.append(w)
        frontier = sorted(set(nxt))
    return hop


def _follow(hop: dict, s: int) -> list:
    path = [s]
    while hop[path[-1]][1] is not None:
        path.append(hop[path[-1]][1])
    return path


def _solve_int(sys: _System):
    sys.budget.spend(1 << sys.nbits)
    fstates = [c for c in range(1 << sys.nbits)
               if sys.truth(sys.goal, c) and sys.state_ok(c)]
    if not fstates:
        return None
    distf, _, _ = _bfs(sys, fstates, sys.succs)
    goodr = _cycle_states(distf.keys(), sys.succs, sys.ubits, sys.ufuls)
    if not goodr:
        return None
    distb, _, _ = _bfs(sys, fstates, sys.preds)
    goodl = _cycle_states(distb.keys(), sys.preds, sys.sbits, sys.sfuls)
    if not goodl:
        return None
    revf: dict = {}
    for v in distf:
        for w in sys.succs(v):
            revf.setdefault(w, []).append(v)
    revb: dict = {}
    for v in distb:
        for w in sys.preds(v):
            revb.setdefault(w, []).append(v)
    hopr = _hops_toward(sys, goodr, revf)
    hopl = _hops_toward(sys, goodl, revb)
    cands = [s for s in fstates if s in hopr and s in hopl]
    if not cands:
        return None
    s = min(cands, key=lambda x: (hopl[x][0] + hopr[x][0], hopl[x][0], x))

    back = _follow(hopl, s)          # s, ..., left entry (pred steps)
    le = back[-1]
    bcyc = _shortest_cycle(sys, le, distb.keys(), sys.preds,
                           sys.sbits, sys.sfuls)
    fw_cycle = [le] + list(reversed(bcyc[1:]))
    if len(back) == 1:
        left_block = fw_cycle
        core_left = [s]
    else:
        left_block = fw_cycle[1:] + [le]
        core_left = list(reversed(back[:-1]))

    ahead = _follow(hopr, s)         # s, ..., right entry (succ steps)
    re = ahead[-1]
    fcyc = _shortest_cycle(sys, re, distf.keys(), sys.succs,
                           sys.ubits, sys.ufuls)
    if len(ahead) == 1:
        right_block = fcyc[1:] + [re]
        core_mid = []
    else:
        right_block = fcyc
        core_mid = ahead[1:-1]

    core = core_left + core_mid
    states = left_block + core + right_block
    flow = F.Int(len(left_block), len(core), len(right_block))
    return flow, states, len(core_left) - 1


def _flow_kind(flow):
    if isinstance(flow, int):
        return ("finite", flow)
    if isinstance(flow, F.Finite):
        return ("finite", flow.length)
    if isinstance(flow, tuple) and len(flow) == 2 and flow[0] == "finite":
        return ("finite", int(flow[1]))
    if isinstance(flow, str):
        tag = flow.replace("-", "_")
        if tag in ("nat", "int", "finite_any"):
            return tag
        if tag.startswith("finite:"):
            return ("finite", int(tag.split(":", 1)[1]))
    raise ValueError(f"unknown flow {flow!r}; use nat, int, finite:K or"
                     " finite-any")


def ptl_sat(f, flow="nat", budget=None, state_filter=None,
            transition_filter=None, extra_atoms=()):
    """Satisfiability of a propositional Until/Since formula over the
    given flow. Returns a validated Trace, UNSAT, or BUDGET_EXCEEDED
    when the optional exploration budget runs out.

    The optional filters restrict the state graph: state_filter sees
    the set of atoms true in a candidate state, transition_filter the
    atom sets of both ends of a candidate edge. Both must be pure
    predicates; the solver then decides satisfiability over exactly
    the traces whose states and steps pass them. extra_atoms are
    tracked as state bits even when the formula never mentions them,
    so filters can constrain them."""
    kind = _flow_kind(flow)
    sys = _System(f, budget, state_filter, transition_filter, extra_atoms)
    try:
        if kind == "nat":
            res = _solve_nat(sys)
        elif kind == "int":
            res = _solve_int(sys)
        elif kind == "finite_any":
            res = _solve_finite_any(sys)
        else:
            res = _solve_finite(sys, kind[1])
    except _BudgetHit:
        return BUDGET_EXCEEDED
    if res is None:
        return UNSAT
    flow_spec, masks, eval_point = res
    tr = Trace(flow_spec, tuple(sys.atoms_of(x) for x in masks), eval_point)
    assert validate_trace(tr, f), \
        "internal error: temporal witness failed validation"
    return tr


# ---------------------------------------------------------- brute force

def _prop_atoms(f) -> list:
    names: dict = {}

    def walk(x):
        match x:
            case S.PropAtom(n):
                names.setdefault(n)
            case S.TrueF() | S.FalseF():
                return
            case S.Not(a) | S.NextF(a) | S.DiamFF(a) | S.BoxFF(a) \
                    | S.DiamPF(a) | S.BoxPF(a):
                walk(a)
            case S.And(a, b) | S.UntilF(a, b) | S.SinceF(a, b):
                walk(a)
                walk(b)
            case _:
                raise ValueError(
                    "brute_force_sat needs purely propositional atoms;"
                    " found " + S.print_formula(x))

    walk(f)
    return sorted(names)


def _assignments(atoms, n):
    cells = [frozenset(c) for r in range(len(atoms) + 1)
             for c in itertools.combinations(atoms, r)]
    return itertools.product(cells, repeat=n)


def _trace_sat(flow, states, f, atoms, eval_points):
    tr = Trace(flow, states, next(iter(eval_points)))
    m = trace_model(tr, atoms)
    for w in eval_points:
        if F.eval_formula(m, f, w):
            return Trace(flow, states, w)
    return None


def brute_force_sat(f, bounds, flow="nat"):
    """Exhaustive search over all traces within bounds; the independent
    oracle. bounds = (max prefix, max loop, max finite length). SAT is
    definitive; a miss is UNSAT only when the bounds cover the
    state-set completeness threshold 2^(number of subformulas),
    otherwise UNKNOWN. For an exact finite length the enumeration is
    complete regardless of bounds."""
    kind = _flow_kind(flow)
    atoms = _prop_atoms(f)
    max_prefix, max_loop, max_finite = bounds
    threshold = 2 ** S.length_of(f)

    if kind == "nat":
        for p in range(max_prefix + 1):
            for l in range(1, max_loop + 1):
                for states in _assignments(atoms, p + l):
                    got = _trace_sat(F.Nat(p, l), states, f, atoms, [0])
                    if got:
                        return got
        definitive = max_prefix >= threshold and max_loop >= threshold
    elif kind == "int":
        for a in range(1, max_loop + 1):
            for b in range(max_prefix + 1):
                for c in range(1, max_loop + 1):
                    flow_spec = F.Int(a, b, c)
                    pts = list(F.represented_instants(flow_spec))
                    for states in _assignments(atoms, a + b + c):
                        got = _trace_sat(flow_spec, states, f, atoms, pts)
                        if got:
                            return got
        definitive = max_prefix >= threshold and max_loop >= threshold
    elif kind == "finite_any":
        for k in range(1, max_finite + 1):
            for states in _assignments(atoms, k):
                got = _trace_sat(F.Finite(k), states, f, atoms, [0])
                if got:
                    return got
        definitive = max_finite >= threshold
    else:
        k = kind[1]
        for states in _assignments(atoms, k):
            got = _trace_sat(F.Finite(k), states, f, atoms, [0])
            if got:
                return got
        definitive = True

    return UNSAT if definitive else UNKNOWN
