"""Independent reference evaluators used to cross-check the package.

The periodic-flow evaluator here is exact rather than truncated: it
unfolds the flow into a long explicit window, computes since-type
operators by forward recurrence (no error on a finite past), and
computes until-type operators by a least-fixpoint pass over the loop
slots once the argument arrays have become periodic, followed by a
backward recurrence through the window. Periodicity of every argument
array is checked, not assumed. Expected values in the test suite are
frozen against these.
"""

from stlogic import frames as F
from stlogic import syntax as S

# unfold this many loop periods beyond the prefix/core
PERIODS = 24


class OracleError(AssertionError):
    pass


class _Window:
    def __init__(self, flow):
        self.flow = flow
        match flow:
            case F.Finite(k):
                self.lo, self.hi = 0, k
                self.left_loop = self.right_loop = None
            case F.Nat(p, l):
                self.lo, self.hi = 0, p + PERIODS * l
                self.left_loop, self.right_loop = None, l
            case F.Int(a, b, c):
                self.lo, self.hi = -(PERIODS * a), b + PERIODS * c
                self.left_loop, self.right_loop = a, c

    def idx(self, w: int) -> int:
        return w - self.lo

    def instants(self):
        return range(self.lo, self.hi)

    def size(self) -> int:
        return self.hi - self.lo


def _right_settle(win, arr):
    """Least instant s with arr[w] == arr[w+loop] for every w in
    [s, hi-loop); demands slack before trusting the window."""
    loop = win.right_loop
    s = win.lo
    for w in range(win.hi - loop - 1, win.lo - 1, -1):
        if arr[win.idx(w)] != arr[win.idx(w + loop)]:
            s = w + 1
            break
    if s > win.hi - 6 * loop:
        raise OracleError("window too short for right settle")
    return s


def _left_settle(win, arr):
    """Greatest instant s with arr[w] == arr[w-loop] for every w in
    (lo+loop, s]."""
    loop = win.left_loop
    s = win.hi - 1
    for w in range(win.lo + loop, win.hi):
        if arr[win.idx(w)] != arr[win.idx(w - loop)]:
            s = w - 1
            break
    if s < win.lo + 6 * loop:
        raise OracleError("window too short for left settle")
    return s


def _at_right(win, arr, settle, w):
    if w > settle:
        w = settle + ((w - settle) % win.right_loop)
    return arr[win.idx(w)]


def _at_left(win, arr, settle, w):
    if w < settle:
        w = settle - ((settle - w) % win.left_loop)
    return arr[win.idx(w)]


def _until_array(win, ca, cb, bottom, lor, land):
    """X(w) = B(w+1) or (A(w+1) and X(w+1)); least fixpoint at the
    right edge of infinite flows."""
    n = win.size()
    arr = [None] * n
    if win.right_loop is None:
        cur = bottom
        for i in range(n - 1, -1, -1):
            arr[i] = cur
            if i > 0:
                cur = lor(cb[i], land(ca[i], cur))
        return arr
    loop = win.right_loop
    s = max(_right_settle(win, ca), _right_settle(win, cb))
    fix = [bottom] * loop
    changed = True
    while changed:
        changed = False
        for j in range(loop - 1, -1, -1):
            w = s + j
            new = lor(_at_right(win, cb, s, w + 1),
                      land(_at_right(win, ca, s, w + 1), fix[(j + 1) % loop]))
            if new != fix[j]:
                fix[j] = new
                changed = True
    for j in range(loop):
        for w in range(s + j, win.hi, loop):
            arr[win.idx(w)] = fix[j]
    for w in range(s - 1, win.lo - 1, -1):
        i = win.idx(w)
        arr[i] = lor(cb[i + 1], land(ca[i + 1], arr[i + 1]))
    return arr


def _since_array(win, ca, cb, bottom, lor, land):
    n = win.size()
    arr = [None] * n
    if win.left_loop is None:
        cur = bottom
        for i in range(n):
            arr[i] = cur
            cur = lor(cb[i], land(ca[i], cur))
        return arr
    loop = win.left_loop
    s = min(_left_settle(win, ca), _left_settle(win, cb))
    fix = [bottom] * loop
    changed = True
    while changed:
        changed = False
        for j in range(loop - 1, -1, -1):
            w = s - j
            new = lor(_at_left(win, cb, s, w - 1),
                      land(_at_left(win, ca, s, w - 1), fix[(j + 1) % loop]))
            if new != fix[j]:
                fix[j] = new
                changed = True
    for j in range(loop):
        for w in range(s - j, win.lo - 1, -loop):
            arr[win.idx(w)] = fix[j]
    for w in range(s + 1, win.hi):
        i = win.idx(w)
        arr[i] = lor(cb[i - 1], land(ca[i - 1], arr[i - 1]))
    return arr


def _set_ops(fr):
    return frozenset(), lambda x, y: x | y, lambda x, y: x & y


_BOOL_OPS = (False, lambda x, y: x or y, lambda x, y: x and y)


class PeriodicEvaluator:
    """Exact term/formula evaluation on finite or ultimately periodic
    flows, independent of the settle-point analysis in frames."""

    def __init__(self, m):
        self.m = m
        self.win = _Window(m.flow)
        self._tarr: dict = {}
        self._farr: dict = {}

    # -- terms

    def term_array(self, t):
        if t in self._tarr:
            return self._tarr[t]
        m, win = self.m, self.win
        fr = m.frame
        n = win.size()
        bottom, lor, land = _set_ops(fr)
        match t:
            case S.Var(name):
                arr = [m.state(name, w) for w in win.instants()]
            case S.Top():
                arr = [fr.all] * n
            case S.Bot():
                arr = [frozenset()] * n
            case S.Comp(a):
                arr = [fr.all - x for x in self.term_array(a)]
            case S.Inter(a, b):
                arr = [x & y for x, y in zip(self.term_array(a),
                                             self.term_array(b))]
            case S.UnionT(a, b):
                arr = [x | y for x, y in zip(self.term_array(a),
                                             self.term_array(b))]
            case S.Interior(a):
                arr = [F.interior_of(fr, x) for x in self.term_array(a)]
            case S.Closure(a):
                arr = [F.closure_of(fr, x) for x in self.term_array(a)]
            case S.NextT(a):
                ca = self.term_array(a)
                arr = [ca[i + 1] for i in range(n - 1)]
                if win.right_loop is None:
                    arr.append(frozenset())
                else:
                    arr.append(_at_right(win, ca, _right_settle(win, ca),
                                         win.hi))
            case S.UntilT(a, b):
                arr = _until_array(win, self.term_array(a),
                                   self.term_array(b), bottom, lor, land)
            case S.SinceT(a, b):
                arr = _since_array(win, self.term_array(a),
                                   self.term_array(b), bottom, lor, land)
            case S.DiamFT(a):
                arr = self.term_array(S.UntilT(S.Top(), a))
            case S.BoxFT(a):
                inner = self.term_array(S.UntilT(S.Top(), S.Comp(a)))
                arr = [fr.all - x for x in inner]
            case S.DiamPT(a):
                arr = self.term_array(S.SinceT(S.Top(), a))
            case S.BoxPT(a):
                inner = self.term_array(S.SinceT(S.Top(), S.Comp(a)))
                arr = [fr.all - x for x in inner]
            case _:
                raise TypeError(f"not a term: {t!r}")
        self._tarr[t] = arr
        return arr

    # -- formulas

    def formula_array(self, f):
        if f in self._farr:
            return self._farr[f]
        m, win = self.m, self.win
        n = win.size()
        match f:
            case S.Rcc8Atom():
                raise ValueError("expand RCC-8 atoms first")
            case S.PropAtom(name):
                arr = [m.state(name, w) == m.frame.all
                       for w in win.instants()]
            case S.TrueF():
                arr = [True] * n
            case S.FalseF():
                arr = [False] * n
            case S.All(t):
                arr = [x == m.frame.all for x in self.term_array(t)]
            case S.Not(a):
                arr = [not x for x in self.formula_array(a)]
            case S.And(a, b):
                arr = [x and y for x, y in zip(self.formula_array(a),
                                               self.formula_array(b))]
            case S.NextF(a):
                ca = self._lift(self.formula_array(a))
                arr = [bool(ca[i + 1]) for i in range(n - 1)]
                if win.right_loop is None:
                    arr.append(False)
                else:
                    arr.append(bool(_at_right(win, ca,
                                              _right_settle(win, ca),
                                              win.hi)))
            case S.UntilF(a, b):
                arr = [bool(x) for x in _until_array(
                    win, self._lift(self.formula_array(a)),
                    self._lift(self.formula_array(b)),
                    frozenset(), lambda x, y: x | y, lambda x, y: x & y)]
            case S.SinceF(a, b):
                arr = [bool(x) for x in _since_array(
                    win, self._lift(self.formula_array(a)),
                    self._lift(self.formula_array(b)),
                    frozenset(), lambda x, y: x | y, lambda x, y: x & y)]
            case S.DiamFF(a):
                arr = self.formula_array(S.UntilF(S.TrueF(), a))
            case S.BoxFF(a):
                inner = self.formula_array(S.UntilF(S.TrueF(), S.Not(a)))
                arr = [not x for x in inner]
            case S.DiamPF(a):
                arr = self.formula_array(S.SinceF(S.TrueF(), a))
            case S.BoxPF(a):
                inner = self.formula_array(S.SinceF(S.TrueF(), S.Not(a)))
                arr = [not x for x in inner]
            case _:
                raise TypeError(f"not a formula: {f!r}")
        self._farr[f] = arr
        return arr

    @staticmethod
    def _lift(barr):
        one = frozenset({0})
        return [one if x else frozenset() for x in barr]

    def term_at(self, t, w):
        arr = self.term_array(t)
        if self.win.lo <= w < self.win.hi:
            return arr[self.win.idx(w)]
        if w >= self.win.hi:
            return _at_right(self.win, arr, _right_settle(self.win, arr), w)
        return _at_left(self.win, arr, _left_settle(self.win, arr), w)

    def formula_at(self, f, w):
        arr = self._lift(self.formula_array(f))
        if self.win.lo <= w < self.win.hi:
            return bool(arr[self.win.idx(w)])
        if w >= self.win.hi:
            return bool(_at_right(self.win, arr,
                                  _right_settle(self.win, arr), w))
        return bool(_at_left(self.win, arr, _left_settle(self.win, arr), w))


def oracle_term(m, t, w):
    return PeriodicEvaluator(m).term_at(t, w)


def oracle_formula(m, f, w):
    return PeriodicEvaluator(m).formula_at(f, w)


# ------------------------------------------------- spatial reference

def formula_vars(f) -> set:
    out: set = set()

    def wt(t):
        match t:
            case S.Var(name):
                out.add(name)
            case S.Top() | S.Bot():
                pass
            case _:
                for a in t.__dict__.values():
                    wt(a)

    def wf(g):
        match g:
            case S.All(t):
                wt(t)
            case S.PropAtom(name):
                out.add(name)
            case S.TrueF() | S.FalseF():
                pass
            case S.Not(a):
                wf(a)
            case S.And(a, b):
                wf(a)
                wf(b)
            case _:
                raise OracleError(f"not a pure spatial formula: {g!r}")

    wf(f)
    return out


def _spatial_skeleton(f, atoms: list):
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
            return ("not", _spatial_skeleton(a, atoms))
        case S.And(a, b):
            return ("and", _spatial_skeleton(a, atoms),
                    _spatial_skeleton(b, atoms))
    raise OracleError(f"not a pure spatial formula: {f!r}")


def _skel_eval(node, bits) -> bool:
    match node:
        case ("atom", k):
            return bool(bits >> k & 1)
        case ("const", v):
            return v
        case ("not", a):
            return not _skel_eval(a, bits)
        case ("and", a, b):
            return _skel_eval(a, bits) and _skel_eval(b, bits)
    raise OracleError(node)


def _rc_leaf(t, lab: frozenset) -> bool:
    """Term value at an open leaf: interior and closure are transparent."""
    match t:
        case S.Var(name):
            return name in lab
        case S.Top():
            return True
        case S.Bot():
            return False
        case S.Comp(a):
            return not _rc_leaf(a, lab)
        case S.Inter(a, b):
            return _rc_leaf(a, lab) and _rc_leaf(b, lab)
        case S.UnionT(a, b):
            return _rc_leaf(a, lab) or _rc_leaf(b, lab)
        case S.Interior(a) | S.Closure(a):
            return _rc_leaf(a, lab)
    raise OracleError(f"not an RC term: {t!r}")


def _rc_root(t, labs: frozenset) -> bool:
    """Term value at a broom root, given the set of leaf labels present.
    Only defined for terms whose atoms sit under a closure-of-interior,
    so the root's raw variable values never matter."""
    match t:
        case S.Closure(S.Interior(x)):
            return any(_rc_leaf(x, lab) for lab in labs)
        case S.Closure(a):
            return _rc_root(a, labs) or any(_rc_leaf(a, lab) for lab in labs)
        case S.Interior(a):
            return _rc_root(a, labs) and all(_rc_leaf(a, lab) for lab in labs)
        case S.Top():
            return True
        case S.Bot():
            return False
        case S.Comp(a):
            return not _rc_root(a, labs)
        case S.Inter(a, b):
            return _rc_root(a, labs) and _rc_root(b, labs)
        case S.UnionT(a, b):
            return _rc_root(a, labs) or _rc_root(b, labs)
        case S.Var():
            raise OracleError("raw variable at a root: not a flag-free RC term")
    raise OracleError(f"not an RC term: {t!r}")


def rc_broom_oracle(f) -> bool:
    """Exhaustive satisfiability over all disjoint unions of brooms, for
    flag-free RC formulas.

    A broom is determined, up to the formula, by the set of leaf labels
    it carries (label = variables true at a leaf): leaf values ignore
    interior/closure, root values fold and/or over the leaves. So every
    broom model collapses to a nonempty set of label-set classes, and
    the universal atoms true in a union are the bitwise AND of the
    per-class masks. Satisfiable iff some AND-combination of class
    masks satisfies the Boolean skeleton.
    """
    atoms: list = []
    skel = _spatial_skeleton(f, atoms)
    if not atoms:
        return _skel_eval(skel, 0)
    names = sorted(formula_vars(f))
    labels = []
    for mask in range(1 << len(names)):
        labels.append(frozenset(n for i, n in enumerate(names)
                                if mask >> i & 1))
    masks = set()
    for cmask in range(1, 1 << len(labels)):
        labs = frozenset(l for i, l in enumerate(labels) if cmask >> i & 1)
        bits = 0
        for k, t in enumerate(atoms):
            if _rc_root(t, labs) and all(_rc_leaf(t, lab) for lab in labs):
                bits |= 1 << k
        masks.add(bits)
    reach = set(masks)
    frontier = set(masks)
    while frontier:
        new = {a & b for a in frontier for b in masks} - reach
        reach |= new
        frontier = new
    return any(_skel_eval(skel, bits) for bits in reach)


def tiny_s4u_oracle(f, max_points: int = 2):
    """Brute-force S4u satisfiability over all quasi-orders with at most
    max_points points and all valuations. Returns a witness TTModel or
    None (None is only meaningful as 'no model this small')."""
    import itertools as it

    names = sorted(formula_vars(f))
    for n in range(1, max_points + 1):
        pts = list(range(n))
        pairs = [(a, b) for a in pts for b in pts if a != b]
        seen_rels = set()
        for rmask in range(1 << len(pairs)):
            order = [p for i, p in enumerate(pairs) if rmask >> i & 1]
            fr = F.Frame(pts, order)
            if fr.rel in seen_rels:
                continue
            seen_rels.add(fr.rel)
            for combo in it.product(range(1 << n), repeat=len(names)):
                val = {nm: [{p for p in pts if combo[i] >> p & 1}]
                       for i, nm in enumerate(names)}
                m = F.TTModel(F.Finite(1), fr, val)
                if F.eval_formula(m, f, 0):
                    return m
    return None


# ------------------------------------------------- stepping-region brute

def _temporal_skeleton(g, atoms: list):
    """Name every distinct universal atom and rebuild the temporal
    structure over propositional stand-ins a0, a1, ..."""
    match g:
        case S.All(_):
            if g not in atoms:
                atoms.append(g)
            return S.PropAtom(f"a{atoms.index(g)}")
        case S.TrueF() | S.FalseF():
            return g
        case S.Not(a):
            return S.Not(_temporal_skeleton(a, atoms))
        case S.And(a, b):
            return S.And(_temporal_skeleton(a, atoms),
                         _temporal_skeleton(b, atoms))
        case S.UntilF(a, b):
            return S.UntilF(_temporal_skeleton(a, atoms),
                            _temporal_skeleton(b, atoms))
        case S.SinceF(a, b):
            return S.SinceF(_temporal_skeleton(a, atoms),
                            _temporal_skeleton(b, atoms))
        case S.NextF(a):
            return S.NextF(_temporal_skeleton(a, atoms))
        case S.DiamFF(a):
            return S.DiamFF(_temporal_skeleton(a, atoms))
        case S.BoxFF(a):
            return S.BoxFF(_temporal_skeleton(a, atoms))
        case S.DiamPF(a):
            return S.DiamPF(_temporal_skeleton(a, atoms))
        case S.BoxPF(a):
            return S.BoxPF(_temporal_skeleton(a, atoms))
    raise OracleError(f"unexpected node in a spatio-temporal formula: {g!r}")


def _term_vars_into(t, out: set):
    match t:
        case S.Var(name):
            out.add(name)
        case S.Top() | S.Bot():
            pass
        case _:
            for a in t.__dict__.values():
                _term_vars_into(a, out)


def _next_depth(t) -> int:
    match t:
        case S.Var() | S.Top() | S.Bot():
            return 0
        case S.NextT(a):
            return 1 + _next_depth(a)
        case S.Inter(a, b) | S.UnionT(a, b):
            return max(_next_depth(a), _next_depth(b))
        case S.Comp(a) | S.Interior(a) | S.Closure(a):
            return _next_depth(a)
    raise OracleError(f"term outside the stepping fragment: {t!r}")


def _fork_term(t, fr, seq, i):
    """Value of a stepping term on one fork, reading variable leaf
    sets from seq[i] and next-instant sets from seq[i+1]; a missing
    successor makes the step empty."""
    match t:
        case S.Var(name):
            return seq[i].get(name, frozenset()) if i < len(seq) \
                else frozenset()
        case S.Top():
            return fr.all
        case S.Bot():
            return frozenset()
        case S.Comp(a):
            return fr.all - _fork_term(a, fr, seq, i)
        case S.Inter(a, b):
            return _fork_term(a, fr, seq, i) & _fork_term(b, fr, seq, i)
        case S.UnionT(a, b):
            return _fork_term(a, fr, seq, i) | _fork_term(b, fr, seq, i)
        case S.Interior(a):
            return F.interior_of(fr, _fork_term(a, fr, seq, i))
        case S.Closure(a):
            return F.closure_of(fr, _fork_term(a, fr, seq, i))
        case S.NextT(a):
            if i + 1 >= len(seq):
                return frozenset()
            return _fork_term(a, fr, seq, i + 1)
    raise OracleError(f"term outside the stepping fragment: {t!r}")


class _PairTables:
    """Per-fork truth of each universal atom, indexed by the pair of
    fork states now and next (next None at a finite boundary). A fork
    state packs two leaf-membership bits per variable."""

    def __init__(self, atoms, vars_):
        if any(_next_depth(a.term) > 1 for a in atoms):
            raise OracleError("pair tables need step nesting at most one")
        self.atoms = atoms
        self.vars = list(vars_)
        self.fr = F.fork()
        self.nstates = 1 << (2 * len(self.vars))
        self._memo: dict = {}

    def decode(self, s: int) -> dict:
        out = {}
        for j, v in enumerate(self.vars):
            bits = s >> (2 * j) & 3
            out[v] = frozenset(pt for k, pt in enumerate((1, 2))
                               if bits >> k & 1)
        return out

    def mask(self, s: int, t) -> int:
        key = (s, t)
        if key not in self._memo:
            seq = [self.decode(s)] + ([self.decode(t)] if t is not None
                                      else [])
            m = 0
            for b, a in enumerate(self.atoms):
                if _fork_term(a.term, self.fr, seq, 0) == self.fr.all:
                    m |= 1 << b
            self._memo[key] = m
        return self._memo[key]

    def representatives(self) -> list:
        """One fork state per behavioral class: states with identical
        mask rows, columns and boundary mask are interchangeable in
        any trace, so enumerating class representatives is exhaustive
        for the verdict."""
        sig = {}
        for s in range(self.nstates):
            sig.setdefault(
                (tuple(self.mask(s, t) for t in range(self.nstates)),
                 tuple(self.mask(t, s) for t in range(self.nstates)),
                 self.mask(s, None)), s)
        return sorted(sig.values())


def rc2_fork_trace_sat(f, layouts=None, max_forks=2, cap=1 << 16,
                       samples=8000, seed=20260815):
    """One-way brute search for an ultimately periodic union-of-forks
    tt-model of a stepping-region formula. Enumerates leaf valuations
    per instant per fork, reads each universal atom off consecutive
    state pairs, and checks the temporal skeleton on the induced
    trace. Returns a dict with verdict 'sat' (plus flow, fork count,
    atom trace) or 'none', and whether every layout was exhausted or
    some were only sampled."""
    import itertools as it
    import random

    g = S.expand_rcc8(f)
    atoms: list = []
    skeleton = _temporal_skeleton(g, atoms)
    vars_: set = set()
    for a in atoms:
        _term_vars_into(a.term, vars_)
    vars_ = sorted(vars_)
    if layouts is None:
        layouts = [F.Nat(p, l) for total in range(1, 5)
                   for p in range(total) for l in (total - p,)]
    tables = _PairTables(atoms, vars_)
    names = [f"a{i}" for i in range(len(atoms))]
    vmemo: dict = {}
    rng = random.Random(seed)
    exhausted = True

    from stlogic.temporalsat import Trace, validate_trace

    def check(flow, n, states) -> bool:
        rows = []
        for w in range(n):
            if w < n - 1:
                nxt = states[w + 1]
            elif isinstance(flow, F.Nat):
                nxt = states[flow.prefix]
            else:
                nxt = None
            m = ~0
            for i in range(len(states[w])):
                m &= tables.mask(states[w][i],
                                 None if nxt is None else nxt[i])
            rows.append(frozenset(nm for b, nm in enumerate(names)
                                  if m >> b & 1))
        key = (flow, tuple(rows))
        if key not in vmemo:
            vmemo[key] = validate_trace(Trace(flow, tuple(rows), 0),
                                        skeleton)
        return vmemo[key]

    reps = tables.representatives()
    for flow in layouts:
        n = flow.length if isinstance(flow, F.Finite) \
            else flow.prefix + flow.loop
        for k in range(1, max_forks + 1):
            alphabet = list(it.product(reps, repeat=k))
            total = len(alphabet) ** n
            if total <= cap:
                pool = it.product(alphabet, repeat=n)
            else:
                exhausted = False
                pool = (tuple(rng.choice(alphabet) for _ in range(n))
                        for _ in range(samples))
            for states in pool:
                if k > 1:
                    trajs = [tuple(st[i] for st in states)
                             for i in range(k)]
                    if trajs != sorted(trajs):
                        continue
                if check(flow, n, states):
                    return {"verdict": "sat", "flow": flow, "forks": k,
                            "states": states, "exhausted": exhausted}
    return {"verdict": "none", "exhausted": exhausted}


def rc2_frames_model_search(f, layouts=None, max_forks=2, cap=1 << 14):
    """Fully independent ground-truth search: enumerate leaf
    valuations over a union of forks and evaluate the expanded
    formula, stepping terms included, with the frames evaluator.
    Layouts whose valuation space exceeds the cap are skipped (the
    return marks the search partial)."""
    import itertools as it

    g = S.expand_rcc8(f)
    vars_: set = set()
    atoms: list = []
    _temporal_skeleton(g, atoms)
    for a in atoms:
        _term_vars_into(a.term, vars_)
    vars_ = sorted(vars_)
    if layouts is None:
        layouts = [F.Nat(0, 1), F.Nat(0, 2), F.Nat(1, 1)]
    partial = False
    for flow in layouts:
        n = flow.length if isinstance(flow, F.Finite) \
            else flow.prefix + flow.loop
        for k in range(1, max_forks + 1):
            frame = F.disjoint_union([F.fork() for _ in range(k)])
            leaves = [3 * i + d for i in range(k) for d in (1, 2)]
            nbits = len(vars_) * n * len(leaves)
            if (1 << nbits) > cap:
                partial = True
                continue
            for code in range(1 << nbits):
                val = {}
                pos = 0
                for v in vars_:
                    per = []
                    for _ in range(n):
                        pts = frozenset(
                            pt for j, pt in enumerate(leaves)
                            if code >> (pos + j) & 1)
                        per.append(pts)
                        pos += len(leaves)
                    val[v] = per
                m = F.TTModel(flow, frame, val)
                if F.eval_formula(m, g, 0):
                    return {"verdict": "sat", "model": m,
                            "partial": partial}
    return {"verdict": "none", "partial": partial}


def random_stepping_formula(rng, max_len=14):
    """Random stepping-region formula: RCC-8 atoms and two-shape
    universal atoms over p and q, arguments optionally stepped one
    instant, combined by the temporal connectives."""
    vars_ = ("p", "q")

    def reg():
        v = S.Var(rng.choice(vars_))
        return S.NextT(v) if rng.random() < 0.3 else v

    def shape():
        base = S.CI(S.NextT(S.CI(S.Var(rng.choice(vars_))))) \
            if rng.random() < 0.3 else S.CI(S.Var(rng.choice(vars_)))
        kind = rng.randrange(4)
        if kind == 0:
            return base
        if kind == 1:
            return S.Interior(base)
        if kind == 2:
            return S.Comp(base)
        return S.Comp(S.Interior(base))

    def leaf():
        if rng.random() < 0.7:
            pred = rng.choice(("EQ", "DC", "EC", "PO", "TPP", "NTPP"))
            return S.Rcc8Atom(pred, reg(), reg())
        return S.All(S.UnionT(shape(), shape()))

    def build(depth):
        if depth <= 0 or rng.random() < 0.3:
            return leaf()
        op = rng.randrange(9)
        if op == 0:
            return S.Not(build(depth - 1))
        if op == 1:
            return S.And(build(depth - 1), build(depth - 1))
        if op == 2:
            return S.UntilF(build(depth - 1), build(depth - 1))
        if op == 3:
            return S.SinceF(build(depth - 1), build(depth - 1))
        if op == 4:
            return S.NextF(build(depth - 1))
        if op == 5:
            return S.DiamFF(build(depth - 1))
        if op == 6:
            return S.BoxFF(build(depth - 1))
        if op == 7:
            return S.DiamPF(build(depth - 1))
        return S.BoxPF(build(depth - 1))

    while True:
        f = build(3)
        if S.length_of(f) <= max_len:
            return f
