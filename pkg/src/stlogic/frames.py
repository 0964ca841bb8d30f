"""Finite-description topological temporal models over Aleksandrov
frames, and brute-force evaluation of terms and formulas on them.

A frame is a quasi-ordered finite set of points; its open sets are the
upward closed ones, so interior keeps the points all of whose successors
stay inside. Flows of time are finite, ultimately periodic over the
naturals (prefix + loop), or two-sided ultimately periodic over the
integers (left loop + core + right loop).

eval_term / eval_formula implement the semantics directly and serve as
the independent oracle for every solver's witness. On infinite flows,
until/since witness searches are truncated at a sound settle point: past
that instant every subterm's extension repeats with the loop period, so
any witness beyond it can be shifted one period down.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from . import syntax as S

FRAME_SHAPES = ("general", "union_of_brooms", "union_of_forks", "chain")


class FrameError(ValueError):
    pass


class Frame:
    """Quasi-ordered point set, stored with its reflexive-transitive
    closure precomputed."""

    def __init__(self, points, order, shape: str = "general"):
        if len(set(points)) != len(list(points)):
            raise FrameError("duplicate points")
        self.points = tuple(points)
        if not self.points:
            raise FrameError("a frame needs at least one point")
        pset = set(self.points)
        succ = {p: {p} for p in self.points}
        for a, b in order:
            if a not in pset or b not in pset:
                raise FrameError(f"order pair ({a!r},{b!r}) off the point set")
            succ[a].add(b)
        # transitive closure by repeated expansion (frames here are small)
        changed = True
        while changed:
            changed = False
            for p in self.points:
                ext = set().union(*(succ[q] for q in succ[p]))
                if not ext <= succ[p]:
                    succ[p] |= ext
                    changed = True
        self.succ = {p: frozenset(s) for p, s in succ.items()}
        self.rel = frozenset((a, b) for a in self.points for b in self.succ[a])
        self.all = frozenset(self.points)
        if shape not in FRAME_SHAPES:
            raise FrameError(f"unknown shape tag {shape!r}")
        self.shape = shape
        if shape != "general":
            self._verify_shape(shape)

    def _components(self):
        undirected: dict = {p: set() for p in self.points}
        for a, b in self.rel:
            undirected[a].add(b)
            undirected[b].add(a)
        seen: set = set()
        comps = []
        for p in self.points:
            if p in seen:
                continue
            comp, stack = set(), [p]
            while stack:
                q = stack.pop()
                if q in comp:
                    continue
                comp.add(q)
                stack.extend(undirected[q] - comp)
            seen |= comp
            comps.append(comp)
        return comps

    def _verify_shape(self, shape: str) -> None:
        if shape == "chain":
            by_size = sorted(self.points, key=lambda p: -len(self.succ[p]))
            for i, p in enumerate(by_size):
                if self.succ[p] != frozenset(by_size[i:]):
                    raise FrameError("shape tag chain does not hold")
            return
        for comp in self._components():
            roots = [p for p in comp if self.succ[p] == frozenset(comp)]
            leaves = [p for p in comp if self.succ[p] == frozenset({p})]
            if len(comp) == 1:
                if shape == "union_of_forks":
                    raise FrameError("shape tag union_of_forks does not hold")
                continue
            if len(roots) != 1 or len(leaves) != len(comp) - 1:
                raise FrameError(f"shape tag {shape} does not hold")
            if shape == "union_of_forks" and len(leaves) != 2:
                raise FrameError("shape tag union_of_forks does not hold")

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.points == other.points and self.rel == other.rel

    def __hash__(self):
        return hash((self.points, self.rel))

    def __repr__(self):
        return f"Frame({len(self.points)} points, shape={self.shape})"


def interior_of(fr: Frame, s) -> frozenset:
    """Points of s all of whose successors are in s."""
    s = frozenset(s)
    return frozenset(x for x in s if fr.succ[x] <= s)


def closure_of(fr: Frame, s) -> frozenset:
    return fr.all - interior_of(fr, fr.all - frozenset(s))


def make_frame(spec, shape: str = "general") -> Frame:
    """General constructor from {"points": [...], "order": [[a,b],...]}
    (the model JSON frame layout) or a (points, order) pair."""
    if isinstance(spec, dict):
        return Frame(spec["points"], [tuple(p) for p in spec["order"]], shape)
    points, order = spec
    return Frame(points, order, shape)


def broom(n: int, base: int = 0) -> Frame:
    """Root below n leaves, reflexive; points numbered from base."""
    if n < 1:
        raise FrameError("a broom needs at least one leaf")
    root = base
    leaves = list(range(base + 1, base + n + 1))
    return Frame([root] + leaves, [(root, leaf) for leaf in leaves],
                 "union_of_brooms")


def fork(base: int = 0) -> Frame:
    f = broom(2, base)
    return Frame(f.points, [(p, q) for p, q in f.rel if p != q], "union_of_forks")


def chain(n: int) -> Frame:
    if n < 1:
        raise FrameError("a chain needs at least one point")
    return Frame(list(range(n)), [(i, i + 1) for i in range(n - 1)], "chain")


def discrete(n: int) -> Frame:
    """n isolated reflexive points (degenerate brooms)."""
    if n < 1:
        raise FrameError("need at least one point")
    return Frame(list(range(n)), [], "union_of_brooms")


def disjoint_union(frames) -> Frame:
    frames = list(frames)
    if not frames:
        raise FrameError("empty union")
    points, order = [], []
    offset = 0
    for fr in frames:
        relabel = {p: offset + i for i, p in enumerate(fr.points)}
        points.extend(relabel[p] for p in fr.points)
        order.extend((relabel[a], relabel[b]) for a, b in fr.rel if a != b)
        offset += len(fr.points)
    shapes = {fr.shape for fr in frames}
    if shapes == {"union_of_forks"}:
        shape = "union_of_forks"
    elif shapes <= {"union_of_brooms", "union_of_forks"}:
        shape = "union_of_brooms"
    elif shapes == {"chain"} and len(frames) == 1:
        shape = "chain"
    else:
        shape = "general"
    return Frame(points, order, shape)


# ------------------------------------------------------------------ flows

class FlowSpec:
    __slots__ = ()


@dataclass(frozen=True)
class Finite(FlowSpec):
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("finite flow needs at least one instant")


@dataclass(frozen=True)
class Nat(FlowSpec):
    prefix: int
    loop: int

    def __post_init__(self):
        if self.prefix < 0 or self.loop < 1:
            raise ValueError("nat flow needs prefix >= 0 and loop >= 1")


@dataclass(frozen=True)
class Int(FlowSpec):
    left: int
    core: int
    right: int

    def __post_init__(self):
        if self.left < 1 or self.right < 1 or self.core < 0:
            raise ValueError("int flow needs positive loops and core >= 0")


def represented_instants(flow: FlowSpec):
    """The instants a model stores explicitly."""
    match flow:
        case Finite(k):
            return range(k)
        case Nat(p, l):
            return range(p + l)
        case Int(a, b, c):
            return range(-a, b + c)
    raise TypeError(f"not a flow: {flow!r}")


def _states_len(flow: FlowSpec) -> int:
    return len(represented_instants(flow))


class TTModel:
    """Flow + frame + valuation. The valuation maps each spatial
    variable to one point set per represented instant (finite: all of
    them; nat: prefix then loop; int: left loop, core, right loop)."""

    def __init__(self, flow: FlowSpec, frame: Frame, valuation):
        self.flow = flow
        self.frame = frame
        n = _states_len(flow)
        val = {}
        for var, seq in valuation.items():
            seq = [frozenset(s) for s in seq]
            if len(seq) != n:
                raise ValueError(
                    f"variable {var!r} has {len(seq)} states, flow stores {n}")
            for s in seq:
                if not s <= frame.all:
                    raise ValueError(f"valuation of {var!r} leaves the frame")
            val[var] = tuple(seq)
        self.valuation = val
        self._tcache: dict = {}
        self._fcache: dict = {}

    def _slot(self, w: int) -> int:
        match self.flow:
            case Finite(k):
                if not 0 <= w < k:
                    raise ValueError(f"instant {w} outside finite flow of {k}")
                return w
            case Nat(p, l):
                if w < 0:
                    raise ValueError(f"instant {w} outside nat flow")
                return w if w < p else p + (w - p) % l
            case Int(a, b, c):
                if w < 0:
                    return w % a  # python modulo: -1 lands on slot a-1
                if w < b:
                    return a + w
                return a + b + (w - b) % c
        raise TypeError(f"not a flow: {self.flow!r}")

    def state(self, var: str, w: int) -> frozenset:
        if var not in self.valuation:
            raise KeyError(f"variable {var!r} not in the model valuation")
        return self.valuation[var][self._slot(w)]

    def has_successor(self, w: int) -> bool:
        match self.flow:
            case Finite(k):
                return w < k - 1
            case _:
                return True

    def has_predecessor(self, w: int) -> bool:
        match self.flow:
            case Int():
                return True
            case _:
                return w > 0


def _future_base(flow: FlowSpec) -> int:
    match flow:
        case Nat(p, _):
            return p
        case Int(_, b, _):
            return b
    raise TypeError


def _future_loop(flow: FlowSpec) -> int:
    match flow:
        case Nat(_, l):
            return l
        case Int(_, _, c):
            return c
    raise TypeError


def _fsettle(m: TTModel, t) -> int:
    key = ("fs", t)
    if key in m._tcache:
        return m._tcache[key]
    P = _future_base(m.flow)
    L = _future_loop(m.flow)
    match t:
        case S.Var() | S.Top() | S.Bot() | S.PropAtom() | S.TrueF() | S.FalseF():
            v = P
        case S.All(a):
            v = _fsettle(m, a)
        case (S.Comp(a) | S.Interior(a) | S.Closure(a) | S.NextT(a)
              | S.Not(a) | S.NextF(a)):
            v = _fsettle(m, a)
        case (S.Inter(a, b) | S.UnionT(a, b) | S.UntilT(a, b) | S.And(a, b)
              | S.UntilF(a, b)):
            v = max(_fsettle(m, a), _fsettle(m, b))
        case S.DiamFT(a) | S.BoxFT(a) | S.DiamFF(a) | S.BoxFF(a):
            v = _fsettle(m, a)
        case S.SinceT(a, b) | S.SinceF(a, b):
            v = max(_fsettle(m, a), _fsettle(m, b)) + L
        case S.DiamPT(a) | S.BoxPT(a) | S.DiamPF(a) | S.BoxPF(a):
            v = _fsettle(m, a) + L
        case _:
            raise TypeError(f"cannot evaluate {t!r}")
    m._tcache[key] = v
    return v


def _psettle(m: TTModel, t) -> int:
    """Past settle point for int flows: at or below it, extensions repeat
    with the left loop period."""
    key = ("ps", t)
    if key in m._tcache:
        return m._tcache[key]
    A = m.flow.left
    match t:
        case S.Var() | S.Top() | S.Bot() | S.PropAtom() | S.TrueF() | S.FalseF():
            v = -1
        case S.All(a):
            v = _psettle(m, a)
        case S.Comp(a) | S.Interior(a) | S.Closure(a) | S.Not(a):
            v = _psettle(m, a)
        case S.NextT(a) | S.NextF(a):
            v = _psettle(m, a) - 1
        case S.Inter(a, b) | S.UnionT(a, b) | S.And(a, b):
            v = min(_psettle(m, a), _psettle(m, b))
        case S.SinceT(a, b) | S.SinceF(a, b):
            v = min(_psettle(m, a), _psettle(m, b))
        case S.DiamPT(a) | S.BoxPT(a) | S.DiamPF(a) | S.BoxPF(a):
            v = _psettle(m, a)
        case S.UntilT(a, b) | S.UntilF(a, b):
            v = min(_psettle(m, a), _psettle(m, b)) - A
        case S.DiamFT(a) | S.BoxFT(a) | S.DiamFF(a) | S.BoxFF(a):
            v = _psettle(m, a) - A
        case _:
            raise TypeError(f"cannot evaluate {t!r}")
    m._tcache[key] = v
    return v


def _future_range(m: TTModel, node, w: int):
    """Candidate witness instants v > w for until-type operators."""
    match m.flow:
        case Finite(k):
            return range(w + 1, k)
        case _:
            top = max(w + 1, _fsettle(m, node)) + _future_loop(m.flow)
            return range(w + 1, top + 1)


def _past_range(m: TTModel, node, w: int):
    """Candidate witness instants v < w for since-type operators, nearest
    first."""
    match m.flow:
        case Int():
            low = min(w - 1, _psettle(m, node)) - m.flow.left
            return range(w - 1, low - 1, -1)
        case _:
            return range(w - 1, -1, -1)


def eval_term(m: TTModel, t, w: int) -> frozenset:
    key = (t, m._slot(w) if not _is_temporal_term(t) else ("w", w))
    if key in m._tcache:
        return m._tcache[key]
    fr = m.frame
    match t:
        case S.Var(name):
            out = m.state(name, w)
        case S.Top():
            out = fr.all
        case S.Bot():
            out = frozenset()
        case S.Comp(a):
            out = fr.all - eval_term(m, a, w)
        case S.Inter(a, b):
            out = eval_term(m, a, w) & eval_term(m, b, w)
        case S.UnionT(a, b):
            out = eval_term(m, a, w) | eval_term(m, b, w)
        case S.Interior(a):
            out = interior_of(fr, eval_term(m, a, w))
        case S.Closure(a):
            out = closure_of(fr, eval_term(m, a, w))
        case S.NextT(a):
            out = eval_term(m, a, w + 1) if m.has_successor(w) else frozenset()
        case S.UntilT(a, b):
            out = frozenset()
            hold = fr.all
            for v in _future_range(m, t, w):
                out |= hold & eval_term(m, b, v)
                hold &= eval_term(m, a, v)
                if not hold:
                    break
        case S.SinceT(a, b):
            out = frozenset()
            hold = fr.all
            for v in _past_range(m, t, w):
                out |= hold & eval_term(m, b, v)
                hold &= eval_term(m, a, v)
                if not hold:
                    break
        case S.DiamFT(a):
            out = frozenset()
            for v in _future_range(m, t, w):
                out |= eval_term(m, a, v)
        case S.BoxFT(a):
            out = fr.all
            for v in _future_range(m, t, w):
                out &= eval_term(m, a, v)
        case S.DiamPT(a):
            out = frozenset()
            for v in _past_range(m, t, w):
                out |= eval_term(m, a, v)
        case S.BoxPT(a):
            out = fr.all
            for v in _past_range(m, t, w):
                out &= eval_term(m, a, v)
        case _:
            raise TypeError(f"not a term: {t!r}")
    m._tcache[key] = out
    return out


_TEMPORAL_TERM_TYPES = (S.NextT, S.UntilT, S.SinceT, S.DiamFT, S.BoxFT,
                        S.DiamPT, S.BoxPT)


_TEMPORAL_CACHE: dict = {}


def _is_temporal_term(t) -> bool:
    if t in _TEMPORAL_CACHE:
        return _TEMPORAL_CACHE[t]
    found = False
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, _TEMPORAL_TERM_TYPES):
            found = True
            break
        match x:
            case S.Comp(a) | S.Interior(a) | S.Closure(a):
                stack.append(a)
            case S.Inter(a, b) | S.UnionT(a, b):
                stack.extend((a, b))
    _TEMPORAL_CACHE[t] = found
    return found


def eval_formula(m: TTModel, f, w: int) -> bool:
    key = (f, w)
    if key in m._fcache:
        return m._fcache[key]
    match f:
        case S.Rcc8Atom():
            raise ValueError("expand RCC-8 atoms before evaluation")
        case S.PropAtom(name):
            # propositional flags are variables covering the whole space
            out = m.state(name, w) == m.frame.all
        case S.TrueF():
            out = True
        case S.FalseF():
            out = False
        case S.All(t):
            out = eval_term(m, t, w) == m.frame.all
        case S.Not(a):
            out = not eval_formula(m, a, w)
        case S.And(a, b):
            out = eval_formula(m, a, w) and eval_formula(m, b, w)
        case S.NextF(a):
            out = m.has_successor(w) and eval_formula(m, a, w + 1)
        case S.UntilF(a, b):
            out = False
            for v in _future_range(m, f, w):
                if eval_formula(m, b, v):
                    out = True
                    break
                if not eval_formula(m, a, v):
                    break
        case S.SinceF(a, b):
            out = False
            for v in _past_range(m, f, w):
                if eval_formula(m, b, v):
                    out = True
                    break
                if not eval_formula(m, a, v):
                    break
        case S.DiamFF(a):
            out = any(eval_formula(m, a, v) for v in _future_range(m, f, w))
        case S.BoxFF(a):
            out = all(eval_formula(m, a, v) for v in _future_range(m, f, w))
        case S.DiamPF(a):
            out = any(eval_formula(m, a, v) for v in _past_range(m, f, w))
        case S.BoxPF(a):
            out = all(eval_formula(m, a, v) for v in _past_range(m, f, w))
        case _:
            raise TypeError(f"not a formula: {f!r}")
    m._fcache[key] = out
    return out


def fsa_report(m: TTModel, terms) -> dict:
    """Distinct extensions of each term over the represented instants."""
    out = {}
    for t in terms:
        states = {eval_term(m, t, w) for w in represented_instants(m.flow)}
        out[t] = len(states)
    return out


# ---------------------------------------------------------------- JSON

def flow_to_json(flow: FlowSpec) -> dict:
    match flow:
        case Finite(k):
            return {"kind": "finite", "length": k}
        case Nat(p, l):
            return {"kind": "nat", "prefix": p, "loop": l}
        case Int(a, b, c):
            return {"kind": "int", "left": a, "core": b, "right": c}
    raise TypeError(f"not a flow: {flow!r}")


def flow_from_json(d: dict) -> FlowSpec:
    kind = d["kind"]
    if kind == "finite":
        return Finite(d["length"])
    if kind == "nat":
        return Nat(d["prefix"], d["loop"])
    if kind == "int":
        return Int(d["left"], d["core"], d["right"])
    raise ValueError(f"unknown flow kind {kind!r}")


def model_to_json(m: TTModel) -> dict:
    order = sorted((a, b) for a, b in m.frame.rel if a != b)
    index = {p: i for i, p in enumerate(m.frame.points)}
    val = {}
    for var in sorted(m.valuation):
        val[var] = [sorted(s, key=index.__getitem__) for s in m.valuation[var]]
    return {
        "flow": flow_to_json(m.flow),
        "frame": {"points": list(m.frame.points), "order": [list(p) for p in order]},
        "valuation": val,
    }


def model_from_json(d: dict) -> TTModel:
    flow = flow_from_json(d["flow"])
    frame = make_frame(d["frame"])
    return TTModel(flow, frame, d["valuation"])


def load_model(path: str) -> TTModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_json(json.load(fh))


def save_model(m: TTModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(m), fh, indent=1)
        fh.write("\n")
