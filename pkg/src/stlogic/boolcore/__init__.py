"""Propositional engine: a plain DPLL procedure and a
subsumption-complete resolution closure for Krom (at most binary)
clause sets.

The DPLL inner loop has a compiled version; the pure-Python kernel is
the import-time fallback. KERNEL says which one is active.
"""
from __future__ import annotations

import itertools
import sys

from .._status import BUDGET_EXCEEDED, INCONSISTENT, UNSAT

try:
    from . import _speedups as _kernel
    KERNEL = "compiled"
except ImportError:  # extension not built
    from . import _pure as _kernel
    KERNEL = "pure"

from . import _pure

__all__ = ["ClauseSet", "dpll_sat", "krom_close", "KERNEL",
           "UNSAT", "BUDGET_EXCEEDED", "INCONSISTENT"]


class ClauseSet:
    """Clauses over hashable atom ids. Atom order (declaration or first
    occurrence) fixes the DPLL branching order. Duplicate literals are
    merged and tautological clauses dropped on insertion."""

    def __init__(self, atoms=()):
        self._index: dict = {}
        self.atoms: list = []
        self.clauses: set = set()  # frozensets of nonzero ints
        for a in atoms:
            self._intern(a)

    def _intern(self, atom) -> int:
        idx = self._index.get(atom)
        if idx is None:
            idx = len(self.atoms) + 1
            self._index[atom] = idx
            self.atoms.append(atom)
        return idx

    def add_clause(self, lits) -> None:
        """lits: iterable of (atom, positive) pairs."""
        ints = set()
        for atom, pos in lits:
            i = self._intern(atom)
            ints.add(i if pos else -i)
        for lit in ints:
            if -lit in ints:
                return  # tautology
        self.clauses.add(frozenset(ints))

    @property
    def krom(self) -> bool:
        return all(len(c) <= 2 for c in self.clauses)

    def literal_clauses(self):
        """Clauses as frozensets of (atom, positive) pairs, in a stable
        order."""
        out = []
        for c in self._sorted_clauses():
            out.append(frozenset((self.atoms[abs(l) - 1], l > 0) for l in c))
        return out

    def has_clause(self, lits) -> bool:
        ints = set()
        for atom, pos in lits:
            if atom not in self._index:
                return False
            i = self._index[atom]
            ints.add(i if pos else -i)
        return frozenset(ints) in self.clauses

    def _sorted_clauses(self):
        return sorted(self.clauses,
                      key=lambda c: sorted((abs(l), l < 0) for l in c))

    def copy(self) -> "ClauseSet":
        new = ClauseSet(self.atoms)
        new.clauses = set(self.clauses)
        return new

    def __eq__(self, other):
        if not isinstance(other, ClauseSet):
            return NotImplemented
        return (set(self.atoms) == set(other.atoms)
                and set(self.literal_clauses()) == set(other.literal_clauses()))

    def __hash__(self):
        return hash((frozenset(self.atoms), frozenset(self.clauses)))

    def __repr__(self):
        return f"ClauseSet(atoms={len(self.atoms)}, clauses={len(self.clauses)})"


def dpll_sat(cs: ClauseSet, budget: int | None = None, kernel=None):
    """Satisfying total assignment (dict atom -> bool), UNSAT, or
    BUDGET_EXCEEDED when the branch-attempt budget runs out.

    Deterministic: branches on the lowest atom, true first; atoms left
    unconstrained come out false, so an empty clause set yields the
    all-false assignment.

    kernel picks the backend: None for the import-time default, "pure"
    or "compiled" by name, or a module with a solve() entry point.
    """
    if kernel is None:
        k = _kernel
    elif kernel == "pure":
        k = _pure
    elif kernel == "compiled":
        if KERNEL != "compiled":
            raise ValueError("compiled kernel is not available")
        k = _kernel
    elif isinstance(kernel, str):
        raise ValueError(f"unknown kernel {kernel!r}")
    else:
        k = kernel
    n = len(cs.atoms)
    clauses = [tuple(sorted(c, key=lambda l: (abs(l), l < 0)))
               for c in cs._sorted_clauses()]
    if n > 900:
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 2 * n + 200))
    status, model = k.solve(n, clauses, -1 if budget is None else budget)
    if status == _pure.SAT:
        return {atom: bool(model[i + 1]) for i, atom in enumerate(cs.atoms)}
    if status == _pure.BUDGET:
        return BUDGET_EXCEEDED
    return UNSAT


def _resolve(c1: frozenset, c2: frozenset):
    # all resolvents of two Krom clauses; skips tautologies
    for lit in c1:
        if -lit in c2:
            r = (c1 - {lit}) | (c2 - {-lit})
            if not any(-x in r for x in r):
                yield frozenset(r)


def krom_close(cs: ClauseSet):
    """Least superset of a Krom clause set closed under resolution, with
    subsumed clauses removed; INCONSISTENT iff the empty clause is
    derivable."""
    if not cs.krom:
        raise ValueError("krom_close requires clauses of at most 2 literals")
    clauses = set(cs.clauses)
    if frozenset() in clauses:
        return INCONSISTENT
    frontier = list(clauses)
    while frontier:
        c1 = frontier.pop()
        for c2 in list(clauses):
            for r in itertools.chain(_resolve(c1, c2), _resolve(c2, c1)):
                if not r:
                    return INCONSISTENT
                if r not in clauses:
                    clauses.add(r)
                    frontier.append(r)
    units = {c for c in clauses if len(c) == 1}
    kept = units | {c for c in clauses
                    if len(c) == 2 and not any(u < c for u in units)}
    out = ClauseSet(cs.atoms)
    out.clauses = kept
    return out
