"""Pure-Python DPLL kernel.

Clauses are tuples of nonzero integers (positive literal i is atom i,
negative is its negation, atoms numbered from 1). Branching is
deterministic: lowest atom first, true before false. Atoms never touched
by propagation or branching come out false.

solve returns (status, model) with status SAT/UNSAT/BUDGET and model a
0/1 list indexed by atom number (index 0 unused). A node is one branch
attempt (the root counts as one); a nonnegative budget caps them.
"""

SAT, UNSAT, BUDGET = 1, 0, 2


def solve(num_atoms, clauses, budget=-1):
    assign = [0] * (num_atoms + 1)
    trail = []
    nodes = 0

    def set_lit(lit):
        assign[abs(lit)] = 1 if lit > 0 else -1
        trail.append(abs(lit))

    def undo(mark):
        while len(trail) > mark:
            assign[trail.pop()] = 0

    def simplify(cls):
        # apply the assignment, propagate units to fixpoint; returns the
        # reduced clause list, or None on conflict
        while True:
            new = []
            found_unit = False
            for c in cls:
                un = []
                sat = False
                for lit in c:
                    v = assign[abs(lit)]
                    if v == 0:
                        un.append(lit)
                    elif (v > 0) == (lit > 0):
                        sat = True
                        break
                if sat:
                    continue
                if not un:
                    return None
                if len(un) == 1:
                    set_lit(un[0])
                    found_unit = True
                else:
                    new.append(un)
            if not found_unit:
                return new
            cls = new

    def rec(cls):
        nonlocal nodes
        nodes += 1
        if 0 <= budget < nodes:
            return BUDGET
        mark = len(trail)
        reduced = simplify(cls)
        if reduced is None:
            undo(mark)
            return UNSAT
        if not reduced:
            return SAT
        var = min(abs(lit) for c in reduced for lit in c)
        for sign in (1, -1):
            set_lit(var * sign)
            r = rec(reduced)
            if r != UNSAT:
                return r
            undo(len(trail) - 1)
        undo(mark)
        return UNSAT

    status = rec(list(clauses))
    model = [1 if v > 0 else 0 for v in assign]
    return status, model
