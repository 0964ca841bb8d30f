# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled DPLL kernel. Same contract, branching order and node
accounting as _pure.solve; see that module for the semantics."""

from libc.stdlib cimport malloc, free

SAT, UNSAT, BUDGET = 1, 0, 2


def solve(int num_atoms, clauses, long budget=-1):
    cdef int nclauses = len(clauses)
    cdef int total = 0
    for c in clauses:
        total += len(c)

    cdef int* lits = <int*> malloc((total if total > 0 else 1) * sizeof(int))
    cdef int* cstart = <int*> malloc((nclauses + 1) * sizeof(int))
    cdef signed char* assign = <signed char*> malloc((num_atoms + 1) * sizeof(signed char))
    cdef int* trail = <int*> malloc((num_atoms + 1) * sizeof(int))
    cdef int* dec_var = <int*> malloc((num_atoms + 1) * sizeof(int))
    cdef signed char* dec_phase = <signed char*> malloc((num_atoms + 1) * sizeof(signed char))
    cdef int* dec_mark = <int*> malloc((num_atoms + 1) * sizeof(int))

    cdef int i, j, a, v, lit, pos, sat, nun, ulit, found_unit, conflict
    cdef int trail_len = 0, ndec = 0, best, mark, status
    cdef long nodes

    try:
        pos = 0
        for i in range(nclauses):
            cstart[i] = pos
            for l in clauses[i]:
                lits[pos] = l
                pos += 1
        cstart[nclauses] = pos
        for i in range(num_atoms + 1):
            assign[i] = 0

        status = -1
        nodes = 1
        if 0 <= budget < nodes:
            status = BUDGET

        while status < 0:
            # propagate units to fixpoint
            conflict = 0
            while True:
                found_unit = 0
                for i in range(nclauses):
                    sat = 0
                    nun = 0
                    ulit = 0
                    for j in range(cstart[i], cstart[i + 1]):
                        lit = lits[j]
                        a = lit if lit > 0 else -lit
                        v = assign[a]
                        if v == 0:
                            nun += 1
                            ulit = lit
                        elif (v > 0) == (lit > 0):
                            sat = 1
                            break
                    if sat:
                        continue
                    if nun == 0:
                        conflict = 1
                        break
                    if nun == 1:
                        a = ulit if ulit > 0 else -ulit
                        assign[a] = 1 if ulit > 0 else -1
                        trail[trail_len] = a
                        trail_len += 1
                        found_unit = 1
                if conflict or not found_unit:
                    break

            if conflict:
                while True:
                    if ndec == 0:
                        status = UNSAT
                        break
                    mark = dec_mark[ndec - 1]
                    while trail_len > mark:
                        trail_len -= 1
                        assign[trail[trail_len]] = 0
                    if dec_phase[ndec - 1] == 0:
                        nodes += 1
                        if 0 <= budget < nodes:
                            status = BUDGET
                            break
                        dec_phase[ndec - 1] = 1
                        a = dec_var[ndec - 1]
                        assign[a] = -1
                        trail[trail_len] = a
                        trail_len += 1
                        break
                    ndec -= 1
                continue

            # all clauses satisfied, or branch on the lowest open atom
            best = 0
            for i in range(nclauses):
                sat = 0
                for j in range(cstart[i], cstart[i + 1]):
                    lit = lits[j]
                    a = lit if lit > 0 else -lit
                    v = assign[a]
                    if v != 0 and (v > 0) == (lit > 0):
                        sat = 1
                        break
                if sat:
                    continue
                for j in range(cstart[i], cstart[i + 1]):
                    lit = lits[j]
                    a = lit if lit > 0 else -lit
                    if assign[a] == 0 and (best == 0 or a < best):
                        best = a
            if best == 0:
                status = SAT
                continue
            nodes += 1
            if 0 <= budget < nodes:
                status = BUDGET
                continue
            dec_var[ndec] = best
            dec_phase[ndec] = 0
            dec_mark[ndec] = trail_len
            ndec += 1
            assign[best] = 1
            trail[trail_len] = best
            trail_len += 1

        model = [1 if assign[i] > 0 else 0 for i in range(num_atoms + 1)]
        return status, model
    finally:
        free(lits)
        free(cstart)
        free(assign)
        free(trail)
        free(dec_var)
        free(dec_phase)
        free(dec_mark)
