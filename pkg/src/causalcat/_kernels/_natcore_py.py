"""Pure-Python backtracking solver for naturality constraints.

Variables are numbered ``0..n-1`` and take values in ``range(domains[v])``.
Constraint ``c`` (listed under the variable ``v`` at which it becomes
checkable, via ``cptr[v]:cptr[v+1]``) demands::

    val[ctgt[c]] == tables[coff[c] + val[csrc[c]]]

Solutions are produced in lexicographic order of the value vector. At most
``max_solutions + 1`` are collected so callers can detect overflow.
"""
import numpy as np


def solve(domains, cptr, csrc, ctgt, coff, tables, max_solutions):
    n = len(domains)
    domains = [int(d) for d in domains]
    cptr = [int(x) for x in cptr]
    csrc = [int(x) for x in csrc]
    ctgt = [int(x) for x in ctgt]
    coff = [int(x) for x in coff]
    tables = [int(x) for x in tables]
    if n == 0:
        return np.zeros((1, 0), dtype=np.int32)
    val = [-1] * n
    sols = []
    last = n - 1
    v = 0
    while v >= 0:
        val[v] += 1
        if val[v] >= domains[v]:
            val[v] = -1
            v -= 1
            continue
        ok = True
        for c in range(cptr[v], cptr[v + 1]):
            if val[ctgt[c]] != tables[coff[c] + val[csrc[c]]]:
                ok = False
                break
        if not ok:
            continue
        if v == last:
            sols.append(tuple(val))
            if len(sols) > max_solutions:
                break
        else:
            v += 1
    out = np.array(sols, dtype=np.int32)
    return out.reshape(len(sols), n)
