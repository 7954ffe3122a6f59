# cython: boundscheck=False, wraparound=False
"""Compiled active-trail reachability kernel.

Twin of teleo._dsep_py.active_trail_reachable; see that module for the
algorithm description.  Buffers arrive as array('i') / bytearray objects.
"""

from libc.stdlib cimport free, malloc


def active_trail_reachable(int n,
                           int[:] par_indptr, int[:] par_idx,
                           int[:] ch_indptr, int[:] ch_idx,
                           int x, int y,
                           const unsigned char[:] in_z):
    cdef char *anc = <char *> malloc(n)
    cdef char *seen = <char *> malloc(2 * n)
    # each (node, direction) state enters the stack at most once
    cdef int *stack = <int *> malloc(2 * n * sizeof(int))
    if anc == NULL or seen == NULL or stack == NULL:
        free(anc); free(seen); free(stack)
        raise MemoryError()

    cdef int i, v, p, c, d, sp
    cdef bint found = False
    try:
        for v in range(n):
            anc[v] = 1 if in_z[v] else 0
            seen[2 * v] = 0
            seen[2 * v + 1] = 0

        # phase 1: ancestors of Z (including Z itself)
        sp = 0
        for v in range(n):
            if in_z[v]:
                stack[sp] = v
                sp += 1
        while sp > 0:
            sp -= 1
            v = stack[sp]
            for i in range(par_indptr[v], par_indptr[v + 1]):
                p = par_idx[i]
                if not anc[p]:
                    anc[p] = 1
                    stack[sp] = p
                    sp += 1

        # phase 2: (node, direction) walk; direction 0 = entered from a
        # child ("up"), 1 = entered from a parent ("down")
        sp = 0
        stack[sp] = 2 * x  # (x, up)
        sp += 1
        seen[2 * x] = 1
        while sp > 0 and not found:
            sp -= 1
            v = stack[sp] >> 1
            d = stack[sp] & 1
            if v == y:
                found = True
                break
            if d == 0:
                if in_z[v]:
                    continue
                for i in range(par_indptr[v], par_indptr[v + 1]):
                    p = par_idx[i]
                    if not seen[2 * p]:
                        seen[2 * p] = 1
                        stack[sp] = 2 * p
                        sp += 1
                for i in range(ch_indptr[v], ch_indptr[v + 1]):
                    c = ch_idx[i]
                    if not seen[2 * c + 1]:
                        seen[2 * c + 1] = 1
                        stack[sp] = 2 * c + 1
                        sp += 1
            else:
                if not in_z[v]:
                    for i in range(ch_indptr[v], ch_indptr[v + 1]):
                        c = ch_idx[i]
                        if not seen[2 * c + 1]:
                            seen[2 * c + 1] = 1
                            stack[sp] = 2 * c + 1
                            sp += 1
                if anc[v]:
                    for i in range(par_indptr[v], par_indptr[v + 1]):
                        p = par_idx[i]
                        if not seen[2 * p]:
                            seen[2 * p] = 1
                            stack[sp] = 2 * p
                            sp += 1
    finally:
        free(anc)
        free(seen)
        free(stack)
    return found
