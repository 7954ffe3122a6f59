"""Pure-Python twin of the compiled active-trail reachability kernel.

Same call signature and semantics as ``teleo._dsep_c.active_trail_reachable``;
this is the fallback selected at import time when the extension is missing.
"""

from __future__ import annotations


def active_trail_reachable(n, par_indptr, par_idx, ch_indptr, ch_idx, x, y, in_z):
    """True iff an active trail connects node x to node y given the set Z.

    The graph comes CSR-encoded: ``par_idx[par_indptr[v]:par_indptr[v+1]]``
    are the parents of v, likewise for children.  ``in_z`` is a byte flag per
    node.  Standard two-phase reachability: mark ancestors of Z, then walk
    (node, direction) states, where direction records whether v was entered
    from a child (0, "up") or from a parent (1, "down").
    """
    # phase 1: nodes in Z or with a descendant in Z
    anc = bytearray(n)
    stack = [v for v in range(n) if in_z[v]]
    for v in stack:
        anc[v] = 1
    while stack:
        v = stack.pop()
        for i in range(par_indptr[v], par_indptr[v + 1]):
            p = par_idx[i]
            if not anc[p]:
                anc[p] = 1
                stack.append(p)

    # phase 2: walk active-trail states from x
    UP, DOWN = 0, 1
    seen = bytearray(2 * n)
    todo = [(x, UP)]
    seen[2 * x + UP] = 1
    while todo:
        v, d = todo.pop()
        if v == y:
            return True
        if d == UP:
            if in_z[v]:
                continue  # chain/fork through an observed node is blocked
            for i in range(par_indptr[v], par_indptr[v + 1]):
                p = par_idx[i]
                if not seen[2 * p + UP]:
                    seen[2 * p + UP] = 1
                    todo.append((p, UP))
            for i in range(ch_indptr[v], ch_indptr[v + 1]):
                c = ch_idx[i]
                if not seen[2 * c + DOWN]:
                    seen[2 * c + DOWN] = 1
                    todo.append((c, DOWN))
        else:
            if not in_z[v]:
                for i in range(ch_indptr[v], ch_indptr[v + 1]):
                    c = ch_idx[i]
                    if not seen[2 * c + DOWN]:
                        seen[2 * c + DOWN] = 1
                        todo.append((c, DOWN))
            if anc[v]:
                # collider at v opens when v is observed or has an observed
                # descendant
                for i in range(par_indptr[v], par_indptr[v + 1]):
                    p = par_idx[i]
                    if not seen[2 * p + UP]:
                        seen[2 * p + UP] = 1
                        todo.append((p, UP))
    return False
