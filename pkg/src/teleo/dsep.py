"""Graphical separation queries (d-separation) on causal DAGs.

The blocking rules are the standard ones: chains and forks are blocked by
conditioning on the middle node, colliders are open only when the collider
or one of its descendants is conditioned on.  The query itself runs in a
small reachability kernel over an integer-indexed copy of the graph.

Two interchangeable kernels exist: a Cython extension (``teleo._dsep_c``)
and a pure-Python twin (``teleo._dsep_py``).  The compiled one is picked at
import time when present; set ``TELEO_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from array import array
from functools import lru_cache

from teleo.errors import UnknownVariableError
from teleo.model import CausalDag, IndependenceStatement

if os.environ.get("TELEO_PURE_PYTHON") == "1":
    from teleo import _dsep_py as _kernel
else:
    try:
        from teleo import _dsep_c as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from teleo import _dsep_py as _kernel

__all__ = ["d_separated", "kernel_backend"]


def kernel_backend() -> str:
    """Name of the reachability kernel in use: 'compiled' or 'pure'."""
    return "compiled" if _kernel.__name__.endswith("_dsep_c") else "pure"


@lru_cache(maxsize=512)
def _indexed(dag: CausalDag):
    """CSR parent/children encoding of a DAG, cached per graph."""
    index = {n: i for i, n in enumerate(dag.nodes)}
    n = len(dag.nodes)
    parents: list[list[int]] = [[] for _ in range(n)]
    children: list[list[int]] = [[] for _ in range(n)]
    for p, c in dag.edges:
        parents[index[c]].append(index[p])
        children[index[p]].append(index[c])

    def csr(adj: list[list[int]]) -> tuple[array, array]:
        indptr = array("i", [0])
        idx = array("i")
        for row in adj:
            idx.extend(row)
            indptr.append(len(idx))
        return indptr, idx

    par_indptr, par_idx = csr(parents)
    ch_indptr, ch_idx = csr(children)
    return index, par_indptr, par_idx, ch_indptr, ch_idx


def d_separated(dag: CausalDag, stmt: IndependenceStatement) -> bool:
    """True iff every trail between the two variables is blocked given Z."""
    index, par_indptr, par_idx, ch_indptr, ch_idx = _indexed(dag)
    for name in (stmt.x, stmt.y, *stmt.given):
        if name not in index:
            raise UnknownVariableError(f"unknown variable {name!r}")
    in_z = bytearray(len(dag.nodes))
    for name in stmt.given:
        in_z[index[name]] = 1
    reachable = _kernel.active_trail_reachable(
        len(dag.nodes),
        par_indptr,
        par_idx,
        ch_indptr,
        ch_idx,
        index[stmt.x],
        index[stmt.y],
        in_z,
    )
    return not reachable
