"""Shared test helpers: reference oracles and randomized model builders.

The d-separation oracle here is deliberately naive and independent of the
library's reachability kernel: it enumerates every simple trail and applies
the chain/fork/collider blocking rules trail by trail.
"""

from __future__ import annotations

import itertools
import random

from teleo.model import (
    CausalDag,
    IndependenceStatement,
    Mechanism,
    Scm,
    Variable,
    enumerate_worlds,
)
from teleo.errors import TeleologyError
from teleo.intervention import do_surgery
from teleo.teleology import Comparison, GoalPredicate, build_final_model

NAMES = tuple("ABCDEFGH")


def dsep_oracle(dag: CausalDag, stmt: IndependenceStatement) -> bool:
    """Brute-force d-separation: every simple trail must be blocked."""
    z = set(stmt.given)
    edge_set = set(dag.edges)

    ancestors_of_z = set(z)
    frontier = list(z)
    while frontier:
        v = frontier.pop()
        for p in dag.parents(v):
            if p not in ancestors_of_z:
                ancestors_of_z.add(p)
                frontier.append(p)

    neighbors = {n: set() for n in dag.nodes}
    for p, c in dag.edges:
        neighbors[p].add(c)
        neighbors[c].add(p)

    trails: list[list[str]] = []

    def dfs(node: str, path: list[str], seen: set[str]) -> None:
        if node == stmt.y:
            trails.append(list(path))
            return
        for nb in sorted(neighbors[node]):
            if nb not in seen:
                seen.add(nb)
                path.append(nb)
                dfs(nb, path, seen)
                path.pop()
                seen.discard(nb)

    dfs(stmt.x, [stmt.x], {stmt.x})

    def active(trail: list[str]) -> bool:
        for i in range(1, len(trail) - 1):
            prev, v, nxt = trail[i - 1], trail[i], trail[i + 1]
            collider = (prev, v) in edge_set and (nxt, v) in edge_set
            if collider:
                if v not in ancestors_of_z:
                    return False
            elif v in z:
                return False
        return True

    return not any(active(t) for t in trails)


def all_statements(dag: CausalDag, max_given: int | None = None):
    """Every (x, y, Z) query over the DAG's nodes."""
    nodes = dag.nodes
    for x, y in itertools.combinations(nodes, 2):
        rest = [n for n in nodes if n not in (x, y)]
        limit = len(rest) if max_given is None else min(max_given, len(rest))
        for k in range(limit + 1):
            for given in itertools.combinations(rest, k):
                yield IndependenceStatement(x, y, frozenset(given))


def random_dag(rng: random.Random, n_nodes: int, edge_prob: float = 0.5) -> CausalDag:
    names = NAMES[:n_nodes]
    order = list(names)
    rng.shuffle(order)
    edges = []
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < edge_prob:
                edges.append((order[i], order[j]))
    return CausalDag(names, tuple(edges))


def random_scm(
    rng: random.Random,
    max_vars: int = 5,
    max_levels: int = 3,
    edge_prob: float = 0.5,
) -> Scm:
    n = rng.randint(2, max_vars)
    dag = random_dag(rng, n, edge_prob)
    variables = tuple(
        Variable(name, tuple(range(rng.randint(2, max_levels)))) for name in dag.nodes
    )
    domains = {v.name: v.domain for v in variables}
    mechanisms = {}
    for node in dag.nodes:
        parents = dag.parents(node)
        if not parents:
            continue
        table = {
            combo: rng.choice(domains[node])
            for combo in itertools.product(*(domains[p] for p in parents))
        }
        mechanisms[node] = Mechanism(node, parents, table)
    return Scm(dag, variables, mechanisms)


def random_goal(rng: random.Random, scm: Scm, variables: tuple[str, ...]) -> GoalPredicate:
    """A satisfiable random conjunction over the given variables."""
    picked = rng.sample(variables, rng.randint(1, len(variables)))
    conjuncts = []
    for var in picked:
        domain = scm.domain(var)
        # anchor the constraint on a level that exists, so satisfiability
        # never needs a retry loop (domains always have a second level for !=)
        level = rng.choice(domain)
        op = rng.choice(["=", "<=", ">=", "!="])
        conjuncts.append(Comparison(var, op, level))
    goal = GoalPredicate(tuple(conjuncts))
    goal.validate(scm)
    return goal


def random_final(rng: random.Random, scm: Scm):
    """A random final model over a target that has descendants.

    Effects are drawn from the target's direct children; reversal can still
    close a cycle through a longer path, in which case None is returned
    (the construction error is the library's documented behaviour).
    """
    targets = [n for n in scm.dag.nodes if scm.dag.children(n)]
    if not targets:
        return None
    target = rng.choice(targets)
    m = do_surgery(scm, target)
    children = scm.dag.children(target)
    effects = tuple(rng.sample(children, rng.randint(1, len(children))))
    goal = random_goal(rng, scm, effects)
    try:
        return build_final_model(m, effects, goal)
    except TeleologyError:
        return None


def m1_scm() -> Scm:
    """The four-variable room model used throughout the golden tests."""
    w = Variable("W", (0, 1))
    h = Variable("H", (0, 1))
    t = Variable("T", (0, 1, 2))
    b = Variable("B", (0, 1))
    dag = CausalDag(("W", "H", "T", "B"), (("W", "T"), ("H", "T"), ("H", "B")))
    mechanisms = {
        "T": Mechanism.sum_of(t, (w, h)),
        "B": Mechanism.sum_of(b, (h,)),
    }
    return Scm(dag, (w, h, t, b), mechanisms)


def value_sets(table) -> set[tuple[int, ...]]:
    return {w.values for w in table}


def chain_scm() -> Scm:
    """X -> Y -> Z with identity mechanisms, all binary."""
    x = Variable("X", (0, 1))
    y = Variable("Y", (0, 1))
    z = Variable("Z", (0, 1))
    dag = CausalDag(("X", "Y", "Z"), (("X", "Y"), ("Y", "Z")))
    mechanisms = {
        "Y": Mechanism("Y", ("X",), {(0,): 0, (1,): 1}),
        "Z": Mechanism("Z", ("Y",), {(0,): 0, (1,): 1}),
    }
    return Scm(dag, (x, y, z), mechanisms)


__all__ = [
    "dsep_oracle",
    "all_statements",
    "random_dag",
    "random_scm",
    "random_goal",
    "random_final",
    "m1_scm",
    "chain_scm",
    "value_sets",
    "enumerate_worlds",
]
