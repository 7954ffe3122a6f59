"""Discrete deterministic causal models and their possible-worlds semantics.

A model is a DAG over named variables with finite integer domains, plus one
deterministic mechanism (a total lookup table) per endogenous variable.
Exogenous variables range freely over their domains, so the set of worlds
consistent with the model is finite and enumerable: one world per combination
of exogenous values.

World tables carry a uniform weighting over their members.  All probability
comparisons are exact: independence is decided by integer cross
multiplication of counts, distributions are returned as Fractions.  There is
no tolerance anywhere in this module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping

from teleo.errors import (
    EmptyTableError,
    ModelStructureError,
    UnknownVariableError,
)

__all__ = [
    "Variable",
    "CausalDag",
    "Mechanism",
    "Scm",
    "World",
    "WorldTable",
    "IndependenceStatement",
    "enumerate_worlds",
    "uniform_independent",
    "conditional_distribution",
    "verify_mechanism_consistency",
]


def _check_identifier(name: str) -> None:
    if not name or not name.replace("_", "a").isalnum() or name[0].isdigit():
        raise ModelStructureError(f"invalid variable name {name!r}")


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered domain of integer levels."""

    name: str
    domain: tuple[int, ...]

    def __post_init__(self):
        _check_identifier(self.name)
        object.__setattr__(self, "domain", tuple(self.domain))
        if len(self.domain) < 2:
            raise ModelStructureError(
                f"variable {self.name}: domain must have at least 2 levels"
            )
        if any(b <= a for a, b in zip(self.domain, self.domain[1:])):
            raise ModelStructureError(
                f"variable {self.name}: domain levels must be strictly increasing"
            )


@dataclass(frozen=True)
class CausalDag:
    """Directed acyclic graph over variable names.

    ``nodes`` keeps declaration order, which fixes column order in every
    printed table.  Edges are kept in declaration order as well; equality and
    hashing use the tuples as given.
    """

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        seen = set()
        for n in self.nodes:
            if n in seen:
                raise ModelStructureError(f"duplicate node {n!r}")
            seen.add(n)
        edge_set = set()
        for parent, child in self.edges:
            if parent not in seen:
                raise ModelStructureError(f"edge endpoint {parent!r} is not a node")
            if child not in seen:
                raise ModelStructureError(f"edge endpoint {child!r} is not a node")
            if parent == child:
                raise ModelStructureError(f"self-loop on {parent!r}")
            if (parent, child) in edge_set:
                raise ModelStructureError(f"duplicate edge {parent!r} -> {child!r}")
            edge_set.add((parent, child))
        self.topological_order()  # raises on cycles

    def parents(self, node: str) -> tuple[str, ...]:
        """Parents of ``node`` in edge-declaration order."""
        self._require(node)
        return tuple(p for p, c in self.edges if c == node)

    def children(self, node: str) -> tuple[str, ...]:
        self._require(node)
        return tuple(c for p, c in self.edges if p == node)

    def descendants(self, node: str) -> tuple[str, ...]:
        """All strict descendants of ``node``, in declaration order."""
        self._require(node)
        reached: set[str] = set()
        frontier = [node]
        while frontier:
            v = frontier.pop()
            for c in self.children(v):
                if c not in reached:
                    reached.add(c)
                    frontier.append(c)
        return tuple(n for n in self.nodes if n in reached)

    def exogenous(self) -> tuple[str, ...]:
        children_of = {c for _, c in self.edges}
        return tuple(n for n in self.nodes if n not in children_of)

    def endogenous(self) -> tuple[str, ...]:
        children_of = {c for _, c in self.edges}
        return tuple(n for n in self.nodes if n in children_of)

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm with declaration-order tie breaking."""
        indegree = {n: 0 for n in self.nodes}
        for _, c in self.edges:
            indegree[c] += 1
        order: list[str] = []
        ready = {n for n in self.nodes if indegree[n] == 0}
        while ready:
            v = next(n for n in self.nodes if n in ready)
            ready.discard(v)
            order.append(v)
            for c in self.children(v):
                indegree[c] -= 1
                if indegree[c] == 0:
                    ready.add(c)
        if len(order) != len(self.nodes):
            stuck = sorted(n for n, d in indegree.items() if d > 0)
            raise ModelStructureError(f"graph has a cycle through {', '.join(stuck)}")
        return tuple(order)

    def _require(self, node: str) -> None:
        if node not in self.nodes:
            raise UnknownVariableError(f"unknown variable {node!r}")


@dataclass(frozen=True)
class Mechanism:
    """Deterministic assignment of a child from its parents.

    ``table`` maps each combination of parent levels (a tuple aligned with
    ``parents``) to a child level.  Totality over the parents' domains is
    validated when the mechanism is attached to a model.
    """

    child: str
    parents: tuple[str, ...]
    table: Mapping[tuple[int, ...], int]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self, "table", {tuple(k): v for k, v in dict(self.table).items()}
        )
        if not self.parents:
            raise ModelStructureError(
                f"mechanism for {self.child}: needs at least one parent"
            )

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        return self.table[tuple(assignment[p] for p in self.parents)]

    @classmethod
    def sum_of(cls, child: Variable, parents: Iterable[Variable]) -> "Mechanism":
        """Child takes the sum of its parents' values.

        The sum must land inside the child's domain for every combination;
        no clamping is applied.  Widen the child's domain instead.
        """
        parents = list(parents)
        table: dict[tuple[int, ...], int] = {}
        for combo in itertools.product(*(p.domain for p in parents)):
            total = sum(combo)
            if total not in child.domain:
                raise ModelStructureError(
                    f"mechanism for {child.name}: sum {total} of parent values "
                    f"{combo} is outside domain {child.domain}"
                )
            table[combo] = total
        return cls(child.name, tuple(p.name for p in parents), table)


@dataclass(frozen=True)
class Scm:
    """A causal DAG with one deterministic mechanism per endogenous node."""

    dag: CausalDag
    variables: tuple[Variable, ...]
    mechanisms: Mapping[str, Mechanism]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "mechanisms", dict(self.mechanisms))
        by_name = {v.name: v for v in self.variables}
        if len(by_name) != len(self.variables):
            raise ModelStructureError("duplicate variable declaration")
        if set(by_name) != set(self.dag.nodes):
            raise ModelStructureError("dag nodes and declared variables differ")
        for node in self.dag.nodes:
            parents = self.dag.parents(node)
            mech = self.mechanisms.get(node)
            if parents and mech is None:
                raise ModelStructureError(f"endogenous node {node} lacks a mechanism")
            if not parents and mech is not None:
                raise ModelStructureError(
                    f"exogenous node {node} must not carry a mechanism"
                )
            if mech is None:
                continue
            if mech.child != node:
                raise ModelStructureError(
                    f"mechanism filed under {node} drives {mech.child}"
                )
            if set(mech.parents) != set(parents):
                raise ModelStructureError(
                    f"mechanism parents {mech.parents} of {node} do not match "
                    f"dag parents {parents}"
                )
            self._check_total(mech, by_name)

    def _check_total(self, mech: Mechanism, by_name: Mapping[str, Variable]) -> None:
        expected = set(itertools.product(*(by_name[p].domain for p in mech.parents)))
        child_domain = by_name[mech.child].domain
        for combo in expected:
            if combo not in mech.table:
                raise ModelStructureError(
                    f"mechanism for {mech.child}: no entry for parent values {combo}"
                )
            out = mech.table[combo]
            if out not in child_domain:
                raise ModelStructureError(
                    f"mechanism for {mech.child}: output {out} for {combo} is "
                    f"outside domain {child_domain}"
                )
        extra = set(mech.table) - expected
        if extra:
            raise ModelStructureError(
                f"mechanism for {mech.child}: rows outside parent domains: {sorted(extra)}"
            )

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise UnknownVariableError(f"unknown variable {name!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def domain(self, name: str) -> tuple[int, ...]:
        return self.variable(name).domain


@dataclass(frozen=True)
class World:
    """A total assignment of one level to every model variable."""

    names: tuple[str, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.names) != len(self.values):
            raise ModelStructureError("world names and values differ in length")
        if len(set(self.names)) != len(self.names):
            raise ModelStructureError("world assigns a variable twice")

    def __getitem__(self, name: str) -> int:
        try:
            return self.values[self.names.index(name)]
        except ValueError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.names, self.values))

    def project(self, names: Iterable[str]) -> "World":
        names = tuple(names)
        return World(names, tuple(self[n] for n in names))

    def __str__(self) -> str:
        return "(" + ", ".join(f"{n}={v}" for n, v in zip(self.names, self.values)) + ")"


@dataclass(frozen=True)
class WorldTable:
    """An ordered, deduplicated set of worlds under uniform weighting.

    Worlds are stored sorted lexicographically by their value tuples in
    column (declaration) order, which makes every printed table reproducible.
    """

    columns: tuple[str, ...]
    worlds: tuple[World, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        for w in self.worlds:
            if w.names != self.columns:
                raise ModelStructureError(
                    f"world over {w.names} does not match table columns {self.columns}"
                )
        ordered = tuple(sorted(set(self.worlds), key=lambda w: w.values))
        object.__setattr__(self, "worlds", ordered)

    def __len__(self) -> int:
        return len(self.worlds)

    def __iter__(self) -> Iterator[World]:
        return iter(self.worlds)

    @property
    def world_set(self) -> frozenset[World]:
        return frozenset(self.worlds)

    def rows(self) -> list[tuple[int, ...]]:
        return [w.values for w in self.worlds]

    def filter(self, keep: Callable[[World], bool]) -> "WorldTable":
        return WorldTable(self.columns, tuple(w for w in self.worlds if keep(w)))

    def project(self, columns: Iterable[str]) -> "WorldTable":
        columns = tuple(columns)
        return WorldTable(columns, tuple(w.project(columns) for w in self.worlds))

    def distribution(self, query: str) -> dict[int, Fraction]:
        """Marginal distribution of one variable, exact Fractions."""
        if not self.worlds:
            raise EmptyTableError("distribution over an empty world table")
        counts: dict[int, int] = {}
        for w in self.worlds:
            counts[w[query]] = counts.get(w[query], 0) + 1
        n = len(self.worlds)
        return {level: Fraction(c, n) for level, c in sorted(counts.items())}


@dataclass(frozen=True)
class IndependenceStatement:
    """The claim that x and y are independent given a conditioning set."""

    x: str
    y: str
    given: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "given", frozenset(self.given))
        if self.x == self.y:
            raise ModelStructureError("independence statement needs two variables")
        if self.x in self.given or self.y in self.given:
            raise ModelStructureError(
                "conditioning set must not contain the tested variables"
            )

    def __str__(self) -> str:
        base = f"{self.x} and {self.y}"
        if self.given:
            return f"{base} given {', '.join(sorted(self.given))}"
        return base


def enumerate_worlds(scm: Scm) -> WorldTable:
    """All worlds consistent with the model.

    Every exogenous variable ranges over its full domain; endogenous values
    are propagated through the mechanisms in topological order.  The result
    has exactly one world per exogenous combination.
    """
    order = scm.dag.topological_order()
    exogenous = scm.dag.exogenous()
    exo_domains = [scm.domain(n) for n in exogenous]
    names = scm.names
    worlds = []
    for combo in itertools.product(*exo_domains):
        assignment = dict(zip(exogenous, combo))
        for node in order:
            if node in assignment:
                continue
            assignment[node] = scm.mechanisms[node].evaluate(assignment)
        worlds.append(World(names, tuple(assignment[n] for n in names)))
    return WorldTable(names, tuple(worlds))


def _strata(table: WorldTable, given: frozenset[str]) -> dict[tuple[int, ...], list[World]]:
    keys = tuple(sorted(given))
    out: dict[tuple[int, ...], list[World]] = {}
    for w in table:
        out.setdefault(tuple(w[k] for k in keys), []).append(w)
    return out


def _factorizes(worlds: list[World], x: str, y: str) -> bool:
    """Exact independence of x and y under uniform weight on ``worlds``.

    Uses integer cross multiplication: the joint factorizes iff
    n * count(x=a, y=b) == count(x=a) * count(y=b) for every cell.
    """
    n = len(worlds)
    joint: dict[tuple[int, int], int] = {}
    mx: dict[int, int] = {}
    my: dict[int, int] = {}
    for w in worlds:
        a, b = w[x], w[y]
        joint[(a, b)] = joint.get((a, b), 0) + 1
        mx[a] = mx.get(a, 0) + 1
        my[b] = my.get(b, 0) + 1
    for a in mx:
        for b in my:
            if n * joint.get((a, b), 0) != mx[a] * my[b]:
                return False
    return True


def uniform_independent(table: WorldTable, stmt: IndependenceStatement) -> bool:
    """Exact independence verdict under the uniform distribution.

    True iff, in every conditioning stratum present in the table, the joint
    distribution of the two tested variables factorizes into its marginals.
    Decided with integer arithmetic; there is no tolerance.
    """
    if not len(table):
        raise EmptyTableError("independence query on an empty world table")
    for name in (stmt.x, stmt.y, *stmt.given):
        if name not in table.columns:
            raise UnknownVariableError(f"unknown variable {name!r}")
    for worlds in _strata(table, stmt.given).values():
        if not _factorizes(worlds, stmt.x, stmt.y):
            return False
    return True


def conditional_distribution(
    table: WorldTable, query: str, given: Mapping[str, int]
) -> dict[int, Fraction]:
    """Distribution of ``query`` after filtering the table on observations."""
    sub = table.filter(lambda w: all(w[k] == v for k, v in given.items()))
    if not len(sub):
        raise EmptyTableError(f"no world matches observation {dict(given)}")
    return sub.distribution(query)


def verify_mechanism_consistency(scm: Scm, table: WorldTable) -> bool:
    """Re-evaluate every mechanism on every world; True when all agree."""
    for w in table:
        assignment = w.as_dict()
        for node, mech in scm.mechanisms.items():
            if mech.evaluate(assignment) != assignment[node]:
                return False
    return True
