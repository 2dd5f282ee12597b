"""Causal DAGs: d-separation, back-door sets, surgery, and their categorical encodings."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import Any, Iterable, Mapping

from . import limits as _limits
from .fincat import FinCategory, Quiver, free_category, poset_category
from .setfun import SetFunctor
from .yoneda import hom_presheaf

__all__ = [
    "AlexandroffSpace",
    "CausalDag",
    "DagError",
    "alexandroff_space",
    "causal_presheaf",
    "d_separated",
    "dag_quiver",
    "intervene",
    "intervention_category",
    "is_backdoor_set",
    "is_continuous",
    "specialization_preorder",
]


class DagError(ValueError):
    pass


@dataclass(frozen=True)
class CausalDag:
    variables: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __init__(self, variables: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        variables = tuple(str(v) for v in variables)
        edges = frozenset((str(a), str(b)) for a, b in edges)
        if len(set(variables)) != len(variables):
            raise DagError("variable names must be unique")
        _limits.check("max_objects", len(variables), "DAG variables")
        known = set(variables)
        for a, b in edges:
            if a not in known or b not in known:
                raise DagError(f"edge ({a}, {b}) mentions an unknown variable")
            if a == b:
                raise DagError(f"self-loop on {a!r}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "edges", edges)
        try:
            TopologicalSorter({v: self.parents(v) for v in variables}).prepare()
        except CycleError as exc:
            raise DagError(f"graph has a directed cycle: {exc.args[1]}") from None
        rank = {v: i for i, v in enumerate(variables)}
        object.__setattr__(self, "_topo", _stable_topo(variables, edges, rank))

    def parents(self, v: str) -> tuple[str, ...]:
        return tuple(p for p in self.variables if (p, v) in self.edges)

    def children(self, v: str) -> tuple[str, ...]:
        return tuple(c for c in self.variables if (v, c) in self.edges)

    def topological_order(self) -> tuple[str, ...]:
        return self._topo  # type: ignore[attr-defined]

    def descendants(self, v: str) -> set[str]:
        seen: set[str] = set()
        stack = list(self.children(v))
        while stack:
            w = stack.pop()
            if w not in seen:
                seen.add(w)
                stack.extend(self.children(w))
        return seen

    def ancestors(self, v: str) -> set[str]:
        seen: set[str] = set()
        stack = list(self.parents(v))
        while stack:
            w = stack.pop()
            if w not in seen:
                seen.add(w)
                stack.extend(self.parents(w))
        return seen

    def sorted_edges(self) -> list[tuple[str, str]]:
        rank = {v: i for i, v in enumerate(self.variables)}
        return sorted(self.edges, key=lambda e: (rank[e[0]], rank[e[1]]))

    def to_json(self) -> dict:
        return {"variables": list(self.variables), "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> CausalDag:
        return cls(data["variables"], [tuple(e) for e in data.get("edges", [])])


def _stable_topo(variables, edges, rank) -> tuple[str, ...]:
    """Kahn's algorithm with ties broken by declaration order."""
    indeg = {v: 0 for v in variables}
    for _, b in edges:
        indeg[b] += 1
    ready = sorted((v for v in variables if indeg[v] == 0), key=rank.get)
    out = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        for a, b in edges:
            if a == v:
                indeg[b] -= 1
                if indeg[b] == 0:
                    ready.append(b)
        ready.sort(key=rank.get)
    return tuple(out)


def _check_sets(g: CausalDag, *sets: Iterable[str]) -> list[set[str]]:
    out = [set(s) for s in sets]
    known = set(g.variables)
    for s in out:
        unknown = s - known
        if unknown:
            raise DagError(f"unknown variable(s) {sorted(unknown)}")
    for a, b in itertools.combinations(out, 2):
        if a & b:
            raise DagError(f"variable sets overlap on {sorted(a & b)}")
    return out


def d_separated(g: CausalDag, x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()) -> bool:
    """Bayes-ball reachability: is every trail from ``x`` to ``y`` blocked by ``z``?"""
    xs, ys, zs = _check_sets(g, x, y, z)
    opened = set(zs)  # colliders that are observed or have an observed descendant
    for v in zs:
        opened |= g.ancestors(v)
    # direction "up": arrived from a child; "down": arrived from a parent
    queue = deque((v, "up") for v in xs)
    seen: set[tuple[str, str]] = set()
    while queue:
        v, direction = queue.popleft()
        if (v, direction) in seen:
            continue
        seen.add((v, direction))
        if v not in zs and v in ys:
            return False
        if direction == "up":
            if v in zs:
                continue
            queue.extend((p, "up") for p in g.parents(v))
            queue.extend((c, "down") for c in g.children(v))
        else:
            if v not in zs:
                queue.extend((c, "down") for c in g.children(v))
            if v in opened:
                queue.extend((p, "up") for p in g.parents(v))
    return True


def intervene(g: CausalDag, targets: Iterable[str]) -> CausalDag:
    """Delete every edge into a target."""
    (ts,) = _check_sets(g, targets)
    return CausalDag(g.variables, [(a, b) for a, b in g.edges if b not in ts])


def is_backdoor_set(g: CausalDag, x: str, y: str, z: Iterable[str]) -> bool:
    """No member of ``z`` descends from ``x``, and ``z`` blocks every path into ``x``."""
    if x == y:
        raise DagError("treatment and outcome must differ")
    (zs,) = _check_sets(g, z)
    if x in zs or y in zs:
        raise DagError("adjustment set must exclude treatment and outcome")
    _check_sets(g, {x}, {y})
    if zs & g.descendants(x):
        return False
    cut = CausalDag(g.variables, [(a, b) for a, b in g.edges if a != x])
    return d_separated(cut, {x}, {y}, zs)


def dag_quiver(g: CausalDag) -> Quiver:
    """Arrows labelled by parent and child names concatenated (``"AB"``)."""
    edges = g.sorted_edges()
    labels = [f"{a}{b}" for a, b in edges]
    if len(set(labels)) != len(labels) or set(labels) & {f"id_{v}" for v in g.variables}:
        labels = [f"{a}->{b}" for a, b in edges]
    return Quiver(g.variables, tuple((l, a, b) for l, (a, b) in zip(labels, edges)))


def causal_presheaf(g: CausalDag, x: str) -> SetFunctor:
    """All directed paths entering ``x`` as the presheaf ``Hom(-, x)`` of the path category."""
    return hom_presheaf(free_category(dag_quiver(g)), x)


@dataclass(frozen=True)
class AlexandroffSpace:
    points: tuple[str, ...]
    opens: tuple[tuple[str, ...], ...]

    def open_sets(self) -> set[frozenset[str]]:
        return {frozenset(o) for o in self.opens}

    def minimal_open(self, p: str) -> frozenset[str]:
        return frozenset.intersection(*(frozenset(o) for o in self.opens if p in o))

    def to_json(self) -> dict:
        return {"points": list(self.points), "opens": [list(o) for o in self.opens]}


def _canonical_opens(points: tuple[str, ...], family: Iterable[frozenset[str]]) -> tuple[tuple[str, ...], ...]:
    rank = {p: i for i, p in enumerate(points)}
    ordered = [tuple(sorted(o, key=rank.get)) for o in family]
    return tuple(sorted(ordered, key=lambda o: (len(o), [rank[p] for p in o])))


def alexandroff_space(g: CausalDag) -> AlexandroffSpace:
    """Opens generated by the descendant-closed sets ``{v} ∪ desc(v)``."""
    points = g.variables
    family = {frozenset(), frozenset(points)}
    family |= {frozenset({v} | g.descendants(v)) for v in points}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(family), 2):
            for new in (a | b, a & b):
                if new not in family:
                    family.add(new)
                    changed = True
    return AlexandroffSpace(points, _canonical_opens(points, family))


def specialization_preorder(s: AlexandroffSpace) -> set[tuple[str, str]]:
    """Pairs ``(p, q)`` with ``q`` in every open containing ``p``."""
    return {(p, q) for p in s.points for q in s.minimal_open(p)}


def is_continuous(f: Mapping[str, str], s: AlexandroffSpace, t: AlexandroffSpace) -> bool:
    if set(f) != set(s.points) or any(v not in t.points for v in f.values()):
        raise DagError("point map must be total from the source into the target")
    source_opens = s.open_sets()
    return all(
        frozenset(p for p in s.points if f[p] in o) in source_opens for o in t.open_sets()
    )


def intervention_category(g: CausalDag) -> FinCategory:
    """Intervention target sets ordered by inclusion.

    Objects are written ``"{A,B}"``; a morphism ``S -> S'`` for ``S ⊆ S'``
    performs the extra interventions.
    """
    n = len(g.variables)
    _limits.check("max_objects", 2**n, "intervention subsets")

    def name(subset: tuple[str, ...]) -> str:
        return "{" + ",".join(subset) + "}"

    subsets = [
        combo for k in range(n + 1) for combo in itertools.combinations(g.variables, k)
    ]
    leq = [
        (name(a), name(b))
        for a in subsets
        for b in subsets
        if a != b and set(a) <= set(b)
    ]
    _limits.check("max_morphisms", len(leq) + len(subsets), "intervention category")
    return poset_category([name(s) for s in subsets], leq)
