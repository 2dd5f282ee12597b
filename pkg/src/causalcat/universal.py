"""Limits and colimits of finite diagrams.

Set-valued diagrams are computed exactly: limits as compatible tuples,
colimits as a quotient of the disjoint union. Inside a finite category the
(co)limit is found by enumerating every (co)cone and testing the universal
property against all of them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .fincat import CategoryError, FinCategory, Functor, Quiver, discrete_category, free_category
from .setfun import CO, SetFunctor, enumerate_nats, presheaf_terminal

__all__ = [
    "ConeResult",
    "Diagram",
    "DiagramError",
    "UnionFind",
    "colimit_in_category",
    "colimit_of_set_diagram",
    "constant_set_functor",
    "limit_in_category",
    "limit_of_set_diagram",
    "shape_diagram",
]

# brute-force mediator counting is skipped above this many candidate maps
_BRUTE_MEDIATOR_LIMIT = 4096


class DiagramError(ValueError):
    pass


class UnionFind:
    def __init__(self, items=()):
        self._parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:
            self._parent[x], x = root, self._parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller key as root so roots are canonical
            if rb < ra:
                ra, rb = rb, ra
            self._parent[rb] = ra

    def classes(self) -> dict:
        out: dict = {}
        for x in self._parent:
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass(frozen=True)
class Diagram:
    """A functor from an index category: into finite sets or into a FinCategory."""

    index: FinCategory
    body: SetFunctor | Functor

    def __post_init__(self):
        if isinstance(self.body, SetFunctor):
            if not self.body.covariant:
                raise DiagramError("set-valued diagrams are covariant functors")
            if self.body.base != self.index:
                raise DiagramError("diagram body is not defined on the index category")
        elif isinstance(self.body, Functor):
            if self.body.source != self.index:
                raise DiagramError("diagram body is not defined on the index category")
        else:
            raise DiagramError("diagram body must be a SetFunctor or a Functor")

    @property
    def into_sets(self) -> bool:
        return isinstance(self.body, SetFunctor)

    @property
    def target(self) -> str | FinCategory:
        return "set" if self.into_sets else self.body.target

    def to_json(self) -> dict:
        if self.into_sets:
            body = self.body.to_json(include_category=False)
            return {"index": self.index.to_json(), "on_objects": body["on_objects"],
                    "on_morphisms": body["on_morphisms"], "target": "set"}
        return {
            "index": self.index.to_json(),
            "on_objects": dict(self.body.on_objects),
            "on_morphisms": dict(self.body.on_morphisms),
            "target": self.body.target.to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Diagram:
        index = FinCategory.from_json(data["index"])
        target = data.get("target", "set")
        if target == "set":
            return cls(index, SetFunctor(index, CO, data["on_objects"], data.get("on_morphisms", {})))
        tgt = FinCategory.from_json(target)
        on_objects = {str(k): str(v) for k, v in data["on_objects"].items()}
        on_morphisms = {str(k): str(v) for k, v in data.get("on_morphisms", {}).items()}
        for x in index.objects:
            on_morphisms.setdefault(index.id(x), tgt.id(on_objects[x]))
        return cls(index, Functor(index, tgt, on_objects, on_morphisms))


@dataclass(frozen=True)
class ConeResult:
    """A (co)limit cone.

    For set diagrams ``apex`` is the tuple of apex elements and each leg is a
    function (dict); inside a category ``apex`` is an object and legs are
    morphism names. ``mediators`` pairs each competitor cone that was tested
    with its unique factoring map.
    """

    kind: str
    apex: Any
    legs: Mapping[str, Any]
    mediators: tuple[tuple[Any, Any], ...] = field(default=())
    competitors_checked: int = 0

    @property
    def size(self) -> int:
        return len(self.apex)

    def to_json(self) -> dict:
        apex = list(self.apex) if isinstance(self.apex, tuple) else self.apex
        legs = {k: dict(v) if isinstance(v, Mapping) else v for k, v in self.legs.items()}
        return {"kind": self.kind, "apex": apex, "legs": legs, "competitors_checked": self.competitors_checked}


def constant_set_functor(index: FinCategory, elements: Sequence[str]) -> SetFunctor:
    elements = list(elements)
    return SetFunctor(
        index,
        CO,
        {x: elements for x in index.objects},
        {f: {e: e for e in elements} for f in index.morphism_names},
    )


def _tuple_name(parts: Sequence[str]) -> str:
    return "(" + ",".join(parts) + ")"


def limit_of_set_diagram(d: Diagram, *, verify_up_to: int = 2) -> ConeResult:
    """Limit of a finite set diagram as the set of compatible tuples.

    The universal property is checked against every cone whose apex has at
    most ``verify_up_to`` elements.
    """
    if not d.into_sets:
        raise DiagramError("limit_of_set_diagram needs a set-valued diagram")
    body, J = d.body, d.index
    points = enumerate_nats(presheaf_terminal(J, CO), body)
    apex_tuples = [tuple(p[j]["*"] for j in J.objects) for p in points]
    names = [_tuple_name(t) for t in apex_tuples]
    if len(set(names)) != len(names):
        raise DiagramError("limit element names collide")
    legs = {j: {n: t[i] for n, t in zip(names, apex_tuples)} for i, j in enumerate(J.objects)}
    by_tuple = dict(zip(apex_tuples, names))

    mediators = []
    checked = 0
    for k in range(1, verify_up_to + 1):
        S = [f"s{i}" for i in range(k)]
        for cone in enumerate_nats(constant_set_functor(J, S), body):
            checked += 1
            u = {s: by_tuple.get(tuple(cone[j][s] for j in J.objects)) for s in S}
            if any(v is None for v in u.values()):
                raise AssertionError("cone does not factor through the computed limit")
            if len(names) ** k <= _BRUTE_MEDIATOR_LIMIT:
                count = sum(
                    all(legs[j][v[i]] == cone[j][s] for j in J.objects for i, s in enumerate(S))
                    for v in itertools.product(names, repeat=k)
                )
                if count != 1:
                    raise AssertionError(f"cone factors {count} times through the limit")
            mediators.append(({j: dict(cone[j]) for j in J.objects}, u))
    return ConeResult("limit", tuple(names), legs, tuple(mediators), checked)


def colimit_of_set_diagram(d: Diagram, *, verify_up_to: int = 2) -> ConeResult:
    """Colimit of a finite set diagram: disjoint union modulo ``x ~ F(f)(x)``.

    Elements of the disjoint union are named ``"j:x"``; each class is named by
    its lexicographically least member.
    """
    if not d.into_sets:
        raise DiagramError("colimit_of_set_diagram needs a set-valued diagram")
    body, J = d.body, d.index
    tag = {(j, e): f"{j}:{e}" for j in J.objects for e in body.elements(j)}
    if len(set(tag.values())) != len(tag):
        raise DiagramError("disjoint-union element names collide")
    uf = UnionFind(tag.values())
    for m in J.morphisms:
        act = body.action(m.name)
        for e, e2 in act.items():
            uf.union(tag[(m.dom, e)], tag[(m.cod, e2)])
    rep = {t: min(members) for members in uf.classes().values() for t in members}
    apex = tuple(sorted(set(rep.values())))
    legs = {j: {e: rep[tag[(j, e)]] for e in body.elements(j)} for j in J.objects}

    mediators = []
    checked = 0
    for k in range(1, verify_up_to + 1):
        S = [f"s{i}" for i in range(k)]
        for cocone in enumerate_nats(body, constant_set_functor(J, S)):
            checked += 1
            u: dict[str, str] = {}
            for j in J.objects:
                for e, a in legs[j].items():
                    if u.setdefault(a, cocone[j][e]) != cocone[j][e]:
                        raise AssertionError("cocone does not factor through the computed colimit")
            if len(u) != len(apex):
                raise AssertionError("colimit legs are not jointly surjective")
            if len(S) ** len(apex) <= _BRUTE_MEDIATOR_LIMIT:
                count = sum(
                    all(
                        v[apex.index(legs[j][e])] == cocone[j][e]
                        for j in J.objects
                        for e in body.elements(j)
                    )
                    for v in itertools.product(S, repeat=len(apex))
                )
                if count != 1:
                    raise AssertionError(f"cocone factors {count} times through the colimit")
            mediators.append(({j: dict(cocone[j]) for j in J.objects}, u))
    return ConeResult("colimit", apex, legs, tuple(mediators), checked)


def _hom_from(c: FinCategory, d: Diagram, a: str) -> SetFunctor:
    """``j -> Hom(a, D j)`` as a covariant set functor on the index."""
    F = d.body
    J = d.index
    return SetFunctor(
        J,
        CO,
        {j: c.hom(a, F.ob(j)) for j in J.objects},
        {
            m.name: {g: c.compose(F.mor(m.name), g) for g in c.hom(a, F.ob(m.dom))}
            for m in J.morphisms
        },
    )


def limit_in_category(c: FinCategory, d: Diagram) -> ConeResult | None:
    """Limit of ``d: J -> c`` by exhaustive cone enumeration, or ``None``.

    Among isomorphic limit apexes the first in declaration order wins.
    """
    if d.into_sets or d.body.target != c:
        raise DiagramError("limit_in_category needs a diagram into the given category")
    J = d.index
    one = presheaf_terminal(J, CO)
    cones = []
    for a in c.objects:
        for eta in enumerate_nats(one, _hom_from(c, d, a)):
            cones.append((a, {j: eta[j]["*"] for j in J.objects}))

    for apex, legs in cones:
        mediators = []
        for other, other_legs in cones:
            factors = [
                u
                for u in c.hom(other, apex)
                if all(c.compose(legs[j], u) == other_legs[j] for j in J.objects)
            ]
            if len(factors) != 1:
                break
            mediators.append(((other, other_legs), factors[0]))
        else:
            return ConeResult("limit", apex, legs, tuple(mediators), len(cones))
    return None


def colimit_in_category(c: FinCategory, d: Diagram) -> ConeResult | None:
    """Colimit computed as a limit in the opposite category."""
    if d.into_sets or d.body.target != c:
        raise DiagramError("colimit_in_category needs a diagram into the given category")
    res = limit_in_category(c.opposite(), Diagram(d.index.opposite(), d.body.op()))
    if res is None:
        return None
    return ConeResult("colimit", res.apex, res.legs, res.mediators, res.competitors_checked)


_SHAPES = ("product", "coproduct", "pullback", "pushout", "equalizer", "coequalizer")


def _span_index(kind: str) -> FinCategory:
    if kind == "pullback":
        q = Quiver(("X", "Z", "Y"), (("f", "X", "Z"), ("g", "Y", "Z")))
    elif kind == "pushout":
        q = Quiver(("X", "Z", "Y"), (("f", "Z", "X"), ("g", "Z", "Y")))
    else:
        q = Quiver(("X", "Y"), (("f", "X", "Y"), ("g", "X", "Y")))
    return free_category(q)


def shape_diagram(kind: str, data: Any, target: FinCategory | None = None) -> Diagram:
    """Build the index category and body for a named (co)limit shape.

    For sets (``target is None``): ``product``/``coproduct`` take a list of
    element lists; ``pullback`` takes ``{"X","Y","Z","f","g"}`` with
    ``f: X -> Z``, ``g: Y -> Z``; ``pushout`` has ``f: Z -> X``, ``g: Z -> Y``;
    ``equalizer``/``coequalizer`` take ``f, g: X -> Y``. Inside a category the
    same keys name objects and morphisms of ``target``.
    """
    if kind not in _SHAPES:
        raise DiagramError(f"unknown shape {kind!r}")
    if kind in ("product", "coproduct"):
        items = list(data)
        index = discrete_category([str(i) for i in range(len(items))])
        if target is None:
            return Diagram(index, SetFunctor(index, CO, {str(i): s for i, s in enumerate(items)}))
        return Diagram(
            index,
            Functor(
                index,
                target,
                {str(i): x for i, x in enumerate(items)},
                {index.id(str(i)): target.id(x) for i, x in enumerate(items)},
            ),
        )

    if not isinstance(data, Mapping) or "f" not in data or "g" not in data:
        raise DiagramError(f"{kind} needs two maps 'f' and 'g'")
    index = _span_index(kind)
    if target is None:
        needed = ("X", "Y", "Z") if kind in ("pullback", "pushout") else ("X", "Y")
        missing = [k for k in needed if k not in data]
        if missing:
            raise DiagramError(f"{kind} over sets needs the sets {missing}")
        sets = {k: list(data[k]) for k in needed}
        try:
            body = SetFunctor(index, CO, sets, {"f": data["f"], "g": data["g"]})
        except ValueError as exc:
            raise DiagramError(f"{kind} data does not match the shape: {exc}") from None
        return Diagram(index, body)

    f, g = target.morphism(data["f"]), target.morphism(data["g"])
    if kind == "pullback":
        if f.cod != g.cod:
            raise DiagramError("pullback maps must share a codomain")
        objs = {"X": f.dom, "Y": g.dom, "Z": f.cod}
    elif kind == "pushout":
        if f.dom != g.dom:
            raise DiagramError("pushout maps must share a domain")
        objs = {"X": f.cod, "Y": g.cod, "Z": f.dom}
    else:
        if (f.dom, f.cod) != (g.dom, g.cod):
            raise DiagramError(f"{kind} maps must be parallel")
        objs = {"X": f.dom, "Y": f.cod}
    mors = {index.id(x): target.id(objs[x]) for x in index.objects}
    mors.update({"f": f.name, "g": g.name})
    try:
        return Diagram(index, Functor(index, target, objs, mors))
    except CategoryError as exc:
        raise DiagramError(str(exc)) from None
