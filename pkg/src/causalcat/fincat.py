"""Explicit finite categories.

A :class:`FinCategory` stores its objects, its morphisms (name, domain,
codomain), the identity of every object and a total composition table keyed
by ``(g, f) -> g∘f``. Everything is identified by strings so categories can be
compared exactly and written to JSON.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

from . import limits as _limits

__all__ = [
    "CategoryError",
    "FinCategory",
    "Functor",
    "Morphism",
    "Quiver",
    "ValidationReport",
    "comma_category",
    "comma_object_name",
    "compose_functors",
    "constant_functor",
    "discrete_category",
    "free_category",
    "full_subcategory",
    "identity_functor",
    "opposite",
    "poset_category",
    "terminal_category",
    "to_terminal",
    "validate_category",
]


class CategoryError(ValueError):
    pass


@dataclass(frozen=True)
class Morphism:
    name: str
    dom: str
    cod: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations)}


def _category_violations(
    objects: Sequence[str],
    morphisms: Sequence[Morphism],
    identities: Mapping[str, str],
    compose: Mapping[tuple[str, str], str],
) -> list[str]:
    out: list[str] = []
    seen: set[str] = set()
    for x in objects:
        if x in seen:
            out.append(f"duplicate object {x!r}")
        seen.add(x)
    by_name: dict[str, Morphism] = {}
    for m in morphisms:
        if m.name in by_name:
            out.append(f"duplicate morphism {m.name!r}")
        by_name[m.name] = m
        for end in (m.dom, m.cod):
            if end not in seen:
                out.append(f"morphism {m.name!r} has undeclared endpoint {end!r}")
    if out:
        return out

    for x in objects:
        i = identities.get(x)
        if i is None:
            out.append(f"object {x!r} has no identity")
        elif i not in by_name:
            out.append(f"identity {i!r} of {x!r} is not a declared morphism")
        elif by_name[i].dom != x or by_name[i].cod != x:
            out.append(f"identity {i!r} of {x!r} is not an endomorphism of {x!r}")
    for x in identities:
        if x not in seen:
            out.append(f"identity declared for undeclared object {x!r}")
    if out:
        return out

    for (g, f), gf in compose.items():
        if g not in by_name or f not in by_name:
            out.append(f"composite entry ({g}, {f}) names an undeclared morphism")
        elif by_name[f].cod != by_name[g].dom:
            out.append(f"composite given for non-composable pair ({g}, {f})")
        elif gf not in by_name:
            out.append(f"composite ({g}, {f}) -> {gf!r} is not a declared morphism")
        elif by_name[gf].dom != by_name[f].dom or by_name[gf].cod != by_name[g].cod:
            out.append(f"composite ({g}, {f}) -> {gf!r} has wrong endpoints")
    if out:
        return out

    outgoing: dict[str, list[Morphism]] = {x: [] for x in objects}
    for m in morphisms:
        outgoing[m.dom].append(m)
    for f in morphisms:
        for g in outgoing[f.cod]:
            if (g.name, f.name) not in compose:
                out.append(f"missing composite for ({g.name}, {f.name})")
    if out:
        return out

    for f in morphisms:
        if compose[(identities[f.cod], f.name)] != f.name:
            out.append(f"left identity law fails for {f.name!r}")
        if compose[(f.name, identities[f.dom])] != f.name:
            out.append(f"right identity law fails for {f.name!r}")
    for f in morphisms:
        for g in outgoing[f.cod]:
            gf = compose[(g.name, f.name)]
            for h in outgoing[g.cod]:
                left = compose[(compose[(h.name, g.name)], f.name)]
                right = compose[(h.name, gf)]
                if left != right:
                    out.append(f"associativity fails for ({h.name}, {g.name}, {f.name})")
    return out


class FinCategory:
    """A finite category given by an explicit, total composition table."""

    def __init__(
        self,
        objects: Iterable[str],
        morphisms: Iterable[Morphism | tuple[str, str, str]],
        identities: Mapping[str, str],
        compose: Mapping[tuple[str, str], str],
        *,
        check: bool = True,
    ):
        objects = tuple(objects)
        morphisms = tuple(m if isinstance(m, Morphism) else Morphism(*m) for m in morphisms)
        _limits.check("max_morphisms", len(morphisms), "category morphisms")
        identities = dict(identities)
        compose = {(g, f): gf for (g, f), gf in compose.items()}
        if check:
            violations = _category_violations(objects, morphisms, identities, compose)
            if violations:
                raise CategoryError("invalid category: " + "; ".join(violations))
        self._objects = objects
        self._morphisms = morphisms
        self._identities = MappingProxyType(identities)
        self._compose = MappingProxyType(compose)
        self._by_name = {m.name: m for m in morphisms}
        self._obj_index = {x: i for i, x in enumerate(objects)}
        self._mor_index = {m.name: i for i, m in enumerate(morphisms)}
        hom: dict[tuple[str, str], list[str]] = {}
        for m in morphisms:
            hom.setdefault((m.dom, m.cod), []).append(m.name)
        self._hom = {k: tuple(v) for k, v in hom.items()}
        self._opposite: FinCategory | None = None
        self._cached_key: tuple | None = None

    @property
    def objects(self) -> tuple[str, ...]:
        return self._objects

    @property
    def morphisms(self) -> tuple[Morphism, ...]:
        return self._morphisms

    @property
    def morphism_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self._morphisms)

    @property
    def identities(self) -> Mapping[str, str]:
        return self._identities

    @property
    def composition_table(self) -> Mapping[tuple[str, str], str]:
        return self._compose

    def has_object(self, x: str) -> bool:
        return x in self._obj_index

    def object_index(self, x: str) -> int:
        return self._obj_index[x]

    def morphism_index(self, f: str) -> int:
        return self._mor_index[f]

    def morphism(self, f: str) -> Morphism:
        try:
            return self._by_name[f]
        except KeyError:
            raise CategoryError(f"unknown morphism {f!r}") from None

    def dom(self, f: str) -> str:
        return self.morphism(f).dom

    def cod(self, f: str) -> str:
        return self.morphism(f).cod

    def id(self, x: str) -> str:
        try:
            return self._identities[x]
        except KeyError:
            raise CategoryError(f"unknown object {x!r}") from None

    def is_identity(self, f: str) -> bool:
        m = self.morphism(f)
        return m.dom == m.cod and self._identities[m.dom] == f

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        return self._hom.get((x, y), ())

    def compose(self, g: str, f: str) -> str:
        """Return ``g∘f`` (first ``f``, then ``g``)."""
        try:
            return self._compose[(g, f)]
        except KeyError:
            raise CategoryError(f"morphisms ({g}, {f}) are not composable") from None

    def compose_path(self, *fs: str) -> str:
        """Compose right to left: ``compose_path(h, g, f) == h∘g∘f``."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.compose(g, out)
        return out

    def composable_pairs(self) -> Iterable[tuple[str, str]]:
        return self._compose.keys()

    def opposite(self) -> FinCategory:
        if self._opposite is None:
            op = FinCategory(
                self._objects,
                [Morphism(m.name, m.cod, m.dom) for m in self._morphisms],
                self._identities,
                {(f, g): gf for (g, f), gf in self._compose.items()},
                check=False,
            )
            op._opposite = self
            self._opposite = op
        return self._opposite

    def _key(self) -> tuple:
        if self._cached_key is None:
            self._cached_key = (
                self._objects,
                self._morphisms,
                tuple(sorted(self._identities.items())),
                tuple(sorted(self._compose.items())),
            )
        return self._cached_key

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FinCategory):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash((self._objects, self._morphisms))

    def __repr__(self) -> str:
        return f"FinCategory(objects={len(self._objects)}, morphisms={len(self._morphisms)})"

    def to_json(self) -> dict:
        return {
            "objects": list(self._objects),
            "morphisms": [{"name": m.name, "dom": m.dom, "cod": m.cod} for m in self._morphisms],
            "identities": dict(self._identities),
            "compose": [{"f": f, "g": g, "gf": gf} for (g, f), gf in self._compose.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any], *, check: bool = True) -> FinCategory:
        objects, morphisms, identities, compose = _parse_category(data)
        return cls(objects, morphisms, identities, compose, check=check)


def _parse_category(data: Mapping[str, Any]):
    objects = [str(x) for x in data.get("objects", [])]
    morphisms = [Morphism(str(m["name"]), str(m["dom"]), str(m["cod"])) for m in data.get("morphisms", [])]
    names = {m.name for m in morphisms}
    identities = {str(k): str(v) for k, v in (data.get("identities") or {}).items()}
    auto: list[Morphism] = []
    for x in objects:
        if x in identities:
            continue
        guess = f"id_{x}"
        identities[x] = guess
        if guess not in names:
            auto.append(Morphism(guess, x, x))
            names.add(guess)
    morphisms = auto + morphisms
    compose: dict[tuple[str, str], str] = {}
    for entry in data.get("compose", []):
        compose[(str(entry["g"]), str(entry["f"]))] = str(entry["gf"])
    for m in morphisms:
        if m.cod in identities:
            compose.setdefault((identities[m.cod], m.name), m.name)
        if m.dom in identities:
            compose.setdefault((m.name, identities[m.dom]), m.name)
    return objects, morphisms, identities, compose


def validate_category(raw: FinCategory | Mapping[str, Any]) -> ValidationReport:
    """Check the category axioms; violations are returned, never raised."""
    if isinstance(raw, FinCategory):
        parts = (raw.objects, raw.morphisms, raw.identities, raw.composition_table)
    else:
        try:
            parts = _parse_category(raw)
        except (KeyError, TypeError) as exc:
            return ValidationReport((f"malformed category description: {exc!r}",))
    return ValidationReport(tuple(_category_violations(*parts)))


def terminal_category(obj: str = "*") -> FinCategory:
    ident = f"id_{obj}"
    return FinCategory([obj], [Morphism(ident, obj, obj)], {obj: ident}, {(ident, ident): ident})


def discrete_category(objects: Iterable[str]) -> FinCategory:
    objects = list(objects)
    ids = {x: f"id_{x}" for x in objects}
    return FinCategory(
        objects,
        [Morphism(ids[x], x, x) for x in objects],
        ids,
        {(ids[x], ids[x]): ids[x] for x in objects},
    )


def poset_category(elements: Iterable[str], leq: Iterable[tuple[str, str]]) -> FinCategory:
    """Thin category of the reflexive-transitive closure of ``leq``.

    Non-identity morphisms are named ``"a<=b"``. Raises if the relation is
    not antisymmetric.
    """
    elements = list(elements)
    rel = {(a, a) for a in elements} | {(a, b) for a, b in leq}
    for a, b in rel:
        if a not in elements or b not in elements:
            raise CategoryError(f"relation mentions unknown element in ({a}, {b})")
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    for a, b in rel:
        if a != b and (b, a) in rel:
            raise CategoryError(f"relation is not antisymmetric: {a} and {b}")

    def name(a: str, b: str) -> str:
        return f"id_{a}" if a == b else f"{a}<={b}"

    order = {x: i for i, x in enumerate(elements)}
    pairs = sorted(rel, key=lambda p: (p[0] != p[1], order[p[0]], order[p[1]]))
    morphisms = [Morphism(name(a, b), a, b) for a, b in pairs]
    compose = {}
    for a, b in rel:
        for c, d in rel:
            if b == c:
                compose[(name(c, d), name(a, b))] = name(a, d)
    return FinCategory(elements, morphisms, {x: name(x, x) for x in elements}, compose, check=False)


@dataclass(frozen=True)
class Quiver:
    """Directed multigraph; arrows are ``(label, source, target)``."""

    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(tuple(a) for a in self.arrows))
        if len(set(self.vertices)) != len(self.vertices):
            raise CategoryError("quiver vertex names must be unique")
        labels = [a[0] for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise CategoryError("quiver arrow labels must be unique")
        vs = set(self.vertices)
        for label, src, dst in self.arrows:
            if src not in vs or dst not in vs:
                raise CategoryError(f"arrow {label!r} joins undeclared vertices")

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Quiver:
        return cls(
            tuple(str(v) for v in data["nodes"]),
            tuple((str(e["label"]), str(e["src"]), str(e["dst"])) for e in data.get("edges", [])),
        )

    def to_json(self) -> dict:
        return {
            "nodes": list(self.vertices),
            "edges": [{"label": l, "src": s, "dst": d} for l, s, d in self.arrows],
        }


def free_category(q: Quiver) -> FinCategory:
    """Path category of an acyclic quiver.

    Identities are ``id_<vertex>``; a path ``f`` then ``g`` is named ``"g.f"``.
    """
    out_arrows: dict[str, list[tuple[str, str, str]]] = {v: [] for v in q.vertices}
    for arrow in q.arrows:
        out_arrows[arrow[1]].append(arrow)

    state = {v: 0 for v in q.vertices}  # 0 new, 1 on stack, 2 done

    def visit(v: str) -> None:
        state[v] = 1
        for _, _, w in out_arrows[v]:
            if state[w] == 1:
                raise CategoryError("free category is infinite on cyclic quiver")
            if state[w] == 0:
                visit(w)
        state[v] = 2

    for v in q.vertices:
        if state[v] == 0:
            visit(v)

    # every nonempty path as a tuple of arrows
    paths: list[tuple[tuple[str, str, str], ...]] = []
    stack = [(a,) for v in q.vertices for a in out_arrows[v]]
    while stack:
        p = stack.pop()
        paths.append(p)
        stack.extend(p + (a,) for a in out_arrows[p[-1][2]])
        _limits.check("max_morphisms", len(paths) + len(q.vertices), "free category paths")
    paths.sort(key=lambda p: tuple(a[0] for a in p))

    def pname(p) -> str:
        return ".".join(a[0] for a in reversed(p))

    ids = {v: f"id_{v}" for v in q.vertices}
    morphisms = [Morphism(ids[v], v, v) for v in q.vertices]
    morphisms += [Morphism(pname(p), p[0][1], p[-1][2]) for p in paths]
    if len({m.name for m in morphisms}) != len(morphisms):
        raise CategoryError("path names collide; choose arrow labels without '.' or 'id_' prefixes")

    by_end: dict[str, list] = {v: [] for v in q.vertices}
    by_start: dict[str, list] = {v: [] for v in q.vertices}
    for p in paths:
        by_start[p[0][1]].append(p)
        by_end[p[-1][2]].append(p)
    compose: dict[tuple[str, str], str] = {}
    for m in morphisms:
        compose[(ids[m.cod], m.name)] = m.name
        compose[(m.name, ids[m.dom])] = m.name
    for p in paths:
        for r in by_start[p[-1][2]]:
            compose[(pname(r), pname(p))] = pname(p + r)
    return FinCategory(q.vertices, morphisms, ids, compose, check=False)


def opposite(c: FinCategory) -> FinCategory:
    """Reverse every morphism, keeping all names."""
    return c.opposite()


class Functor:
    """A functor between finite categories, given by its object and morphism maps."""

    def __init__(
        self,
        source: FinCategory,
        target: FinCategory,
        on_objects: Mapping[str, str],
        on_morphisms: Mapping[str, str],
    ):
        self.source = source
        self.target = target
        self.on_objects = MappingProxyType(dict(on_objects))
        self.on_morphisms = MappingProxyType(dict(on_morphisms))
        for x in source.objects:
            if x not in self.on_objects:
                raise CategoryError(f"functor object map is not total: missing {x!r}")
            if not target.has_object(self.on_objects[x]):
                raise CategoryError(f"functor sends {x!r} to unknown object {self.on_objects[x]!r}")
        for m in source.morphisms:
            if m.name not in self.on_morphisms:
                raise CategoryError(f"functor morphism map is not total: missing {m.name!r}")
            target.morphism(self.on_morphisms[m.name])

    def ob(self, x: str) -> str:
        return self.on_objects[x]

    def mor(self, f: str) -> str:
        return self.on_morphisms[f]

    def op(self) -> Functor:
        return Functor(self.source.opposite(), self.target.opposite(), self.on_objects, self.on_morphisms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Functor):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and dict(self.on_objects) == dict(other.on_objects)
            and dict(self.on_morphisms) == dict(other.on_morphisms)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Functor({self.source!r} -> {self.target!r})"

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "on_objects": dict(self.on_objects),
            "on_morphisms": dict(self.on_morphisms),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> Functor:
        src = FinCategory.from_json(data["source"])
        tgt = FinCategory.from_json(data["target"])
        on_morphisms = {str(k): str(v) for k, v in data.get("on_morphisms", {}).items()}
        on_objects = {str(k): str(v) for k, v in data["on_objects"].items()}
        for x in src.objects:
            on_morphisms.setdefault(src.id(x), tgt.id(on_objects[x]))
        return cls(src, tgt, on_objects, on_morphisms)


def identity_functor(c: FinCategory) -> Functor:
    return Functor(c, c, {x: x for x in c.objects}, {f: f for f in c.morphism_names})


def compose_functors(g: Functor, f: Functor) -> Functor:
    """``g∘f``."""
    if f.target != g.source:
        raise CategoryError("functors are not composable")
    return Functor(
        f.source,
        g.target,
        {x: g.ob(f.ob(x)) for x in f.source.objects},
        {m: g.mor(f.mor(m)) for m in f.source.morphism_names},
    )


def constant_functor(source: FinCategory, target: FinCategory, obj: str) -> Functor:
    ident = target.id(obj)
    return Functor(source, target, {x: obj for x in source.objects}, {f: ident for f in source.morphism_names})


def to_terminal(c: FinCategory) -> Functor:
    """The unique functor ``c -> 1``."""
    return constant_functor(c, terminal_category(), "*")


def full_subcategory(c: FinCategory, keep: Iterable[str]) -> tuple[FinCategory, Functor]:
    keep = set(keep)
    unknown = sorted(x for x in keep if not c.has_object(x))
    if unknown:
        raise CategoryError(f"unknown object(s) {unknown}")
    objects = [x for x in c.objects if x in keep]
    morphisms = [m for m in c.morphisms if m.dom in keep and m.cod in keep]
    names = {m.name for m in morphisms}
    compose = {k: v for k, v in c.composition_table.items() if k[0] in names and k[1] in names}
    sub = FinCategory(objects, morphisms, {x: c.id(x) for x in objects}, compose, check=False)
    inclusion = Functor(sub, c, {x: x for x in objects}, {f: f for f in names})
    return sub, inclusion


def comma_object_name(a: str, b: str, f: str) -> str:
    return f"({a},{b},{f})"


def comma_category(F: Functor, G: Functor) -> tuple[FinCategory, Functor, Functor]:
    """The comma category ``(F ↓ G)`` with its two projections.

    Objects are triples ``(a, b, f: F a -> G b)`` written ``"(a,b,f)"``; a
    morphism ``(a,b,f) -> (a',b',f')`` is a pair ``(h, k)`` with
    ``G(k)∘f = f'∘F(h)``.
    """
    if F.target != G.target:
        raise CategoryError("comma category needs functors with a common target")
    A, B, C = F.source, G.source, F.target
    triples = sorted(
        (a, b, f)
        for a in A.objects
        for b in B.objects
        for f in C.hom(F.ob(a), G.ob(b))
    )
    _limits.check("max_morphisms", len(triples), "comma category objects")
    oname = {t: comma_object_name(*t) for t in triples}
    if len(set(oname.values())) != len(triples):
        raise CategoryError("comma object names collide")

    arrows: dict[tuple, str] = {}  # (src, tgt, h, k) -> name
    morphisms: list[Morphism] = []
    identities: dict[str, str] = {}
    for s in triples:
        a, b, f = s
        for t in triples:
            a2, b2, f2 = t
            for h in A.hom(a, a2):
                for k in B.hom(b, b2):
                    if C.compose(G.mor(k), f) != C.compose(f2, F.mor(h)):
                        continue
                    if s == t and A.is_identity(h) and B.is_identity(k):
                        name = f"id_{oname[s]}"
                        identities[oname[s]] = name
                    else:
                        name = f"({h},{k}):{oname[s]}->{oname[t]}"
                    arrows[(s, t, h, k)] = name
                    morphisms.append(Morphism(name, oname[s], oname[t]))
                    _limits.check("max_morphisms", len(morphisms), "comma category morphisms")
    outgoing: dict[tuple, list] = {}
    for key in arrows:
        outgoing.setdefault(key[0], []).append(key)
    compose: dict[tuple[str, str], str] = {}
    for (s, t, h, k), name in arrows.items():
        for (_, u, h2, k2) in outgoing.get(t, []):
            composite = (s, u, A.compose(h2, h), B.compose(k2, k))
            compose[(arrows[(t, u, h2, k2)], name)] = arrows[composite]
    cat = FinCategory([oname[t] for t in triples], morphisms, identities, compose, check=False)
    proj_a = Functor(
        cat,
        A,
        {oname[t]: t[0] for t in triples},
        {name: key[2] for key, name in arrows.items()},
    )
    proj_b = Functor(
        cat,
        B,
        {oname[t]: t[1] for t in triples},
        {name: key[3] for key, name in arrows.items()},
    )
    return cat, proj_a, proj_b
