"""Representable functors, the Yoneda bijection and colimits of representables."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .fincat import CategoryError, FinCategory, Functor, Morphism
from .setfun import CO, CONTRA, FunctorError, NatTransformation, SetFunctor, enumerate_nats, validate_functor
from .universal import Diagram, colimit_of_set_diagram

__all__ = [
    "CrpReport",
    "ElementsCategory",
    "UctError",
    "UctReport",
    "YonedaReport",
    "category_of_elements",
    "crp_check",
    "hom_copresheaf",
    "hom_presheaf",
    "uct_decompose",
    "yoneda_lemma_check",
]


class UctError(AssertionError):
    """The canonical colimit failed to be isomorphic to the presheaf (an engine defect)."""


def _require(c: FinCategory, x: str) -> None:
    if not c.has_object(x):
        raise CategoryError(f"unknown object {x!r}")


def hom_presheaf(c: FinCategory, x: str) -> SetFunctor:
    """``Hom(-, x)``: ``z -> Hom(z, x)``, acting by precomposition."""
    _require(c, x)
    return SetFunctor(
        c,
        CONTRA,
        {z: c.hom(z, x) for z in c.objects},
        {m.name: {g: c.compose(g, m.name) for g in c.hom(m.cod, x)} for m in c.morphisms},
    )


def hom_copresheaf(c: FinCategory, x: str) -> SetFunctor:
    """``Hom(x, -)``: ``z -> Hom(x, z)``, acting by postcomposition."""
    _require(c, x)
    return SetFunctor(
        c,
        CO,
        {z: c.hom(x, z) for z in c.objects},
        {m.name: {g: c.compose(m.name, g) for g in c.hom(x, m.dom)} for m in c.morphisms},
    )


@dataclass(frozen=True)
class YonedaReport:
    nat_count: int
    fx_count: int
    bijection_witness: tuple[tuple[int, str], ...]
    holds: bool

    def to_json(self) -> dict:
        return {
            "nat_count": self.nat_count,
            "fx_count": self.fx_count,
            "holds": self.holds,
            "bijection_witness": [{"nat": k, "element": e} for k, e in self.bijection_witness],
        }


def yoneda_lemma_check(c: FinCategory, x: str, F: SetFunctor) -> YonedaReport:
    """Enumerate ``Nat(Hom(-, x), F)`` and check ``η -> η_x(id_x)`` is a bijection onto ``F(x)``.

    The inverse ``e -> (f -> F(f)(e))`` is also rebuilt and compared.
    """
    if F.covariant or F.base != c:
        raise FunctorError("Yoneda check needs a presheaf on the given category")
    h = hom_presheaf(c, x)
    nats = enumerate_nats(h, F)
    ident = c.id(x)
    witness = tuple((k, eta[x][ident]) for k, eta in enumerate(nats))
    image = [e for _, e in witness]
    holds = len(set(image)) == len(image) and set(image) == set(F.elements(x))
    if holds:
        for k, e in witness:
            rebuilt = {z: {f: F.act(f, e) for f in c.hom(z, x)} for z in c.objects}
            if rebuilt != nats[k].to_json():
                holds = False
                break
    return YonedaReport(len(nats), F.size(x), witness, holds)


@dataclass(frozen=True)
class CrpReport:
    hom_count: int
    nat_count: int
    bijection_witness: tuple[tuple[str, int], ...]
    holds: bool

    def to_json(self) -> dict:
        return {
            "hom_count": self.hom_count,
            "nat_count": self.nat_count,
            "holds": self.holds,
            "bijection_witness": [{"morphism": f, "nat": k} for f, k in self.bijection_witness],
        }


def crp_check(c: FinCategory, x: str, y: str) -> CrpReport:
    """Check ``Hom(x, y) ≅ Nat(Hom(-, x), Hom(-, y))`` via ``f -> f∘-``."""
    hx, hy = hom_presheaf(c, x), hom_presheaf(c, y)
    nats = enumerate_nats(hx, hy)
    index = {eta.key(): k for k, eta in enumerate(nats)}
    witness = []
    for f in c.hom(x, y):
        post = NatTransformation(
            hx, hy, {z: {g: c.compose(f, g) for g in c.hom(z, x)} for z in c.objects}
        )
        witness.append((f, index.get(post.key(), -1)))
    hit = [k for _, k in witness]
    holds = -1 not in hit and sorted(hit) == list(range(len(nats)))
    return CrpReport(len(c.hom(x, y)), len(nats), tuple(witness), holds)


@dataclass(frozen=True)
class ElementsCategory:
    """The category of elements of a presheaf with its projection to the base."""

    presheaf: SetFunctor
    category: FinCategory
    projection: Functor
    element_of: Mapping[str, tuple[str, str]]
    morphism_of: Mapping[str, tuple[str, str]]


def _pname(a: str, b: str) -> str:
    return f"({a},{b})"


def category_of_elements(P: SetFunctor) -> ElementsCategory:
    """Objects ``(c, x)`` with ``x ∈ P(c)``; ``f: c -> c'`` gives ``(c, P(f)(x')) -> (c', x')``.

    The morphism for ``(f, x')`` is named ``"(f,x')"``.
    """
    if P.covariant:
        raise FunctorError("category of elements is built for presheaves")
    C = P.base
    element_of = {_pname(c, x): (c, x) for c in C.objects for x in P.elements(c)}
    if len(element_of) != sum(P.cardinalities().values()):
        raise FunctorError("element names collide in the category of elements")
    morphisms, morphism_of = [], {}
    for m in C.morphisms:
        for x2 in P.elements(m.cod):
            name = _pname(m.name, x2)
            morphisms.append(Morphism(name, _pname(m.dom, P.act(m.name, x2)), _pname(m.cod, x2)))
            morphism_of[name] = (m.name, x2)
    if len(morphism_of) != len(morphisms):
        raise FunctorError("morphism names collide in the category of elements")
    identities = {obj: _pname(C.id(c), x) for obj, (c, x) in element_of.items()}
    compose = {}
    for name, (f, x2) in morphism_of.items():
        c2 = C.cod(f)
        # g: c2 -> c3 with P(g)(x3) == x2
        for g in C.morphisms:
            if g.dom != c2:
                continue
            for x3 in P.elements(g.cod):
                if P.act(g.name, x3) == x2:
                    compose[(_pname(g.name, x3), name)] = _pname(C.compose(g.name, f), x3)
    cat = FinCategory(list(element_of), morphisms, identities, compose, check=False)
    proj = Functor(
        cat,
        C,
        {obj: c for obj, (c, _) in element_of.items()},
        {name: f for name, (f, _) in morphism_of.items()},
    )
    return ElementsCategory(P, cat, proj, element_of, morphism_of)


@dataclass(frozen=True)
class UctReport:
    elements: ElementsCategory
    colimit: SetFunctor
    iso: NatTransformation

    def to_json(self) -> dict:
        return {
            "elements_objects": len(self.elements.category.objects),
            "elements_morphisms": len(self.elements.category.morphisms),
            "colimit_sizes": self.colimit.cardinalities(),
            "presheaf_sizes": self.iso.target.cardinalities(),
            "iso": self.iso.to_json(),
            "verified": True,
        }


def uct_decompose(P: SetFunctor) -> UctReport:
    """Rebuild ``P`` as the colimit of representables over its category of elements.

    At each object ``d`` the colimit of ``(c, x) -> Hom(d, c)`` is computed
    with the set engine; the comparison map sends the class of ``((c, x), g)``
    to ``P(g)(x)`` and is checked to be a natural isomorphism.
    """
    E = category_of_elements(P)
    C, J = P.base, E.category
    apexes: dict[str, tuple[str, ...]] = {}
    legs: dict[str, Mapping[str, Mapping[str, str]]] = {}
    members: dict[str, dict[str, list[tuple[str, str]]]] = {}
    for d in C.objects:
        body = SetFunctor(
            J,
            CO,
            {obj: C.hom(d, E.element_of[obj][0]) for obj in J.objects},
            {
                name: {g: C.compose(f, g) for g in C.hom(d, C.dom(f))}
                for name, (f, _) in E.morphism_of.items()
            },
        )
        res = colimit_of_set_diagram(Diagram(J, body), verify_up_to=0)
        apexes[d] = res.apex
        legs[d] = res.legs
        members[d] = {}
        for obj in J.objects:
            for g, a in res.legs[obj].items():
                members[d].setdefault(a, []).append((obj, g))

    acts: dict[str, dict[str, str]] = {}
    for m in C.morphisms:  # h: d2 -> d acts L(d) -> L(d2)
        h, d2, d = m.name, m.dom, m.cod
        table = {}
        for a, mem in members[d].items():
            images = {legs[d2][obj][C.compose(g, h)] for obj, g in mem}
            if len(images) != 1:
                raise UctError(f"colimit action of {h!r} is not well defined on class {a!r}")
            table[a] = images.pop()
        acts[h] = table
    L = SetFunctor(C, CONTRA, apexes, acts)
    if not validate_functor(L):
        raise UctError("pointwise colimit is not a presheaf")

    comps = {}
    for d in C.objects:
        comp = {}
        for a, mem in members[d].items():
            values = {P.act(g, E.element_of[obj][1]) for obj, g in mem}
            if len(values) != 1:
                raise UctError(f"comparison map is not well defined on class {a!r}")
            comp[a] = values.pop()
        comps[d] = comp
    iso = NatTransformation(L, P, comps)
    if not iso.is_iso():
        raise UctError("comparison map is not a bijection")
    if not iso.is_natural():
        raise UctError("comparison map is not natural")
    return UctReport(E, L, iso)
