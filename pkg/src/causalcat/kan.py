"""Pointwise Kan extensions of finite-set-valued functors.

Only covariant functors are extended; a presheaf is handled by viewing it
as a covariant functor on the opposite category.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .fincat import (
    CategoryError,
    FinCategory,
    Functor,
    comma_category,
    comma_object_name,
    constant_functor,
    full_subcategory,
    terminal_category,
    to_terminal,
)
from .setfun import CO, FunctorError, NatTransformation, SetFunctor, enumerate_nats, validate_functor
from .universal import Diagram, colimit_of_set_diagram, limit_of_set_diagram
from .yoneda import hom_presheaf

__all__ = [
    "ConfounderReport",
    "KanError",
    "KanResult",
    "UniversalityReport",
    "colimit_as_kan",
    "confounder_approximation",
    "kan_universality_check",
    "left_kan",
    "right_kan",
]


class KanError(AssertionError):
    """A computed extension failed one of its own structural checks."""


@dataclass(frozen=True)
class KanResult:
    kind: str  # "left" or "right"
    functor: SetFunctor
    along: Functor
    extension: SetFunctor
    # left: unit F => Lan∘K; right: counit Ran∘K => F
    transformation: NatTransformation
    commas: Mapping[str, FinCategory] = field(repr=False)
    # left: apex class -> members ((c, u), x); right: apex tuple -> {(c, u): x}
    _cells: Mapping[str, Mapping[str, object]] = field(repr=False)

    @property
    def unit(self) -> NatTransformation:
        if self.kind != "left":
            raise AttributeError("a right Kan extension has a counit, not a unit")
        return self.transformation

    @property
    def counit(self) -> NatTransformation:
        if self.kind != "right":
            raise AttributeError("a left Kan extension has a unit, not a counit")
        return self.transformation

    def to_json(self) -> dict:
        return {
            "mode": self.kind,
            "sizes": self.extension.cardinalities(),
            "extension": self.extension.to_json(include_category=False),
            "unit" if self.kind == "left" else "counit": self.transformation.to_json(),
            "comma_sizes": {d: len(c.objects) for d, c in self.commas.items()},
        }


def _check_inputs(F: SetFunctor, K: Functor) -> None:
    if not F.covariant:
        raise FunctorError("Kan extensions take covariant functors; use .op() for presheaves")
    if K.source != F.base:
        raise FunctorError("functor and extension direction do not share a source")


def left_kan(F: SetFunctor, K: Functor) -> KanResult:
    """``(Lan_K F)(d) = colim over (K ↓ d) of F∘proj``."""
    _check_inputs(F, K)
    C, D = K.source, K.target
    one = terminal_category()
    apexes, legs, members, commas = {}, {}, {}, {}
    for d in D.objects:
        comma, proj, _ = comma_category(K, constant_functor(one, D, d))
        res = colimit_of_set_diagram(Diagram(comma, F.restrict(proj)), verify_up_to=0)
        commas[d] = comma
        apexes[d] = res.apex
        legs[d] = res.legs
        cells: dict[str, list] = {}
        for obj in comma.objects:
            c = proj.ob(obj)
            for x, a in res.legs[obj].items():
                cells.setdefault(a, []).append((obj, c, x))
        members[d] = cells

    # recover u from the comma object name: objects are (c, *, u)
    u_of = {
        d: {comma_object_name(c, "*", u): u for c in C.objects for u in D.hom(K.ob(c), d)}
        for d in D.objects
    }
    acts = {}
    for m in D.morphisms:
        g, d, d2 = m.name, m.dom, m.cod
        table = {}
        for a, mem in members[d].items():
            images = {
                legs[d2][comma_object_name(c, "*", D.compose(g, u_of[d][obj]))][x]
                for obj, c, x in mem
            }
            if len(images) != 1:
                raise KanError(f"action of {g!r} is not well defined on class {a!r}")
            table[a] = images.pop()
        acts[g] = table
    ext = SetFunctor(D, CO, apexes, acts)
    if not validate_functor(ext):
        raise KanError("left Kan extension is not functorial")
    unit = NatTransformation(
        F,
        ext.restrict(K),
        {
            c: {x: legs[K.ob(c)][comma_object_name(c, "*", D.id(K.ob(c)))][x] for x in F.elements(c)}
            for c in C.objects
        },
    )
    if not unit.is_natural():
        raise KanError("unit is not natural")
    return KanResult("left", F, K, ext, unit, commas, members)


def right_kan(F: SetFunctor, K: Functor) -> KanResult:
    """``(Ran_K F)(d) = lim over (d ↓ K) of F∘proj``."""
    _check_inputs(F, K)
    C, D = K.source, K.target
    one = terminal_category()
    apexes, legs, commas, lookup = {}, {}, {}, {}
    for d in D.objects:
        comma, _, proj = comma_category(constant_functor(one, D, d), K)
        res = limit_of_set_diagram(Diagram(comma, F.restrict(proj)), verify_up_to=0)
        commas[d] = comma
        apexes[d] = res.apex
        legs[d] = res.legs
        lookup[d] = {
            tuple(res.legs[obj][t] for obj in comma.objects): t for t in res.apex
        }

    acts = {}
    for m in D.morphisms:
        g, d, d2 = m.name, m.dom, m.cod
        table = {}
        for t in apexes[d]:
            # t'(c, u': d2 -> Kc) = t(c, u'∘g)
            coords = tuple(
                legs[d][comma_object_name("*", c, D.compose(u2, g))][t]
                for c, u2 in _comma_cells(commas[d2], C, D, K, d2)
            )
            if coords not in lookup[d2]:
                raise KanError(f"action of {g!r} leaves the limit at {d2!r}")
            table[t] = lookup[d2][coords]
        acts[g] = table
    ext = SetFunctor(D, CO, apexes, acts)
    if not validate_functor(ext):
        raise KanError("right Kan extension is not functorial")
    counit = NatTransformation(
        ext.restrict(K),
        F,
        {
            c: {t: legs[K.ob(c)][comma_object_name("*", c, D.id(K.ob(c)))][t] for t in apexes[K.ob(c)]}
            for c in C.objects
        },
    )
    if not counit.is_natural():
        raise KanError("counit is not natural")
    cells = {d: {t: {obj: legs[d][obj][t] for obj in commas[d].objects} for t in apexes[d]} for d in D.objects}
    return KanResult("right", F, K, ext, counit, commas, cells)


def _comma_cells(comma: FinCategory, C: FinCategory, D: FinCategory, K: Functor, d: str):
    """``(c, u)`` pairs of ``(d ↓ K)`` in the comma category's object order."""
    names = {comma_object_name("*", c, u): (c, u) for c in C.objects for u in D.hom(d, K.ob(c))}
    return [names[obj] for obj in comma.objects]


@dataclass(frozen=True)
class UniversalityReport:
    alpha: NatTransformation | None
    unique: bool
    matching_count: int
    nat_count_extension: int  # |Nat(Lan F, G)| or |Nat(G, Ran F)|
    nat_count_restricted: int  # |Nat(F, G∘K)| or |Nat(G∘K, F)|
    contract_violation: str | None = None

    def to_json(self) -> dict:
        return {
            "alpha": None if self.alpha is None else self.alpha.to_json(),
            "unique": self.unique,
            "matching_count": self.matching_count,
            "nat_count_extension": self.nat_count_extension,
            "nat_count_restricted": self.nat_count_restricted,
            "contract_violation": self.contract_violation,
        }


def kan_universality_check(
    kr: KanResult, G: SetFunctor, gamma: NatTransformation | None = None
) -> UniversalityReport:
    """Factor ``gamma`` through the extension and check the factorisation is unique.

    ``gamma`` is ``F => G∘K`` for a left extension and ``G∘K => F`` for a
    right one. With ``gamma=None`` every such transformation is factored
    and the reported ``alpha`` is the one for the first of them.
    """
    K, F = kr.along, kr.functor
    if G.base != K.target or not G.covariant:
        raise FunctorError("G must be a covariant functor on the target of K")
    GK = G.restrict(K)
    left = kr.kind == "left"
    ext = kr.extension
    nat_ext = enumerate_nats(ext, G) if left else enumerate_nats(G, ext)
    restricted = enumerate_nats(F, GK) if left else enumerate_nats(GK, F)

    if gamma is not None:
        if not gamma.is_natural():
            return UniversalityReport(None, False, 0, len(nat_ext), len(restricted),
                                      "gamma is not a natural transformation")
        gammas = [gamma]
    else:
        gammas = restricted
    if not gammas:
        return UniversalityReport(None, False, 0, len(nat_ext), len(restricted),
                                  "no transformation between F and G∘K exists")

    first_alpha, all_unique, first_count = None, True, 0
    for gam in gammas:
        alpha = _factor(kr, G, gam)
        # count every candidate factorisation by brute force
        if left:
            count = sum(
                all(
                    a[K.ob(c)][kr.unit[c][x]] == gam[c][x]
                    for c in F.base.objects
                    for x in F.elements(c)
                )
                for a in nat_ext
            )
        else:
            count = sum(
                all(
                    kr.counit[c][a[K.ob(c)][y]] == gam[c][y]
                    for c in F.base.objects
                    for y in G.elements(K.ob(c))
                )
                for a in nat_ext
            )
        if first_alpha is None:
            first_alpha, first_count = alpha, count
        all_unique = all_unique and alpha is not None and count == 1
    return UniversalityReport(first_alpha, all_unique, first_count, len(nat_ext), len(restricted))


def _factor(kr: KanResult, G: SetFunctor, gamma: NatTransformation) -> NatTransformation | None:
    """Build the mediating transformation from the (co)limit cells."""
    K, F, ext = kr.along, kr.functor, kr.extension
    C, D = K.source, K.target
    comps: dict[str, dict[str, str]] = {}
    if kr.kind == "left":
        u_of = {
            d: {comma_object_name(c, "*", u): u for c in C.objects for u in D.hom(K.ob(c), d)}
            for d in D.objects
        }
        for d in D.objects:
            comp = {}
            for a, mem in kr._cells[d].items():
                values = {G.act(u_of[d][obj], gamma[c][x]) for obj, c, x in mem}
                if len(values) != 1:
                    return None
                comp[a] = values.pop()
            comps[d] = comp
        alpha = NatTransformation(ext, G, comps)
    else:
        for d in D.objects:
            lookup = {
                tuple(sorted(cell.items())): t for t, cell in kr._cells[d].items()
            }
            names = {comma_object_name("*", c, u): (c, u) for c in C.objects for u in D.hom(d, K.ob(c))}
            comp = {}
            for y in G.elements(d):
                cell = {obj: gamma[c][G.act(u, y)] for obj, (c, u) in names.items()}
                t = lookup.get(tuple(sorted(cell.items())))
                if t is None:
                    return None
                comp[y] = t
            comps[d] = comp
        alpha = NatTransformation(G, ext, comps)
    return alpha if alpha.is_natural() else None


@dataclass(frozen=True)
class ColimitAsKanReport:
    kan_size: int
    colimit_size: int
    bijection: Mapping[str, str]
    isomorphic: bool

    def to_json(self) -> dict:
        return {
            "kan_size": self.kan_size,
            "colimit_size": self.colimit_size,
            "isomorphic": self.isomorphic,
            "bijection": dict(self.bijection),
        }


def colimit_as_kan(d: Diagram) -> ColimitAsKanReport:
    """Compare ``Lan`` along ``J -> 1`` with the direct colimit of ``d``."""
    if not d.into_sets:
        raise FunctorError("colimit_as_kan needs a set-valued diagram")
    kr = left_kan(d.body, to_terminal(d.index))
    direct = colimit_of_set_diagram(d, verify_up_to=0)
    # direct class of (j, x) -> Kan class of ((j, *, id_*), x)
    bij: dict[str, set] = {}
    for j in d.index.objects:
        for x in d.body.elements(j):
            bij.setdefault(direct.legs[j][x], set()).add(kr.unit[j][x])
    ok = all(len(v) == 1 for v in bij.values())
    mapping = {a: sorted(v)[0] for a, v in bij.items()}
    ok = ok and len(set(mapping.values())) == len(mapping) == kr.extension.size("*") == direct.size
    return ColimitAsKanReport(kr.extension.size("*"), direct.size, mapping, ok)


@dataclass(frozen=True)
class ConfounderReport:
    target: str
    observables: tuple[str, ...]
    true_presheaf: SetFunctor
    restricted: SetFunctor
    extended_left: SetFunctor
    extended_right: SetFunctor
    agreement_left: Mapping[str, bool]
    agreement_right: Mapping[str, bool]

    @property
    def agreement(self) -> dict[str, bool]:
        """Per object: both extensions match the true presheaf's cardinality."""
        return {x: self.agreement_left[x] and self.agreement_right[x] for x in self.agreement_left}

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "observables": list(self.observables),
            "true_sizes": self.true_presheaf.cardinalities(),
            "restricted_sizes": self.restricted.cardinalities(),
            "left_sizes": self.extended_left.cardinalities(),
            "right_sizes": self.extended_right.cardinalities(),
            "agreement_left": dict(self.agreement_left),
            "agreement_right": dict(self.agreement_right),
            "agreement": self.agreement,
        }


def confounder_approximation(c: FinCategory, observables, x: str) -> ConfounderReport:
    """Approximate ``Hom_c(-, x)`` from the observable full subcategory.

    The presheaf is restricted to the observables, then Kan-extended back
    along the inclusion (as covariant functors on opposite categories) and
    compared pointwise with the true presheaf.
    """
    observables = tuple(o for o in c.objects if o in set(observables))
    if x not in observables:
        raise CategoryError(f"target {x!r} is not observable")
    D, incl = full_subcategory(c, observables)
    true = hom_presheaf(c, x)
    restricted = true.restrict(incl)
    F, K = restricted.op(), incl.op()
    lan = left_kan(F, K).extension.op()
    ran = right_kan(F, K).extension.op()
    return ConfounderReport(
        x,
        observables,
        true,
        restricted,
        lan,
        ran,
        {o: lan.size(o) == true.size(o) for o in c.objects},
        {o: ran.size(o) == true.size(o) for o in c.objects},
    )
