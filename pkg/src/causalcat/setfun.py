"""Finite-set-valued functors and natural transformations.

A :class:`SetFunctor` is either covariant (``C -> Set``) or contravariant
(``C^op -> Set``, a presheaf). For a contravariant functor the action of
``f: X -> Y`` is a function ``F(Y) -> F(X)``. Elements are strings scoped per
object; actions are explicit dictionaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Iterable, Mapping

import numpy as np

from . import _kernels
from . import limits as _limits
from .fincat import FinCategory, Functor, ValidationReport

__all__ = [
    "FullyFaithful",
    "FunctorError",
    "NatTransformation",
    "SetFunctor",
    "check_fully_faithful",
    "count_nats",
    "enumerate_nats",
    "identity_nat",
    "natural_iso_check",
    "pair_name",
    "presheaf_exponential",
    "presheaf_product",
    "presheaf_terminal",
    "validate_functor",
]

CO = "co"
CONTRA = "contra"
_VARIANCE_ALIASES = {"co": CO, "covariant": CO, "contra": CONTRA, "contravariant": CONTRA}


class FunctorError(ValueError):
    pass


def pair_name(x: str, y: str) -> str:
    return f"({x},{y})"


class SetFunctor:
    """A functor into finite sets, covariant or contravariant on ``base``.

    Actions of identity morphisms may be omitted and are filled in. The
    constructor checks that every action is a total function between the
    right sets; the functor laws are checked by :func:`validate_functor`.
    """

    def __init__(
        self,
        base: FinCategory,
        variance: str,
        on_objects: Mapping[str, Iterable[str]],
        on_morphisms: Mapping[str, Mapping[str, str]] | None = None,
    ):
        try:
            self.variance = _VARIANCE_ALIASES[variance]
        except KeyError:
            raise FunctorError(f"unknown variance {variance!r}") from None
        self.base = base
        objs: dict[str, tuple[str, ...]] = {}
        for x in base.objects:
            if x not in on_objects:
                raise FunctorError(f"no set given for object {x!r}")
            elems = tuple(str(e) for e in on_objects[x])
            if len(set(elems)) != len(elems):
                raise FunctorError(f"duplicate elements in the set at {x!r}")
            objs[x] = elems
        extra = set(on_objects) - set(base.objects)
        if extra:
            raise FunctorError(f"sets given for unknown objects {sorted(extra)}")
        on_morphisms = dict(on_morphisms or {})
        acts: dict[str, Mapping[str, str]] = {}
        for m in base.morphisms:
            s, t = (m.dom, m.cod) if self.variance == CO else (m.cod, m.dom)
            if m.name in on_morphisms:
                table = {str(k): str(v) for k, v in on_morphisms[m.name].items()}
            elif base.is_identity(m.name):
                table = {e: e for e in objs[s]}
            elif not objs[s]:
                table = {}
            else:
                raise FunctorError(f"no action given for morphism {m.name!r}")
            if set(table) != set(objs[s]):
                raise FunctorError(f"action of {m.name!r} is not total on the set at {s!r}")
            target = set(objs[t])
            for k, v in table.items():
                if v not in target:
                    raise FunctorError(f"action of {m.name!r} sends {k!r} outside the set at {t!r}")
            acts[m.name] = MappingProxyType(table)
        extra = set(on_morphisms) - set(acts)
        if extra:
            raise FunctorError(f"actions given for unknown morphisms {sorted(extra)}")
        self._objects = MappingProxyType(objs)
        self._actions = MappingProxyType(acts)
        self._index = {x: {e: i for i, e in enumerate(es)} for x, es in objs.items()}

    @property
    def on_objects(self) -> Mapping[str, tuple[str, ...]]:
        return self._objects

    @property
    def on_morphisms(self) -> Mapping[str, Mapping[str, str]]:
        return self._actions

    @property
    def covariant(self) -> bool:
        return self.variance == CO

    def elements(self, x: str) -> tuple[str, ...]:
        return self._objects[x]

    def size(self, x: str) -> int:
        return len(self._objects[x])

    def element_index(self, x: str, e: str) -> int:
        return self._index[x][e]

    def cardinalities(self) -> dict[str, int]:
        return {x: len(es) for x, es in self._objects.items()}

    def action(self, f: str) -> Mapping[str, str]:
        return self._actions[f]

    def act(self, f: str, e: str) -> str:
        return self._actions[f][e]

    def action_ends(self, f: str) -> tuple[str, str]:
        """(object whose set the action reads, object whose set it writes)."""
        m = self.base.morphism(f)
        return (m.dom, m.cod) if self.covariant else (m.cod, m.dom)

    def op(self) -> SetFunctor:
        """The same data viewed on the opposite base with flipped variance."""
        return SetFunctor(
            self.base.opposite(),
            CONTRA if self.covariant else CO,
            self._objects,
            self._actions,
        )

    def restrict(self, K: Functor) -> SetFunctor:
        """Precompose with ``K: C -> base``, giving a functor on ``C``."""
        if K.target != self.base:
            raise FunctorError("restriction functor must land in the functor's base")
        return SetFunctor(
            K.source,
            self.variance,
            {x: self._objects[K.ob(x)] for x in K.source.objects},
            {f: self._actions[K.mor(f)] for f in K.source.morphism_names},
        )

    def relabel(self, mapping: Mapping[str, Mapping[str, str]]) -> SetFunctor:
        """Rename elements per object; ``mapping[x]`` must be injective."""
        objs = {x: [mapping[x][e] for e in es] for x, es in self._objects.items()}
        acts = {}
        for f, table in self._actions.items():
            s, t = self.action_ends(f)
            acts[f] = {mapping[s][k]: mapping[t][v] for k, v in table.items()}
        return SetFunctor(self.base, self.variance, objs, acts)

    def is_empty(self) -> bool:
        return all(not es for es in self._objects.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SetFunctor):
            return NotImplemented
        return (
            self.variance == other.variance
            and self.base == other.base
            and dict(self._objects) == dict(other._objects)
            and {f: dict(t) for f, t in self._actions.items()}
            == {f: dict(t) for f, t in other._actions.items()}
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SetFunctor({self.variance}, sizes={self.cardinalities()})"

    def to_json(self, *, include_category: bool = True) -> dict:
        out: dict[str, Any] = {
            "variance": self.variance,
            "on_objects": {x: list(es) for x, es in self._objects.items()},
            "on_morphisms": {
                f: dict(t) for f, t in self._actions.items() if not self.base.is_identity(f)
            },
        }
        if include_category:
            out["category"] = self.base.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, Any], base: FinCategory | None = None) -> SetFunctor:
        if base is None:
            base = FinCategory.from_json(data["category"])
        return cls(base, data.get("variance", CONTRA), data["on_objects"], data.get("on_morphisms", {}))


def presheaf_terminal(base: FinCategory, variance: str = CONTRA) -> SetFunctor:
    return SetFunctor(
        base,
        variance,
        {x: ("*",) for x in base.objects},
        {f: {"*": "*"} for f in base.morphism_names},
    )


def presheaf_product(P: SetFunctor, Q: SetFunctor) -> SetFunctor:
    """Pointwise product; elements are named ``"(p,q)"``."""
    if P.base != Q.base or P.variance != Q.variance:
        raise FunctorError("product needs functors on the same base with the same variance")
    objs = {}
    for x in P.base.objects:
        names = [pair_name(p, q) for p in P.elements(x) for q in Q.elements(x)]
        if len(set(names)) != len(names):
            raise FunctorError(f"product element names collide at {x!r}")
        objs[x] = names
    acts = {}
    for f in P.base.morphism_names:
        pa, qa = P.action(f), Q.action(f)
        acts[f] = {pair_name(p, q): pair_name(pa[p], qa[q]) for p in pa for q in qa}
    return SetFunctor(P.base, P.variance, objs, acts)


class NatTransformation:
    """Components ``source(X) -> target(X)`` for every object ``X``."""

    def __init__(
        self,
        source: SetFunctor,
        target: SetFunctor,
        components: Mapping[str, Mapping[str, str]],
    ):
        if source.base != target.base or source.variance != target.variance:
            raise FunctorError("natural transformation needs parallel functors")
        self.source = source
        self.target = target
        comps = {}
        for x in source.base.objects:
            table = {str(k): str(v) for k, v in components.get(x, {}).items()}
            if set(table) != set(source.elements(x)):
                raise FunctorError(f"component at {x!r} is not total")
            allowed = set(target.elements(x))
            if any(v not in allowed for v in table.values()):
                raise FunctorError(f"component at {x!r} leaves the target set")
            comps[x] = MappingProxyType(table)
        self.components = MappingProxyType(comps)

    def __getitem__(self, x: str) -> Mapping[str, str]:
        return self.components[x]

    def naturality_violations(self) -> list[str]:
        out = []
        F, G = self.source, self.target
        for m in F.base.morphisms:
            s, t = F.action_ends(m.name)
            fa, ga = F.action(m.name), G.action(m.name)
            for e in F.elements(s):
                if self.components[t][fa[e]] != ga[self.components[s][e]]:
                    out.append(f"naturality square fails for {m.name!r} at element {e!r}")
                    break
        return out

    def is_natural(self) -> bool:
        return not self.naturality_violations()

    def is_iso(self) -> bool:
        return all(
            len(set(c.values())) == len(c) == self.target.size(x)
            for x, c in self.components.items()
        )

    def inverse(self) -> NatTransformation:
        if not self.is_iso():
            raise FunctorError("transformation is not invertible")
        return NatTransformation(
            self.target,
            self.source,
            {x: {v: k for k, v in c.items()} for x, c in self.components.items()},
        )

    def then(self, other: NatTransformation) -> NatTransformation:
        """Vertical composite ``other ∘ self``."""
        if self.target != other.source:
            raise FunctorError("transformations are not composable")
        return NatTransformation(
            self.source,
            other.target,
            {x: {k: other.components[x][v] for k, v in c.items()} for x, c in self.components.items()},
        )

    def key(self) -> tuple:
        return tuple(
            tuple(c[e] for e in self.source.elements(x))
            for x, c in self.components.items()
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NatTransformation):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.key() == other.key()
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"NatTransformation({self.key()})"

    def to_json(self) -> dict:
        return {x: dict(c) for x, c in self.components.items()}


def identity_nat(F: SetFunctor) -> NatTransformation:
    return NatTransformation(F, F, {x: {e: e for e in F.elements(x)} for x in F.base.objects})


def validate_functor(f: SetFunctor | Functor) -> ValidationReport:
    """Check identity and composition preservation exhaustively."""
    out: list[str] = []
    if isinstance(f, Functor):
        C, D = f.source, f.target
        for m in C.morphisms:
            fm = D.morphism(f.mor(m.name))
            if fm.dom != f.ob(m.dom) or fm.cod != f.ob(m.cod):
                out.append(f"{m.name!r} is not sent between the images of its endpoints")
        if out:
            return ValidationReport(tuple(out))
        for x in C.objects:
            if f.mor(C.id(x)) != D.id(f.ob(x)):
                out.append(f"identity not preserved at {x!r}")
        for (g, h), gh in C.composition_table.items():
            if f.mor(gh) != D.compose(f.mor(g), f.mor(h)):
                out.append(f"composition not preserved for ({g}, {h})")
        return ValidationReport(tuple(out))

    C = f.base
    for x in C.objects:
        act = f.action(C.id(x))
        if any(act[e] != e for e in f.elements(x)):
            out.append(f"identity not preserved at {x!r}")
    for (g, h), gh in C.composition_table.items():
        ag, ah, agh = f.action(g), f.action(h), f.action(gh)
        if f.covariant:
            ok = all(agh[e] == ag[ah[e]] for e in ah)
        else:
            ok = all(agh[e] == ah[ag[e]] for e in ag)
        if not ok:
            out.append(f"composition not preserved for ({g}, {h})")
    return ValidationReport(tuple(out))


def _nat_problem(F: SetFunctor, G: SetFunctor):
    """Encode Nat(F, G) as integer arrays for the kernel."""
    if F.base != G.base:
        raise FunctorError("functors live on different categories")
    if F.variance != G.variance:
        raise FunctorError("functors have different variance")
    C = F.base
    var_of: dict[tuple[str, str], int] = {}
    domains: list[int] = []
    log_space = 0.0
    for x in C.objects:
        for e in F.elements(x):
            var_of[(x, e)] = len(domains)
            domains.append(G.size(x))
        if F.size(x):
            if G.size(x) == 0:
                log_space = -math.inf
            elif log_space != -math.inf:
                log_space += F.size(x) * math.log(G.size(x))
    budget = _limits.current_limits().max_function_space
    if log_space > math.log(budget) + 1e-9:
        raise _limits.SizeGuardError(
            "max_function_space", budget, round(math.exp(log_space)), "natural transformation search"
        )

    tables: list[int] = []
    by_var: list[list[tuple[int, int, int]]] = [[] for _ in domains]
    for m in C.morphisms:
        if C.is_identity(m.name):
            continue
        s, t = F.action_ends(m.name)
        ga = G.action(m.name)
        off = len(tables)
        tables.extend(G.element_index(t, ga[y]) for y in G.elements(s))
        fa = F.action(m.name)
        for e in F.elements(s):
            w = var_of[(s, e)]
            u = var_of[(t, fa[e])]
            by_var[max(u, w)].append((w, u, off))
    cptr = [0]
    csrc: list[int] = []
    ctgt: list[int] = []
    coff: list[int] = []
    for cons in by_var:
        for w, u, off in cons:
            csrc.append(w)
            ctgt.append(u)
            coff.append(off)
        cptr.append(len(csrc))
    arrays = [np.asarray(a, dtype=np.int32) for a in (domains, cptr, csrc, ctgt, coff, tables)]
    return var_of, arrays


def _solver(backend: str | None):
    if backend is None:
        return _kernels.solve
    if backend == "python":
        return _kernels._natcore_py.solve
    if backend == "cython":
        if _kernels._natcore is None:
            raise RuntimeError("compiled kernel is not available")
        return _kernels._natcore.solve
    raise ValueError(f"unknown backend {backend!r}")


def _solve(F: SetFunctor, G: SetFunctor, backend: str | None):
    var_of, arrays = _nat_problem(F, G)
    cap = _limits.current_limits().max_solutions
    rows = _solver(backend)(*arrays, cap)
    if len(rows) > cap:
        raise _limits.SizeGuardError("max_solutions", cap, len(rows), "natural transformations")
    return var_of, rows


def count_nats(F: SetFunctor, G: SetFunctor, *, backend: str | None = None) -> int:
    return len(_solve(F, G, backend)[1])


def enumerate_nats(
    F: SetFunctor, G: SetFunctor, *, backend: str | None = None
) -> list[NatTransformation]:
    """All natural transformations ``F => G`` in lexicographic component order."""
    var_of, rows = _solve(F, G, backend)
    C = F.base
    targets = {x: G.elements(x) for x in C.objects}
    out = []
    for row in rows.tolist():
        comps = {
            x: {e: targets[x][row[var_of[(x, e)]]] for e in F.elements(x)}
            for x in C.objects
        }
        out.append(NatTransformation(F, G, comps))
    return out


def natural_iso_check(F: SetFunctor, G: SetFunctor) -> NatTransformation | None:
    """A natural isomorphism ``F => G`` if one exists (exhaustive search)."""
    if F.base != G.base or F.variance != G.variance:
        raise FunctorError("functors are not parallel")
    if F.cardinalities() != G.cardinalities():
        return None
    for eta in enumerate_nats(F, G):
        if eta.is_iso():
            return eta
    return None


@dataclass(frozen=True)
class FullyFaithful:
    faithful: bool
    full: bool
    not_injective: tuple[tuple[str, str], ...] = ()
    not_surjective: tuple[tuple[str, str], ...] = ()

    def to_json(self) -> dict:
        return {"faithful": self.faithful, "full": self.full}


def check_fully_faithful(F: Functor) -> FullyFaithful:
    C, D = F.source, F.target
    bad_inj, bad_surj = [], []
    for x in C.objects:
        for y in C.objects:
            image = [F.mor(f) for f in C.hom(x, y)]
            if len(set(image)) != len(image):
                bad_inj.append((x, y))
            if set(image) != set(D.hom(F.ob(x), F.ob(y))):
                bad_surj.append((x, y))
    return FullyFaithful(not bad_inj, not bad_surj, tuple(bad_inj), tuple(bad_surj))


def presheaf_exponential(P: SetFunctor, Q: SetFunctor) -> SetFunctor:
    """The exponential ``Q^P`` in the presheaf category.

    ``(Q^P)(c)`` is ``Nat(Hom(-, c) × P, Q)``, with elements named ``nt<k>``
    in enumeration order; a morphism acts by precomposition.
    """
    from .yoneda import hom_presheaf

    if P.covariant or Q.covariant:
        raise FunctorError("exponentials are built for presheaves (contravariant functors)")
    if P.base != Q.base:
        raise FunctorError("presheaves live on different categories")
    C = P.base
    nats: dict[str, list[NatTransformation]] = {}
    lookup: dict[str, dict[tuple, int]] = {}
    for c in C.objects:
        R = presheaf_product(hom_presheaf(C, c), P)
        nats[c] = enumerate_nats(R, Q)
        lookup[c] = {eta.key(): k for k, eta in enumerate(nats[c])}
    acts: dict[str, dict[str, str]] = {}
    for m in C.morphisms:
        h, c2, c = m.name, m.dom, m.cod  # h: c2 -> c, acts (Q^P)(c) -> (Q^P)(c2)
        table = {}
        for k, eta in enumerate(nats[c]):
            comps = {}
            for z in C.objects:
                comps[z] = [
                    eta[z][pair_name(C.compose(h, g), p)]
                    for g in C.hom(z, c2)
                    for p in P.elements(z)
                ]
            key = tuple(tuple(v) for v in comps.values())
            table[f"nt{k}"] = f"nt{lookup[c2][key]}"
        acts[h] = table
    return SetFunctor(
        C,
        CONTRA,
        {c: [f"nt{k}" for k in range(len(nats[c]))] for c in C.objects},
        acts,
    )

