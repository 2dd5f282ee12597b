"""Small named categories, DAGs and models used by the test suites and the benchmark."""
from __future__ import annotations

import numpy as np

from .causal import CausalDag
from .fincat import (
    FinCategory,
    Morphism,
    Quiver,
    discrete_category,
    free_category,
    poset_category,
    terminal_category,
)
from .scm import DiscreteScm
from .setfun import CO, CONTRA, SetFunctor
from .universal import UnionFind

__all__ = [
    "categories",
    "confounded_scm",
    "dags",
    "identity_scm",
    "random_presheaf",
]


def _chain(n: int) -> FinCategory:
    vs = "ABCDE"[: n + 1]
    arrows = [("fghk"[i], vs[i], vs[i + 1]) for i in range(n)]
    return free_category(Quiver(tuple(vs), tuple(arrows)))


def _iso_pair() -> FinCategory:
    ids = {"A": "id_A", "A'": "id_A'"}
    morphisms = [
        Morphism("id_A", "A", "A"),
        Morphism("id_A'", "A'", "A'"),
        Morphism("i", "A", "A'"),
        Morphism("j", "A'", "A"),
    ]
    compose = {
        ("id_A", "id_A"): "id_A",
        ("id_A'", "id_A'"): "id_A'",
        ("i", "id_A"): "i",
        ("id_A'", "i"): "i",
        ("j", "id_A'"): "j",
        ("id_A", "j"): "j",
        ("j", "i"): "id_A",
        ("i", "j"): "id_A'",
    }
    return FinCategory(["A", "A'"], morphisms, ids, compose)


def _z2() -> FinCategory:
    return FinCategory(
        ["*"],
        [Morphism("id_*", "*", "*"), Morphism("s", "*", "*")],
        {"*": "id_*"},
        {("id_*", "id_*"): "id_*", ("id_*", "s"): "s", ("s", "id_*"): "s", ("s", "s"): "id_*"},
    )


def categories() -> dict[str, FinCategory]:
    out = {"terminal": terminal_category()}
    for n in range(1, 5):
        out[f"chain{n}"] = _chain(n)
    out["collider"] = free_category(Quiver(("A", "B", "C"), (("f", "A", "B"), ("g", "C", "B"))))
    out["fork"] = free_category(Quiver(("A", "B", "C"), (("f", "B", "A"), ("g", "B", "C"))))
    out["diamond"] = free_category(
        Quiver(("A", "B", "C", "D"), (("f", "A", "B"), ("g", "B", "D"), ("h", "A", "C"), ("k", "C", "D")))
    )
    out["parallel"] = free_category(Quiver(("A", "B"), (("f", "A", "B"), ("g", "A", "B"))))
    out["discrete2"] = discrete_category(["A", "B"])
    out["poset2"] = poset_category(["0", "1"], [("0", "1")])
    out["square"] = poset_category(["bot", "x", "y", "top"], [("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")])
    out["iso"] = _iso_pair()
    out["z2"] = _z2()
    return out


def dags() -> dict[str, CausalDag]:
    return {
        "single": CausalDag(["A"]),
        "pair": CausalDag(["A", "B"]),
        "chain": CausalDag("ABC", [("A", "B"), ("B", "C")]),
        "collider": CausalDag("ABC", [("A", "B"), ("C", "B")]),
        "fork": CausalDag("ABC", [("B", "A"), ("B", "C")]),
        "confounder": CausalDag("ZXY", [("Z", "X"), ("Z", "Y"), ("X", "Y")]),
        "diamond": CausalDag("ABCD", [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")]),
        "mbias": CausalDag(
            ["A", "B", "X", "M", "Y"],
            [("A", "X"), ("A", "M"), ("B", "M"), ("B", "Y"), ("X", "Y")],
        ),
        "mediator": CausalDag(
            ["Z", "X", "M", "Y", "W"],
            [("Z", "X"), ("Z", "Y"), ("X", "M"), ("M", "Y"), ("Y", "W")],
        ),
    }


def identity_scm() -> DiscreteScm:
    """``Y := X`` with ``X`` a fair coin."""
    dag = CausalDag("XY", [("X", "Y")])
    return DiscreteScm(dag, {"X": 2, "Y": 2}, {"X": [0.5, 0.5], "Y": [[1.0, 0.0], [0.0, 1.0]]})


def confounded_scm() -> DiscreteScm:
    """``Z -> X``, ``Z -> Y``, ``X -> Y`` with dyadic tables, so sums are exact."""
    dag = CausalDag("ZXY", [("Z", "X"), ("Z", "Y"), ("X", "Y")])
    return DiscreteScm(
        dag,
        {"Z": 2, "X": 2, "Y": 2},
        {
            "Z": [0.75, 0.25],
            "X": [[0.75, 0.25], [0.25, 0.75]],
            # indexed [z, x, y]
            "Y": [[[0.875, 0.125], [0.5, 0.5]], [[0.625, 0.375], [0.125, 0.875]]],
        },
    )


def random_presheaf(
    cat: FinCategory, rng: np.random.Generator, max_size: int = 4, variance: str = CONTRA
) -> SetFunctor:
    """A random quotient of a coproduct of representables, capped at ``max_size`` per object.

    Every presheaf on a finite category arises this way, so repeated draws
    reach all isomorphism classes of small presheaves.
    """
    if variance == CO:
        return random_presheaf(cat.opposite(), rng, max_size, CONTRA).op()
    count = int(rng.choice(4, p=[0.1, 0.3, 0.3, 0.3]))
    reps = [cat.objects[i] for i in rng.integers(len(cat.objects), size=count)]
    elems = {z: [(k, f) for k, c in enumerate(reps) for f in cat.hom(z, c)] for z in cat.objects}
    # P(m)(k, f) = (k, f∘m) for m: z' -> z
    acts = {m.name: {e: (e[0], cat.compose(e[1], m.name)) for e in elems[m.cod]} for m in cat.morphisms}
    uf = {z: UnionFind(elems[z]) for z in cat.objects}

    def close() -> None:
        changed = True
        while changed:
            changed = False
            for m in cat.morphisms:
                classes = uf[m.cod].classes()
                for members in classes.values():
                    first = acts[m.name][members[0]]
                    for e in members[1:]:
                        a, b = uf[m.dom].find(first), uf[m.dom].find(acts[m.name][e])
                        if a != b:
                            uf[m.dom].union(a, b)
                            changed = True

    def sizes() -> dict[str, list]:
        return {z: sorted(uf[z].classes()) for z in cat.objects}

    for _ in range(int(rng.integers(0, 3))):
        z = cat.objects[int(rng.integers(len(cat.objects)))]
        roots = sizes()[z]
        if len(roots) > 1:
            i, j = rng.choice(len(roots), size=2, replace=False)
            uf[z].union(roots[i], roots[j])
            close()
    while True:
        over = [z for z, roots in sizes().items() if len(roots) > max_size]
        if not over:
            break
        roots = sizes()[over[0]]
        i, j = rng.choice(len(roots), size=2, replace=False)
        uf[over[0]].union(roots[i], roots[j])
        close()

    names = {z: {r: f"e{n}" for n, r in enumerate(roots)} for z, roots in sizes().items()}
    on_objects = {z: list(names[z].values()) for z in cat.objects}
    on_morphisms = {}
    for m in cat.morphisms:
        table = {}
        for r, label in names[m.cod].items():
            table[label] = names[m.dom][uf[m.dom].find(acts[m.name][r])]
        on_morphisms[m.name] = table
    return SetFunctor(cat, CONTRA, on_objects, on_morphisms)
