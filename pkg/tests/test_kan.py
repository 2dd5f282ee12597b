import itertools

import numpy as np
import pytest

from causalcat.corpus import categories, random_presheaf
from causalcat.fincat import (
    CategoryError,
    Functor,
    Quiver,
    discrete_category,
    free_category,
    full_subcategory,
    identity_functor,
)
from causalcat.kan import (
    colimit_as_kan,
    confounder_approximation,
    kan_universality_check,
    left_kan,
    right_kan,
)
from causalcat.setfun import CO, CONTRA, SetFunctor, identity_nat, natural_iso_check
from causalcat.universal import Diagram, colimit_of_set_diagram, shape_diagram

from oracles import brute_nats

ARROW = free_category(Quiver(("A", "B"), (("f", "A", "B"),)))


def _inclusion_of_A():
    return full_subcategory(ARROW, ["A"])


@pytest.mark.parametrize("name", sorted(categories()))
def test_along_identity(name):
    cat = categories()[name]
    rng = np.random.default_rng(sum(map(ord, name)))
    F = random_presheaf(cat, rng, variance=CO)
    K = identity_functor(cat)
    assert natural_iso_check(left_kan(F, K).extension, F) is not None
    assert natural_iso_check(right_kan(F, K).extension, F) is not None


def test_inclusion_examples():
    sub, K = _inclusion_of_A()
    F = SetFunctor(sub, CO, {"A": ["p", "q"]})
    lan = left_kan(F, K)
    assert lan.extension.size("B") == 2
    assert lan.commas["B"].objects == ("(A,*,f)",)
    ran = right_kan(F, K)
    assert ran.extension.size("B") == 1
    assert ran.commas["B"].objects == ()


def test_empty_and_singleton():
    sub, K = _inclusion_of_A()
    empty = SetFunctor(sub, CO, {"A": []})
    assert left_kan(empty, K).extension.cardinalities() == {"A": 0, "B": 0}
    point = SetFunctor(sub, CO, {"A": ["*"]})
    assert right_kan(point, K).extension.cardinalities() == {"A": 1, "B": 1}


def test_unit_and_counit_accessors():
    sub, K = _inclusion_of_A()
    F = SetFunctor(sub, CO, {"A": ["p"]})
    lan, ran = left_kan(F, K), right_kan(F, K)
    assert lan.unit.is_natural()
    assert ran.counit.is_natural()
    with pytest.raises(AttributeError):
        lan.counit
    with pytest.raises(AttributeError):
        ran.unit


def test_universality_identity_factorisation():
    sub, K = _inclusion_of_A()
    F = SetFunctor(sub, CO, {"A": ["p", "q"]})
    kr = left_kan(F, K)
    r = kan_universality_check(kr, kr.extension, kr.unit)
    assert r.unique
    assert r.alpha.key() == identity_nat(kr.extension).key()


def test_universality_contract_violation():
    sub, K = _inclusion_of_A()
    F = SetFunctor(sub, CO, {"A": ["p"]})
    G = SetFunctor(ARROW, CO, {"A": [], "B": ["b"]})
    r = kan_universality_check(left_kan(F, K), G)
    assert r.alpha is None and r.contract_violation is not None


def _random_instances(rng, count):
    """(F on C, K: C -> D, G on D) with C a full subcategory of a corpus category."""
    cats = categories()
    names = ["chain2", "collider", "fork", "diamond", "square", "parallel", "iso", "chain3"]
    out = []
    while len(out) < count:
        D = cats[names[int(rng.integers(len(names)))]]
        keep = [x for x in D.objects if rng.random() < 0.6] or [D.objects[0]]
        C, K = full_subcategory(D, keep)
        F = random_presheaf(C, rng, max_size=3, variance=CO)
        G = random_presheaf(D, rng, max_size=2, variance=CO)
        out.append((F, K, G))
    return out


def test_adjunction_counts_random():
    rng = np.random.default_rng(2024)
    for F, K, G in _random_instances(rng, 20):
        lan = kan_universality_check(left_kan(F, K), G)
        assert lan.nat_count_extension == lan.nat_count_restricted
        ran = kan_universality_check(right_kan(F, K), G)
        assert ran.nat_count_extension == ran.nat_count_restricted
        if lan.nat_count_restricted:
            assert lan.unique
        if ran.nat_count_restricted:
            assert ran.unique


def test_fully_faithful_restriction_recovers_f():
    rng = np.random.default_rng(99)
    for F, K, _ in _random_instances(rng, 15):
        assert natural_iso_check(left_kan(F, K).extension.restrict(K), F) is not None
        assert natural_iso_check(right_kan(F, K).extension.restrict(K), F) is not None


def test_colimit_as_kan_examples():
    d = shape_diagram("coproduct", [["a", "b"], ["x", "y", "z"]])
    r = colimit_as_kan(d)
    assert (r.kan_size, r.colimit_size, r.isomorphic) == (5, 5, True)
    d = shape_diagram("coequalizer", {"X": ["x"], "Y": ["1", "2"], "f": {"x": "1"}, "g": {"x": "2"}})
    r = colimit_as_kan(d)
    assert r.isomorphic and r.kan_size == colimit_of_set_diagram(d).size == 1
    index = discrete_category([])
    r = colimit_as_kan(Diagram(index, SetFunctor(index, CO, {})))
    assert (r.kan_size, r.colimit_size) == (0, 0)


def test_colimit_as_kan_random():
    rng = np.random.default_rng(5)
    cats = list(categories().values())
    for k in range(20):
        J = cats[k % len(cats)]
        d = Diagram(J, random_presheaf(J, rng, variance=CO))
        r = colimit_as_kan(d)
        assert r.isomorphic


def _ran_oracle_sizes(c, observables, x):
    """|Ran(c)| = |Nat(Hom_c(K-, c), Hom_c(-, x)|_D)| by brute force."""
    D, K = full_subcategory(c, observables)
    from causalcat.yoneda import hom_presheaf

    P = hom_presheaf(c, x).restrict(K)
    sizes = {}
    for obj in c.objects:
        H = SetFunctor(
            D,
            CONTRA,
            {d: c.hom(d, obj) for d in D.objects},
            {m.name: {g: c.compose(g, m.name) for g in c.hom(m.cod, obj)} for m in D.morphisms},
        )
        sizes[obj] = len(brute_nats(H, P))
    return sizes


def test_confounder_full_observation_agrees():
    cat = categories()["diamond"]
    r = confounder_approximation(cat, cat.objects, "D")
    assert all(r.agreement.values())


def test_confounder_collider_matches_oracles():
    cat = categories()["collider"]
    r = confounder_approximation(cat, ["A", "B"], "B")
    # Lan of a representable along a fully faithful inclusion is representable
    assert r.extended_left.cardinalities() == {x: len(cat.hom(x, "B")) for x in cat.objects}
    assert r.extended_right.cardinalities() == _ran_oracle_sizes(cat, ["A", "B"], "B")
    assert r.extended_left.size("C") == r.true_presheaf.size("C") == 1
    assert r.agreement == {"A": True, "B": True, "C": True}


def test_confounder_chain_hidden_middle():
    cat = categories()["chain2"]  # A -f-> B -g-> C
    r = confounder_approximation(cat, ["A", "C"], "C")
    assert r.agreement["A"] and r.agreement["C"]
    assert r.true_presheaf.size("B") == 1
    assert r.extended_right.cardinalities() == _ran_oracle_sizes(cat, ["A", "C"], "C")
    assert r.extended_left.size("B") == 1


def test_confounder_diamond_right_extension_disagrees():
    cat = categories()["diamond"]  # A -> B -> D, A -> C -> D
    r = confounder_approximation(cat, ["A", "D"], "D")
    assert r.extended_right.cardinalities() == _ran_oracle_sizes(cat, ["A", "D"], "D")
    assert all(r.agreement_left.values())
    assert not r.agreement_right["B"] and not r.agreement_right["C"]
    assert r.extended_right.size("B") == 2 and r.true_presheaf.size("B") == 1


@pytest.mark.parametrize("name", ["chain3", "collider", "fork", "diamond", "square", "parallel"])
def test_left_extension_of_representable_always_agrees(name):
    cat = categories()[name]
    for k in range(1, len(cat.objects)):
        for obs in itertools.combinations(cat.objects, k):
            for x in obs:
                r = confounder_approximation(cat, obs, x)
                assert all(r.agreement_left.values())
                assert r.extended_right.cardinalities() == _ran_oracle_sizes(cat, obs, x)


def test_confounder_target_must_be_observable():
    with pytest.raises(CategoryError):
        confounder_approximation(categories()["collider"], ["A", "B"], "C")


def test_kan_json_shape():
    sub, K = _inclusion_of_A()
    F = SetFunctor(sub, CO, {"A": ["p"]})
    out = left_kan(F, K).to_json()
    assert out["mode"] == "left" and out["sizes"] == {"A": 1, "B": 1}
    assert isinstance(K, Functor)
