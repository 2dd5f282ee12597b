import numpy as np
import pytest

from causalcat.corpus import categories, random_presheaf
from causalcat.fincat import CategoryError, Quiver, discrete_category, free_category, terminal_category
from causalcat.setfun import CONTRA, SetFunctor, presheaf_terminal, validate_functor
from causalcat.yoneda import (
    category_of_elements,
    crp_check,
    hom_copresheaf,
    hom_presheaf,
    uct_decompose,
    yoneda_lemma_check,
)

ARROW = free_category(Quiver(("A", "B"), (("f", "A", "B"),)))
COLLIDER = categories()["collider"]


def test_hom_presheaf_sizes():
    assert hom_presheaf(terminal_category(), "*").cardinalities() == {"*": 1}
    assert hom_presheaf(ARROW, "B").cardinalities() == {"A": 1, "B": 1}
    assert hom_presheaf(COLLIDER, "B").cardinalities() == {"A": 1, "B": 1, "C": 1}
    assert hom_presheaf(COLLIDER, "A").cardinalities() == {"A": 1, "B": 0, "C": 0}
    with pytest.raises(CategoryError):
        hom_presheaf(COLLIDER, "Q")


def test_hom_copresheaf():
    H = hom_copresheaf(COLLIDER, "A")
    assert H.cardinalities() == {"A": 1, "B": 1, "C": 0}
    assert validate_functor(H).valid


def test_yoneda_examples():
    one = discrete_category(["X"])
    F = SetFunctor(one, CONTRA, {"X": ["a", "b"]})
    r = yoneda_lemma_check(one, "X", F)
    assert (r.nat_count, r.fx_count, r.holds) == (2, 2, True)
    r = yoneda_lemma_check(ARROW, "A", hom_presheaf(ARROW, "B"))
    assert (r.nat_count, r.fx_count, r.holds) == (1, 1, True)
    empty = SetFunctor(ARROW, CONTRA, {"A": [], "B": []})
    assert yoneda_lemma_check(ARROW, "A", empty).nat_count == 0


def test_yoneda_witness_maps_to_identity_image():
    P = hom_presheaf(COLLIDER, "B")
    r = yoneda_lemma_check(COLLIDER, "A", P)
    assert sorted(e for _, e in r.bijection_witness) == sorted(P.elements("A"))


@pytest.mark.parametrize("name", sorted(categories()))
def test_yoneda_random(name):
    cat = categories()[name]
    rng = np.random.default_rng(sum(map(ord, name)))
    for _ in range(3):
        F = random_presheaf(cat, rng)
        for x in cat.objects:
            r = yoneda_lemma_check(cat, x, F)
            assert r.holds and r.nat_count == F.size(x)


def test_crp_examples():
    r = crp_check(COLLIDER, "A", "A")
    assert r.hom_count == r.nat_count >= 1 and r.holds
    r = crp_check(COLLIDER, "A", "B")
    assert (r.hom_count, r.nat_count, r.holds) == (1, 1, True)
    r = crp_check(COLLIDER, "A", "C")
    assert (r.hom_count, r.nat_count, r.holds) == (0, 0, True)


def test_crp_parallel_pair():
    cat = categories()["parallel"]
    r = crp_check(cat, "A", "B")
    assert (r.hom_count, r.nat_count) == (2, 2)
    assert sorted(k for _, k in r.bijection_witness) == [0, 1]


def test_elements_of_representable():
    E = category_of_elements(hom_presheaf(ARROW, "B"))
    assert len(E.category.objects) == 2
    non_id = [m for m in E.category.morphisms if not E.category.is_identity(m.name)]
    assert len(non_id) == 1
    assert validate_functor(E.projection).valid


def test_elements_of_terminal_is_base():
    for cat in categories().values():
        E = category_of_elements(presheaf_terminal(cat))
        assert len(E.category.objects) == len(cat.objects)
        assert len(E.category.morphisms) == len(cat.morphisms)


def test_elements_of_empty():
    P = SetFunctor(COLLIDER, CONTRA, {x: [] for x in COLLIDER.objects})
    assert category_of_elements(P).category.objects == ()


def test_elements_morphism_orientation():
    # (c, P(f)x') -> (c', x') for f: c -> c'
    P = hom_presheaf(ARROW, "B")
    E = category_of_elements(P)
    (m,) = [m for m in E.category.morphisms if not E.category.is_identity(m.name)]
    assert E.element_of[m.dom] == ("A", "f") and E.element_of[m.cod] == ("B", "id_B")


@pytest.mark.parametrize("name", sorted(categories()))
def test_elements_object_count(name):
    cat = categories()[name]
    P = random_presheaf(cat, np.random.default_rng(len(name)))
    E = category_of_elements(P)
    assert len(E.category.objects) == sum(P.cardinalities().values())
    assert validate_functor(E.projection).valid


def test_uct_representable_has_terminal_element():
    P = hom_presheaf(ARROW, "B")
    r = uct_decompose(P)
    assert r.iso.is_iso() and r.iso.is_natural()
    cat = r.elements.category
    top = "(B,id_B)"
    assert all(len(cat.hom(x, top)) == 1 for x in cat.objects)


def test_uct_terminal_presheaf():
    r = uct_decompose(presheaf_terminal(ARROW))
    assert r.colimit.cardinalities() == {"A": 1, "B": 1}


def test_uct_empty():
    P = SetFunctor(ARROW, CONTRA, {"A": [], "B": []})
    r = uct_decompose(P)
    assert r.colimit.cardinalities() == {"A": 0, "B": 0}


@pytest.mark.parametrize("name", sorted(categories()))
def test_uct_random(name):
    cat = categories()[name]
    rng = np.random.default_rng(sum(map(ord, name)) + 3)
    for _ in range(3):
        P = random_presheaf(cat, rng)
        r = uct_decompose(P)
        assert r.colimit.cardinalities() == P.cardinalities()
