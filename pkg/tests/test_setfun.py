import numpy as np
import pytest

from causalcat.corpus import categories, random_presheaf
from causalcat.fincat import (
    Functor,
    Quiver,
    discrete_category,
    free_category,
    full_subcategory,
    identity_functor,
    terminal_category,
    to_terminal,
)
from causalcat.limits import SizeGuardError, limits
from causalcat.setfun import (
    CO,
    CONTRA,
    FunctorError,
    NatTransformation,
    SetFunctor,
    check_fully_faithful,
    count_nats,
    enumerate_nats,
    natural_iso_check,
    presheaf_exponential,
    presheaf_product,
    presheaf_terminal,
    validate_functor,
)
from causalcat.yoneda import hom_presheaf

from oracles import brute_nats

ARROW = free_category(Quiver(("A", "B"), (("f", "A", "B"),)))
COLLIDER = categories()["collider"]


def _keyed(comps):
    return sorted(tuple(sorted((x, tuple(sorted(c.items()))) for x, c in comp.items())) for comp in comps)


def test_constant_singleton_valid():
    for cat in categories().values():
        assert validate_functor(presheaf_terminal(cat)).valid
        assert validate_functor(presheaf_terminal(cat, CO)).valid


def test_hom_presheaf_valid():
    assert validate_functor(hom_presheaf(ARROW, "B")).valid


def test_broken_composite_reported():
    cat = categories()["chain2"]
    F = SetFunctor(
        cat,
        CO,
        {"A": ["a"], "B": ["b0", "b1"], "C": ["c0", "c1"]},
        {"f": {"a": "b0"}, "g": {"b0": "c0", "b1": "c1"}, "g.f": {"a": "c1"}},
    )
    report = validate_functor(F)
    assert not report.valid
    assert any("(g, f)" in v for v in report.violations)


def test_action_totality_checked():
    with pytest.raises(FunctorError):
        SetFunctor(ARROW, CO, {"A": ["a"], "B": ["b"]}, {"f": {}})
    with pytest.raises(FunctorError):
        SetFunctor(ARROW, CO, {"A": ["a"], "B": ["b"]}, {"f": {"a": "zz"}})


def test_nat_examples():
    one = terminal_category()
    pt = presheaf_terminal(one)
    assert len(enumerate_nats(pt, pt)) == 1
    assert len(enumerate_nats(hom_presheaf(ARROW, "A"), hom_presheaf(ARROW, "B"))) == 1
    assert len(enumerate_nats(hom_presheaf(ARROW, "B"), hom_presheaf(ARROW, "A"))) == 0


@pytest.mark.parametrize("name", sorted(categories()))
def test_enumeration_matches_brute_force(name):
    cat = categories()[name]
    rng = np.random.default_rng(sum(map(ord, name)))
    for _ in range(3):
        F = random_presheaf(cat, rng, max_size=3)
        G = random_presheaf(cat, rng, max_size=3)
        found = enumerate_nats(F, G)
        assert _keyed([eta.to_json() for eta in found]) == _keyed(brute_nats(F, G))
        assert all(eta.is_natural() for eta in found)
        # canonical order is stable
        assert [eta.key() for eta in enumerate_nats(F, G)] == [eta.key() for eta in found]


def test_count_invariant_under_relabelling():
    rng = np.random.default_rng(7)
    cat = categories()["diamond"]
    for _ in range(5):
        F, G = random_presheaf(cat, rng), random_presheaf(cat, rng)
        mapping = {x: {e: f"r{e}{x}" for e in reversed(G.elements(x))} for x in cat.objects}
        assert count_nats(F, G) == count_nats(F, G.relabel(mapping))


def test_fully_faithful_examples():
    ff = check_fully_faithful(identity_functor(COLLIDER))
    assert ff.full and ff.faithful
    _, incl = full_subcategory(COLLIDER, ["A", "B"])
    ff = check_fully_faithful(incl)
    assert ff.full and ff.faithful
    ff = check_fully_faithful(to_terminal(ARROW))
    # Hom(B, A) is empty but maps onto the singleton Hom(*, *)
    assert ff.faithful and not ff.full


def test_collapse_of_parallel_pair_not_faithful():
    cat = categories()["parallel"]
    ff = check_fully_faithful(to_terminal(cat))
    assert not ff.faithful


def test_natural_iso_examples():
    P = hom_presheaf(COLLIDER, "B")
    eta = natural_iso_check(P, P)
    assert eta is not None and eta.is_iso()
    assert natural_iso_check(hom_presheaf(COLLIDER, "A"), hom_presheaf(COLLIDER, "B")) is None
    iso = categories()["iso"]
    assert natural_iso_check(hom_presheaf(iso, "A"), hom_presheaf(iso, "A'")) is not None


def test_product_and_terminal():
    rng = np.random.default_rng(3)
    for cat in categories().values():
        P, Q = random_presheaf(cat, rng), random_presheaf(cat, rng)
        PQ = presheaf_product(P, Q)
        assert validate_functor(PQ).valid
        assert all(PQ.size(x) == P.size(x) * Q.size(x) for x in cat.objects)
        assert natural_iso_check(presheaf_product(P, presheaf_terminal(cat)), P) is not None


def test_product_of_homs_on_collider():
    PQ = presheaf_product(hom_presheaf(COLLIDER, "A"), hom_presheaf(COLLIDER, "C"))
    assert PQ.cardinalities() == {"A": 0, "B": 0, "C": 0}


def test_exponential_plain_function_set():
    one = terminal_category()
    P = SetFunctor(one, CONTRA, {"*": ["p0", "p1"]})
    Q = SetFunctor(one, CONTRA, {"*": ["q0", "q1", "q2"]})
    assert presheaf_exponential(P, Q).size("*") == 9


def test_exponential_by_terminal():
    rng = np.random.default_rng(11)
    for name in ("collider", "chain2", "z2"):
        cat = categories()[name]
        Q = random_presheaf(cat, rng)
        E = presheaf_exponential(presheaf_terminal(cat), Q)
        assert validate_functor(E).valid
        assert natural_iso_check(E, Q) is not None


@pytest.mark.parametrize("name", ["collider", "chain1", "z2", "parallel"])
def test_exponential_adjunction_counts(name):
    cat = categories()[name]
    rng = np.random.default_rng(5)
    for _ in range(3):
        R, P, Q = (random_presheaf(cat, rng, max_size=2) for _ in range(3))
        lhs = count_nats(presheaf_product(R, P), Q)
        rhs = count_nats(R, presheaf_exponential(P, Q))
        assert lhs == rhs


def test_function_space_guard():
    cat = discrete_category(["A"])
    F = SetFunctor(cat, CO, {"A": [str(i) for i in range(8)]})
    with limits(max_function_space=1000):
        with pytest.raises(SizeGuardError) as err:
            enumerate_nats(F, F)
    assert err.value.guard == "max_function_space"


def test_solution_cap():
    cat = discrete_category(["A"])
    F = SetFunctor(cat, CO, {"A": ["0", "1", "2"]})
    with limits(max_solutions=10):
        with pytest.raises(SizeGuardError):
            enumerate_nats(F, F)


def test_nat_composition_and_inverse():
    iso = categories()["iso"]
    a, b = hom_presheaf(iso, "A"), hom_presheaf(iso, "A'")
    eta = natural_iso_check(a, b)
    back = eta.inverse()
    assert eta.then(back).key() == NatTransformation(a, a, {x: {e: e for e in a.elements(x)} for x in iso.objects}).key()


def test_mismatched_variance_rejected():
    with pytest.raises(FunctorError):
        enumerate_nats(presheaf_terminal(ARROW, CO), presheaf_terminal(ARROW, CONTRA))


def test_json_round_trip():
    P = hom_presheaf(COLLIDER, "B")
    assert SetFunctor.from_json(P.to_json()) == P
    Q = SetFunctor.from_json(P.to_json(include_category=False), COLLIDER)
    assert Q == P


def test_restrict_along_functor():
    _, incl = full_subcategory(COLLIDER, ["A", "B"])
    P = hom_presheaf(COLLIDER, "B").restrict(incl)
    assert P.cardinalities() == {"A": 1, "B": 1}
    assert isinstance(incl, Functor)
