"""Acceptance criteria, one check per criterion with its time budget.

Run under pytest, or directly with ``python tests/test_acceptance.py`` for
the summary lines only.
"""
import itertools
import json
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from causalcat.causal import (  # noqa: E402
    CausalDag,
    alexandroff_space,
    d_separated,
    is_backdoor_set,
    is_continuous,
    specialization_preorder,
)
from causalcat.cli import COMMANDS, run  # noqa: E402
from causalcat.corpus import categories, confounded_scm, dags, identity_scm, random_presheaf  # noqa: E402
from causalcat.fincat import full_subcategory, identity_functor  # noqa: E402
from causalcat.kan import colimit_as_kan, confounder_approximation, kan_universality_check, left_kan, right_kan  # noqa: E402
from causalcat.scm import (  # noqa: E402
    adjustment_estimate,
    ate_exact,
    ci_check,
    do_marginal,
    ht_estimate,
    joint_distribution,
    propensity_from_scm,
    random_scm,
    sample,
)
from causalcat.setfun import CO, natural_iso_check  # noqa: E402
from causalcat.universal import Diagram, colimit_of_set_diagram  # noqa: E402
from causalcat.yoneda import crp_check, uct_decompose, yoneda_lemma_check  # noqa: E402

from cli_fixtures import command_lines, write_inputs  # noqa: E402
from oracles import do_marginal_oracle, reachable  # noqa: E402

TOL = 1e-9


def _seed(*parts):
    return sum(map(ord, "/".join(map(str, parts))))


def crp_suite():
    cats = categories()
    pairs = 0
    for name, cat in cats.items():
        for x, y in itertools.product(cat.objects, repeat=2):
            r = crp_check(cat, x, y)
            if not (r.holds and r.hom_count == r.nat_count == len(r.bijection_witness)):
                return False, f"{name} ({x}, {y})"
            pairs += 1
    required = {"terminal", "chain1", "chain2", "chain3", "chain4", "collider", "diamond", "poset2", "iso"}
    return len(cats) >= 10 and required <= set(cats), f"{len(cats)} categories, {pairs} pairs"


def yoneda_suite():
    checks = 0
    for name, cat in categories().items():
        rng = np.random.default_rng(_seed("yoneda", name))
        for _ in range(5):
            F = random_presheaf(cat, rng, max_size=4)
            for x in cat.objects:
                r = yoneda_lemma_check(cat, x, F)
                if not (r.holds and r.nat_count == F.size(x)):
                    return False, f"{name} at {x}"
                checks += 1
    return True, f"{checks} (category, object, presheaf) checks"


def uct_suite():
    checks = 0
    for name, cat in categories().items():
        rng = np.random.default_rng(_seed("uct", name))
        for _ in range(5):
            P = random_presheaf(cat, rng, max_size=4)
            r = uct_decompose(P)
            if not (r.iso.is_iso() and r.iso.is_natural() and r.iso.target == P):
                return False, name
            checks += 1
    return True, f"{checks} presheaves rebuilt"


def kan_suite():
    cats = categories()
    rng = np.random.default_rng(_seed("kan"))
    for name, cat in cats.items():
        F = random_presheaf(cat, rng, variance=CO)
        K = identity_functor(cat)
        if natural_iso_check(left_kan(F, K).extension, F) is None:
            return False, f"Lan along identity on {name}"
        if natural_iso_check(right_kan(F, K).extension, F) is None:
            return False, f"Ran along identity on {name}"
    names = ["chain2", "collider", "fork", "diamond", "square", "parallel", "iso", "chain3"]
    instances = 0
    while instances < 20:
        D = cats[names[instances % len(names)]]
        keep = [x for x in D.objects if rng.random() < 0.6] or [D.objects[0]]
        C, K = full_subcategory(D, keep)
        F = random_presheaf(C, rng, max_size=3, variance=CO)
        G = random_presheaf(D, rng, max_size=2, variance=CO)
        lan, ran = left_kan(F, K), right_kan(F, K)
        if natural_iso_check(lan.extension.restrict(K), F) is None:
            return False, f"fully faithful restriction on {D.objects}/{keep}"
        a, b = kan_universality_check(lan, G), kan_universality_check(ran, G)
        if a.nat_count_extension != a.nat_count_restricted or b.nat_count_extension != b.nat_count_restricted:
            return False, f"adjunction counts on {keep}"
        instances += 1
    diagrams = 0
    all_cats = list(cats.values())
    for k in range(20):
        J = all_cats[k % len(all_cats)]
        d = Diagram(J, random_presheaf(J, rng, variance=CO))
        r = colimit_as_kan(d)
        if not (r.isomorphic and r.kan_size == colimit_of_set_diagram(d, verify_up_to=1).size):
            return False, f"colimit as Kan on diagram {k}"
        diagrams += 1
    return True, f"{len(cats)} identities, {instances} inclusions, {diagrams} diagrams"


def confounder_demo():
    r = confounder_approximation(categories()["collider"], ["A", "B"], "B")
    sizes = r.to_json()
    ok = not r.agreement["C"] and r.agreement["A"] and r.agreement["B"]
    return ok, (
        f"true {sizes['true_sizes']}, left {sizes['left_sizes']}, right {sizes['right_sizes']}"
    )


SOUNDNESS_DAGS = ["chain", "collider", "fork", "confounder", "diamond", "mbias", "mediator"]


def dsep_ci_soundness():
    checked, worst = 0, 0.0
    for name in SOUNDNESS_DAGS:
        g = dags()[name]
        rng = np.random.default_rng(_seed("dsep", name))
        joints = [joint_distribution(random_scm(g, rng)) for _ in range(20)]
        for x, y in itertools.permutations(g.variables, 2):
            rest = [v for v in g.variables if v not in (x, y)]
            for k in range(len(rest) + 1):
                for z in itertools.combinations(rest, k):
                    if not d_separated(g, {x}, {y}, set(z)):
                        continue
                    for j in joints:
                        dev = ci_check(j, [x], [y], list(z)).max_deviation
                        worst = max(worst, dev)
                        if dev > TOL:
                            return False, f"{name}: {x} _|_ {y} | {z} deviates by {dev:.3g}"
                    checked += 1
    return True, f"{checked} separated triples x 20 models, worst deviation {worst:.2g}"


def adjustment_correctness():
    sets, worst = 0, 0.0
    for name, g in dags().items():
        m = random_scm(g, np.random.default_rng(_seed("adjust", name)))
        for x, y in itertools.permutations(g.variables, 2):
            rest = [v for v in g.variables if v not in (x, y)]
            for k in range(len(rest) + 1):
                for z in itertools.combinations(rest, k):
                    if not is_backdoor_set(g, x, y, z):
                        continue
                    sets += 1
                    for xv in range(2):
                        gap = float(np.abs(adjustment_estimate(m, x, xv, y, z) - do_marginal(m, {x: xv}, y)).max())
                        worst = max(worst, gap)
                        if gap > TOL:
                            return False, f"{name}: Z={z} for ({x}, {y}) off by {gap:.3g}"
    return True, f"{sets} back-door sets, worst gap {worst:.2g}"


def ate_check():
    one = ate_exact(identity_scm(), "X", "Y")
    m = confounded_scm()
    oracle = do_marginal_oracle(m, "X", 1, "Y")[1] - do_marginal_oracle(m, "X", 0, "Y")[1]
    got = ate_exact(m, "X", "Y")
    return one == 1.0 and got == oracle, f"identity model {one}, confounded {got} vs oracle {oracle}"


def ht_check():
    m = confounded_scm()
    e = propensity_from_scm(m, "X", ["Z"])
    ests = np.array([ht_estimate(sample(m, 10_000, seed=s), "X", "Y", e, ["Z"]) for s in range(100)])
    se = ests.std(ddof=1) / np.sqrt(len(ests))
    truth = ate_exact(m, "X", "Y")
    gap = abs(ests.mean() - truth)
    return gap <= 3 * se, f"mean {ests.mean():.5f} vs {truth}, |gap| {gap:.2g} <= 3 SE {3 * se:.2g}"


def _all_dags(n):
    vs = "ABC"[:n]
    pairs = [(a, b) for a, b in itertools.permutations(vs, 2)]
    for mask in itertools.product((0, 1), repeat=len(pairs)):
        edges = [p for p, bit in zip(pairs, mask) if bit]
        if any((b, a) in edges for a, b in edges):
            continue
        try:
            yield CausalDag(vs, edges)
        except ValueError:
            continue


def topology_check():
    for name, g in dags().items():
        s = alexandroff_space(g)
        opens = s.open_sets()
        if not all(a | b in opens and a & b in opens for a, b in itertools.product(opens, repeat=2)):
            return False, f"closure fails on {name}"
        if specialization_preorder(s) != {(p, q) for p in g.variables for q in reachable(g.edges, p)}:
            return False, f"preorder differs from reachability on {name}"
    small = [g for n in (1, 2, 3) for g in _all_dags(n)]
    maps = 0
    for g, h in itertools.product(small, repeat=2):
        s, t = alexandroff_space(g), alexandroff_space(h)
        ps, pt = specialization_preorder(s), specialization_preorder(t)
        for img in itertools.product(h.variables, repeat=len(g.variables)):
            f = dict(zip(g.variables, img))
            if is_continuous(f, s, t) != all((f[p], f[q]) in pt for p, q in ps):
                return False, f"continuity mismatch {g.edges} -> {h.edges}"
            maps += 1
    return True, f"{len(dags())} corpus DAGs, {len(small)} small spaces, {maps} maps"


def cli_determinism():
    with tempfile.TemporaryDirectory() as tmp:
        lines = command_lines(write_inputs(Path(tmp)))
        for name in COMMANDS:
            a, b = run(lines[name])[1], run(lines[name])[1]
            a.pop("ms"), b.pop("ms")
            if a["status"] != "ok" or json.dumps(a, sort_keys=True) != json.dumps(b, sort_keys=True):
                return False, name
    return True, f"{len(COMMANDS)} commands"


CRITERIA = [
    (1, "CRP suite", crp_suite, 30),
    (2, "Yoneda suite", yoneda_suite, 60),
    (3, "UCT suite", uct_suite, 120),
    (4, "Kan suite", kan_suite, 120),
    (5, "confounder demonstration", confounder_demo, 1),
    (6, "d-separation implies CI", dsep_ci_soundness, 60),
    (7, "adjustment correctness", adjustment_correctness, 30),
    (8, "exact ATE", ate_check, 5),
    (9, "Horvitz-Thompson", ht_check, 60),
    (10, "Alexandroff topology", topology_check, 30),
    (11, "CLI determinism", cli_determinism, 10),
]


def evaluate(check, budget):
    start = time.perf_counter()
    ok, detail = check()
    elapsed = time.perf_counter() - start
    return ok and elapsed < budget, ok, elapsed, detail


def line(number, title, passed, elapsed, budget, detail):
    return f"[{'PASS' if passed else 'FAIL'}] {number:>2} {title}: {detail} ({elapsed:.2f} s of {budget} s)"


@pytest.mark.parametrize("number,title,check,budget", CRITERIA, ids=[f"c{n:02d}" for n, *_ in CRITERIA])
def test_criterion(number, title, check, budget, capsys):
    passed, ok, elapsed, detail = evaluate(check, budget)
    with capsys.disabled():
        print("\n" + line(number, title, passed, elapsed, budget, detail))
    assert ok, detail
    assert elapsed < budget, f"{elapsed:.2f} s over the {budget} s budget"


if __name__ == "__main__":
    failures = 0
    for number, title, check, budget in CRITERIA:
        passed, _, elapsed, detail = evaluate(check, budget)
        failures += not passed
        print(line(number, title, passed, elapsed, budget, detail))
    sys.exit(1 if failures else 0)
