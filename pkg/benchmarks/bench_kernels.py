"""Time the compiled and pure-Python natural-transformation solvers side by side.

    python benchmarks/bench_kernels.py [--repeat 5] [--json]
"""
import argparse
import json
import timeit

import numpy as np

from causalcat import _kernels
from causalcat.corpus import categories, random_presheaf
from causalcat.fincat import discrete_category
from causalcat.limits import limits
from causalcat.setfun import CO, SetFunctor, count_nats, presheaf_product


def workloads():
    cats = categories()
    rng = np.random.default_rng(0)
    one = discrete_category(["A"])
    big = SetFunctor(one, CO, {"A": [str(i) for i in range(7)]})
    yield "functions 7 -> 7", big, big
    pair = discrete_category(["A", "B"])
    P = SetFunctor(pair, CO, {"A": list("abcd"), "B": list("xyz")})
    yield "discrete pair 4,3 -> 4,3", P, P
    for name in ("diamond", "chain4", "square", "z2"):
        cat = cats[name]
        P = presheaf_product(random_presheaf(cat, rng, max_size=3), random_presheaf(cat, rng, max_size=3))
        yield f"{name} endomorphisms of P x Q", P, P


def time_backend(F, G, backend, repeat):
    n = count_nats(F, G, backend=backend)
    best = min(timeit.repeat(lambda: count_nats(F, G, backend=backend), number=1, repeat=repeat))
    return n, best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    backends = ["python"] + (["cython"] if _kernels._natcore is not None else [])
    rows = []
    with limits(max_solutions=10**7, max_function_space=10**13):
        for label, F, G in workloads():
            row = {"workload": label}
            for b in backends:
                count, secs = time_backend(F, G, b, args.repeat)
                row["solutions"] = count
                row[b] = secs
            if "cython" in row:
                row["speedup"] = row["python"] / row["cython"]
            rows.append(row)

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'workload':32} {'solutions':>10} " + " ".join(f"{b + ' s':>11}" for b in backends) + "  speedup")
    for r in rows:
        times = " ".join(f"{r[b]:11.5f}" for b in backends)
        speed = f"{r['speedup']:8.1f}x" if "speedup" in r else ""
        print(f"{r['workload']:32} {r['solutions']:>10} {times}  {speed}")


if __name__ == "__main__":
    main()
