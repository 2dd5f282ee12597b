"""Exact semantics for discrete structural causal models.

A :class:`DiscreteScm` is a causal DAG with a conditional probability table
per variable. Deterministic mechanisms are 0/1 tables. Joint and
interventional distributions are computed exactly by the product of
factors; sampling and the Horvitz-Thompson estimator cover the
finite-sample side.
"""
from __future__ import annotations

import csv
import io
import itertools
import numbers
import string
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from . import limits as _limits
from .causal import CausalDag, intervene

__all__ = [
    "ConfoundingResult",
    "CiResult",
    "Dataset",
    "DiscreteScm",
    "JointTable",
    "PositivityError",
    "ScmError",
    "adjustment_estimate",
    "ate_exact",
    "ci_check",
    "do_distribution",
    "do_marginal",
    "ht_estimate",
    "is_confounded",
    "joint_distribution",
    "propensity_from_scm",
    "random_scm",
    "sample",
]

TOL = 1e-9


class ScmError(ValueError):
    pass


class PositivityError(ScmError):
    pass


class DiscreteScm:
    """Causal DAG plus cardinalities and conditional probability tables.

    ``cpts[v]`` has shape ``(*card[parents], card[v])`` with parents in the
    DAG's declaration order.
    """

    def __init__(self, dag: CausalDag, card: Mapping[str, int], cpts: Mapping[str, Any]):
        self.dag = dag
        self.card = {v: int(card[v]) for v in dag.variables}
        if any(k < 1 for k in self.card.values()):
            raise ScmError("cardinalities must be positive")
        tables = {}
        for v in dag.variables:
            if v not in cpts:
                raise ScmError(f"no conditional probability table for {v!r}")
            t = np.asarray(cpts[v], dtype=float)
            shape = tuple(self.card[p] for p in dag.parents(v)) + (self.card[v],)
            if t.shape != shape:
                raise ScmError(f"table for {v!r} has shape {t.shape}, expected {shape}")
            if (t < 0).any():
                raise ScmError(f"table for {v!r} has negative entries")
            if not np.allclose(t.sum(axis=-1), 1.0, rtol=0, atol=TOL):
                raise ScmError(f"rows of the table for {v!r} do not sum to 1")
            t.setflags(write=False)
            tables[v] = t
        self.cpts = tables

    @property
    def variables(self) -> tuple[str, ...]:
        return self.dag.variables

    @property
    def exogenous(self) -> tuple[str, ...]:
        return tuple(v for v in self.dag.variables if not self.dag.parents(v))

    def clamp(self, assignment: Mapping[str, int]) -> DiscreteScm:
        """The mutilated model: in-edges of targets removed, targets fixed."""
        _check_assignment(self, assignment)
        cpts = dict(self.cpts)
        for v, val in assignment.items():
            point = np.zeros(self.card[v])
            point[val] = 1.0
            cpts[v] = point
        return DiscreteScm(intervene(self.dag, assignment), self.card, cpts)

    def to_json(self) -> dict:
        cpt = {}
        for v in self.variables:
            parents = self.dag.parents(v)
            t = self.cpts[v]
            rows = {}
            for combo in itertools.product(*(range(self.card[p]) for p in parents)):
                rows[",".join(map(str, combo))] = [float(p) for p in t[combo]]
            cpt[v] = {"parents": list(parents), "rows": rows}
        return {"dag": self.dag.to_json(), "card": dict(self.card), "cpt": cpt}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> DiscreteScm:
        dag = CausalDag.from_json(data["dag"])
        card = {str(k): int(v) for k, v in data["card"].items()}
        cpts = {}
        for v in dag.variables:
            spec = data["cpt"][v]
            listed = [str(p) for p in spec.get("parents", [])]
            canonical = list(dag.parents(v))
            if sorted(listed) != sorted(canonical):
                raise ScmError(f"parents of {v!r} in the table do not match the DAG")
            shape = tuple(card[p] for p in listed) + (card[v],)
            t = np.full(shape, np.nan)
            for key, row in spec["rows"].items():
                key = str(key).strip("()[] ")
                combo = tuple(int(k) for k in key.split(",")) if key else ()
                if len(combo) != len(listed):
                    raise ScmError(f"row key {key!r} of {v!r} does not match its parents")
                t[combo] = row
            if np.isnan(t).any():
                raise ScmError(f"table for {v!r} is missing rows")
            perm = [listed.index(p) for p in canonical] + [len(listed)]
            cpts[v] = t.transpose(perm)
        return cls(dag, card, cpts)


def _check_assignment(m: DiscreteScm, assignment: Mapping[str, int]) -> None:
    for v, val in assignment.items():
        if v not in m.card:
            raise ScmError(f"unknown variable {v!r}")
        if not 0 <= int(val) < m.card[v]:
            raise ScmError(f"value {val} out of range for {v!r} (cardinality {m.card[v]})")


@dataclass(frozen=True)
class JointTable:
    variables: tuple[str, ...]
    probs: np.ndarray = field(repr=False)

    @property
    def cards(self) -> tuple[int, ...]:
        return self.probs.shape

    def axis(self, v: str) -> int:
        return self.variables.index(v)

    def marginal(self, keep: Sequence[str]) -> np.ndarray:
        """Probabilities over ``keep`` with axes in the given order."""
        keep = list(keep)
        unknown = [v for v in keep if v not in self.variables]
        if unknown:
            raise ScmError(f"unknown variable(s) {unknown}")
        drop = tuple(i for i, v in enumerate(self.variables) if v not in keep)
        arr = self.probs.sum(axis=drop) if drop else self.probs
        remaining = [v for v in self.variables if v in keep]
        return np.transpose(arr, [remaining.index(v) for v in keep])

    def prob(self, assignment: Mapping[str, int]) -> float:
        arr = self.marginal(list(assignment))
        return float(arr[tuple(int(assignment[v]) for v in assignment)])

    def total(self) -> float:
        return float(self.probs.sum())

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "card": list(self.cards),
            "probs": [float(p) for p in self.probs.ravel()],
        }


def joint_distribution(m: DiscreteScm) -> JointTable:
    """``P(v_1, ..., v_n) = prod_i P(v_i | parents(v_i))``."""
    size = int(np.prod([m.card[v] for v in m.variables], dtype=np.int64))
    _limits.check("max_assignments", size, "joint assignment space")
    letters = {v: string.ascii_letters[i] for i, v in enumerate(m.variables)}
    operands: list[Any] = []
    for v in m.variables:
        operands.append(m.cpts[v])
        operands.append([letters[p] for p in m.dag.parents(v)] + [letters[v]])
    out = "".join(letters[v] for v in m.variables)
    spec = ",".join("".join(op) for op in operands[1::2]) + "->" + out
    probs = np.einsum(spec, *operands[0::2]) if m.variables else np.array(1.0)
    return JointTable(m.variables, probs)


def do_distribution(m: DiscreteScm, assignment: Mapping[str, int]) -> JointTable:
    """Truncated factorisation: joint of the non-intervened variables under ``do``."""
    assignment = {v: int(x) for v, x in assignment.items()}
    joint = joint_distribution(m.clamp(assignment))
    index = tuple(assignment.get(v, slice(None)) for v in m.variables)
    rest = tuple(v for v in m.variables if v not in assignment)
    return JointTable(rest, np.asarray(joint.probs[index]))


def do_marginal(m: DiscreteScm, assignment: Mapping[str, int], y: str) -> np.ndarray:
    return do_distribution(m, assignment).marginal([y])


@dataclass(frozen=True)
class CiResult:
    holds: bool
    max_deviation: float

    def __bool__(self) -> bool:
        return self.holds


def ci_check(j: JointTable, x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()) -> CiResult:
    """Max of ``|P(x|y,z) - P(x|z)|`` over assignments with ``P(y,z) > 0``."""
    xs, ys, zs = list(x), list(y), list(z)
    if set(xs) & set(ys) or set(xs) & set(zs) or set(ys) & set(zs):
        raise ScmError("variable sets must be disjoint")
    arr = j.marginal(xs + ys + zs)
    nx, ny = len(xs), len(ys)
    p_yz = arr.sum(axis=tuple(range(nx)), keepdims=True)
    p_xz = arr.sum(axis=tuple(range(nx, nx + ny)), keepdims=True)
    p_z = p_xz.sum(axis=tuple(range(nx)), keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = arr / p_yz
        rhs = p_xz / p_z
    dev = np.abs(lhs - rhs)
    mask = np.broadcast_to(p_yz > 0, arr.shape)
    worst = float(dev[mask].max()) if mask.any() else 0.0
    return CiResult(worst <= TOL, worst)


def adjustment_estimate(
    m: DiscreteScm, x: str, value: int, y: str, z: Iterable[str] = ()
) -> np.ndarray:
    """``sum_z P(y | x, z) P(z)`` as a distribution over ``y``.

    Raises :class:`PositivityError` for a stratum with ``P(z) > 0`` but
    ``P(x, z) = 0``.
    """
    zs = list(z)
    if x in zs or y in zs or x == y:
        raise ScmError("adjustment set must exclude treatment and outcome")
    _check_assignment(m, {x: value})
    arr = joint_distribution(m).marginal([x, y] + zs)[value]  # axes: y, z...
    p_xz = arr.sum(axis=0)
    joint = joint_distribution(m).marginal(zs) if zs else np.array(1.0)
    out = np.zeros(m.card[y])
    for combo in itertools.product(*(range(m.card[v]) for v in zs)):
        pz = float(joint[combo])
        if pz <= 0:
            continue
        pxz = float(p_xz[combo])
        if pxz <= 0:
            stratum = dict(zip(zs, combo))
            raise PositivityError(f"P({x}={value}, {stratum}) = 0 while P({stratum}) > 0")
        out += arr[(slice(None),) + combo] / pxz * pz
    return out


def _expectation(dist: np.ndarray, values: Sequence[float] | None) -> float:
    codes = np.arange(len(dist), dtype=float) if values is None else np.asarray(values, dtype=float)
    return float(dist @ codes)


def ate_exact(m: DiscreteScm, x: str, y: str, values: Sequence[float] | None = None) -> float:
    """``E[Y | do(X=1)] - E[Y | do(X=0)]``; ``values`` maps outcome codes to numbers."""
    if m.card.get(x) != 2:
        raise ScmError(f"treatment {x!r} must be binary")
    treated = _expectation(do_marginal(m, {x: 1}, y), values)
    control = _expectation(do_marginal(m, {x: 0}, y), values)
    return treated - control


@dataclass(frozen=True)
class ConfoundingResult:
    confounded: bool
    max_gap: float
    skipped: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.confounded


def is_confounded(m: DiscreteScm, x: str, y: str) -> ConfoundingResult:
    """Does ``P(y | do(x))`` differ from ``P(y | x)`` for some ``x, y``?

    Treatment values with zero probability are skipped and reported.
    """
    if x == y:
        raise ScmError("treatment and outcome must differ")
    pxy = joint_distribution(m).marginal([x, y])
    gap, skipped = 0.0, []
    for value in range(m.card[x]):
        px = float(pxy[value].sum())
        if px <= 0:
            skipped.append(value)
            continue
        cond = pxy[value] / px
        gap = max(gap, float(np.abs(do_marginal(m, {x: value}, y) - cond).max()))
    return ConfoundingResult(gap > TOL, gap, tuple(skipped))


@dataclass(frozen=True)
class Dataset:
    columns: tuple[str, ...]
    rows: np.ndarray = field(repr=False)
    seed: int | None = None

    def __len__(self) -> int:
        return int(self.rows.shape[0])

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows.tolist())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> Dataset:
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        rows = [[int(v) for v in r] for r in reader if r]
        arr = np.array(rows, dtype=np.int64).reshape(len(rows), len(header))
        return cls(tuple(header), arr)


def sample(m: DiscreteScm, n: int, seed: int = 0) -> Dataset:
    """Ancestral sampling in topological order; deterministic given ``seed``."""
    if n < 0:
        raise ScmError("sample size must be non-negative")
    rng = np.random.default_rng(seed)
    cols = {v: i for i, v in enumerate(m.variables)}
    rows = np.zeros((n, len(m.variables)), dtype=np.int64)
    for v in m.dag.topological_order():
        parents = m.dag.parents(v)
        probs = m.cpts[v][tuple(rows[:, cols[p]] for p in parents)] if parents else np.broadcast_to(m.cpts[v], (n, m.card[v]))
        cum = np.cumsum(probs, axis=1)
        u = rng.random(n)
        draw = (cum < u[:, None]).sum(axis=1)
        rows[:, cols[v]] = np.minimum(draw, m.card[v] - 1)
    return Dataset(m.variables, rows, seed)


def propensity_from_scm(m: DiscreteScm, treatment: str, covariates: Sequence[str] = ()) -> dict[tuple[int, ...], float]:
    """Exact ``P(treatment = 1 | covariates)`` for every stratum of positive mass."""
    arr = joint_distribution(m).marginal(list(covariates) + [treatment])
    out = {}
    for combo in itertools.product(*(range(m.card[c]) for c in covariates)):
        cell = arr[combo]
        total = float(cell.sum())
        if total > 0:
            out[tuple(combo)] = float(cell[1] / total)
    return out


def ht_estimate(
    d: Dataset,
    treatment: str,
    outcome: str,
    propensity: Mapping[tuple[int, ...], float] | float,
    covariates: Sequence[str] = (),
    outcome_values: Sequence[float] | None = None,
) -> float:
    """Horvitz-Thompson estimate ``mean(T Y / e - (1 - T) Y / (1 - e))``."""
    if len(d) == 0:
        raise ScmError("no rows")
    t = d.column(treatment)
    if not np.isin(t, (0, 1)).all():
        raise ScmError(f"treatment column {treatment!r} is not binary")
    yc = d.column(outcome)
    y = yc.astype(float) if outcome_values is None else np.asarray(outcome_values, dtype=float)[yc]
    if isinstance(propensity, (int, float)):
        e = np.full(len(d), float(propensity))
    else:
        strata = d.rows[:, [d.columns.index(c) for c in covariates]] if covariates else np.zeros((len(d), 0), dtype=np.int64)
        keys, inverse = np.unique(strata, axis=0, return_inverse=True)
        lookup = []
        for key in keys:
            key = tuple(int(k) for k in key)
            if key not in propensity:
                raise ScmError(f"no propensity for stratum {key}")
            lookup.append(propensity[key])
        e = np.asarray(lookup, dtype=float)[np.ravel(inverse)]
    if ((e <= 0) | (e >= 1)).any():
        raise ScmError("propensities must lie strictly between 0 and 1")
    return float(np.mean(t * y / e - (1 - t) * y / (1 - e)))


def random_scm(dag: CausalDag, rng: np.random.Generator, card: int | Mapping[str, int] = 2, floor: float = 0.05) -> DiscreteScm:
    """Rows drawn from the flat simplex, each entry at least ``floor``."""
    cards = {v: int(card) for v in dag.variables} if isinstance(card, numbers.Integral) else dict(card)
    cpts = {}
    for v in dag.variables:
        k = cards[v]
        if k * floor >= 1:
            raise ScmError("floor too large for the cardinality")
        shape = tuple(cards[p] for p in dag.parents(v))
        rows = rng.dirichlet(np.ones(k), size=shape or None)
        cpts[v] = floor + (1 - k * floor) * rows
    return DiscreteScm(dag, cards, cpts)
