"""``causalcat`` command line: one subcommand per engine operation, JSON reports."""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

from . import limits as _limits
from .causal import (
    CausalDag,
    DagError,
    alexandroff_space,
    causal_presheaf,
    d_separated,
    dag_quiver,
    intervene,
    is_backdoor_set,
    specialization_preorder,
)
from .fincat import CategoryError, FinCategory, Functor, Quiver, free_category, validate_category
from .kan import KanError, confounder_approximation, left_kan, right_kan
from .scm import (
    Dataset,
    DiscreteScm,
    ScmError,
    adjustment_estimate,
    ate_exact,
    do_distribution,
    ht_estimate,
    is_confounded,
    joint_distribution,
    propensity_from_scm,
    sample,
)
from .setfun import FunctorError, SetFunctor, enumerate_nats
from .universal import DiagramError
from .yoneda import UctError, crp_check, uct_decompose, yoneda_lemma_check

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


class Outcome(Exception):
    """Carries a violation report out of a handler."""

    def __init__(self, payload: dict):
        super().__init__("violation")
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# ---------------------------------------------------------------- input loading


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _inputs(args, n: int) -> list[str]:
    paths = args.input or []
    if len(paths) < n:
        raise UsageError(f"{args.command} needs {n} input file(s), got {len(paths)}")
    return paths


def _category_from(data: Any, base: Path) -> FinCategory:
    if isinstance(data, str):
        data = _read_json(str(base / data))
    if "nodes" in data:
        cat = free_category(Quiver.from_json(data))
    elif "variables" in data:
        cat = free_category(dag_quiver(CausalDag.from_json(data)))
    else:
        cat = FinCategory.from_json(data)
    _limits.check("max_objects", len(cat.objects), "input category objects")
    return cat


def _load_category(path: str) -> FinCategory:
    return _category_from(_read_json(path), Path(path).parent)


def _load_functor(path: str) -> SetFunctor:
    data = _read_json(path)
    if "category" not in data:
        raise UsageError(f"{path}: functor needs a 'category' (inline or a path)")
    base = _category_from(data["category"], Path(path).parent)
    F = SetFunctor.from_json(data, base)
    _limits.check("max_set", max(F.cardinalities().values(), default=0), "input functor set size")
    return F


def _load_dag(path: str) -> CausalDag:
    return CausalDag.from_json(_read_json(path))


def _load_scm(path: str) -> DiscreteScm:
    return DiscreteScm.from_json(_read_json(path))


def _names(values: Sequence[str] | None) -> list[str]:
    out: list[str] = []
    for v in values or []:
        out.extend(s for s in v.split(",") if s)
    return out


def _assignment(values: Sequence[str] | None) -> dict[str, int]:
    out = {}
    for item in _names(values):
        name, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"expected VAR=VALUE, got {item!r}")
        try:
            out[name] = int(val)
        except ValueError:
            raise UsageError(f"value for {name!r} must be an integer") from None
    return out


# ---------------------------------------------------------------- handlers


def cmd_validate(args) -> dict:
    report = validate_category(_read_json(_inputs(args, 1)[0]))
    payload = report.to_json()
    if not report.valid:
        raise Outcome(payload)
    return payload


def cmd_free_cat(args) -> dict:
    path = _inputs(args, 1)[0]
    q = Quiver.from_json(_read_json(path))
    cat = free_category(q)
    return {
        "objects": len(cat.objects),
        "morphisms": len(cat.morphisms),
        "hom_counts": {f"{x}->{y}": len(cat.hom(x, y)) for x in cat.objects for y in cat.objects},
        "category": cat.to_json(),
    }


def cmd_nats(args) -> dict:
    a, b = _inputs(args, 2)[:2]
    F, G = _load_functor(a), _load_functor(b)
    nats = enumerate_nats(F, G)
    return {"count": len(nats), "transformations": [eta.to_json() for eta in nats]}


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"missing required flag {flag}")
    return value


def cmd_yoneda(args) -> dict:
    F = _load_functor(_inputs(args, 1)[0])
    report = yoneda_lemma_check(F.base, _need(args.object, "--object"), F)
    if not report.holds:
        raise Outcome(report.to_json())
    return report.to_json()


def cmd_crp(args) -> dict:
    cat = _load_category(_inputs(args, 1)[0])
    for x in (_need(args.source, "--source"), _need(args.target, "--target")):
        if not cat.has_object(x):
            raise UsageError(f"unknown object {x!r}")
    report = crp_check(cat, args.source, args.target)
    if not report.holds:
        raise Outcome(report.to_json())
    return report.to_json()


def cmd_uct(args) -> dict:
    P = _load_functor(_inputs(args, 1)[0])
    return uct_decompose(P).to_json()


def cmd_kan(args) -> dict:
    f_path, k_path = _inputs(args, 2)[:2]
    F = _load_functor(f_path)
    K = Functor.from_json(_read_json(k_path))
    kr = left_kan(F, K) if args.mode == "left" else right_kan(F, K)
    return kr.to_json()


def cmd_dsep(args) -> dict:
    g = _load_dag(_inputs(args, 1)[0])
    x, y, z = _names(args.x), _names(args.y), _names(args.z)
    if not x or not y:
        raise UsageError("dsep needs -x and -y")
    return {"x": x, "y": y, "z": z, "d_separated": d_separated(g, x, y, z)}


def _single(values, flag: str) -> str:
    names = _names(values)
    if len(names) != 1:
        raise UsageError(f"{flag} takes exactly one variable")
    return names[0]


def cmd_backdoor(args) -> dict:
    g = _load_dag(_inputs(args, 1)[0])
    x, y, z = _single(args.x, "-x"), _single(args.y, "-y"), _names(args.z)
    return {"x": x, "y": y, "z": z, "backdoor": is_backdoor_set(g, x, y, z)}


def cmd_intervene(args) -> dict:
    g = _load_dag(_inputs(args, 1)[0])
    return {"targets": _names(args.target), "dag": intervene(g, _names(args.target)).to_json()}


def cmd_alexandroff(args) -> dict:
    space = alexandroff_space(_load_dag(_inputs(args, 1)[0]))
    out = space.to_json()
    out["specialization"] = sorted([p, q] for p, q in specialization_preorder(space))
    return out


def cmd_presheaf(args) -> dict:
    g = _load_dag(_inputs(args, 1)[0])
    P = causal_presheaf(g, _single(args.variable, "--variable"))
    return {"sizes": P.cardinalities(), "presheaf": P.to_json(include_category=False)}


def cmd_joint(args) -> dict:
    return joint_distribution(_load_scm(_inputs(args, 1)[0])).to_json()


def cmd_do(args) -> dict:
    m = _load_scm(_inputs(args, 1)[0])
    assignment = _assignment(args.set)
    return {"do": assignment, "distribution": do_distribution(m, assignment).to_json()}


def cmd_adjust(args) -> dict:
    m = _load_scm(_inputs(args, 1)[0])
    x, y = _single(args.x, "-x"), _single(args.y, "-y")
    value = _need(args.value, "--value")
    dist = adjustment_estimate(m, x, value, y, _names(args.z))
    return {"x": x, "value": value, "y": y, "z": _names(args.z), "distribution": [float(p) for p in dist]}


def cmd_ate(args) -> dict:
    m = _load_scm(_inputs(args, 1)[0])
    x, y = _single(args.x, "-x"), _single(args.y, "-y")
    return {"x": x, "y": y, "ate": ate_exact(m, x, y)}


def cmd_confounded(args) -> dict:
    m = _load_scm(_inputs(args, 1)[0])
    x, y = _single(args.x, "-x"), _single(args.y, "-y")
    r = is_confounded(m, x, y)
    return {"x": x, "y": y, "confounded": r.confounded, "max_gap": r.max_gap, "skipped": list(r.skipped)}


def cmd_sample(args) -> dict:
    m = _load_scm(_inputs(args, 1)[0])
    d = sample(m, _need(args.n, "-n"), args.seed)
    text = d.to_csv()
    out: dict[str, Any] = {"columns": list(d.columns), "rows": len(d), "seed": d.seed}
    if args.output:
        Path(args.output).write_text(text)
        out["output"] = args.output
    else:
        out["csv"] = text
    return out


def cmd_ht(args) -> dict:
    paths = _inputs(args, 1)
    try:
        d = Dataset.from_csv(Path(paths[0]).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {paths[0]}: {exc.strerror}") from None
    except (ValueError, StopIteration):
        raise UsageError(f"{paths[0]} is not an integer-coded CSV with a header") from None
    t, y = _need(args.treatment, "--treatment"), _need(args.outcome, "--outcome")
    covariates = _names(args.covariate)
    if args.propensity is not None:
        propensity: Any = args.propensity
    elif len(paths) > 1:
        propensity = propensity_from_scm(_load_scm(paths[1]), t, covariates)
    else:
        raise UsageError("ht needs --propensity or a model file as the second input")
    return {"estimate": ht_estimate(d, t, y, propensity, covariates), "rows": len(d)}


def cmd_confound_kan(args) -> dict:
    cat = _load_category(_inputs(args, 1)[0])
    report = confounder_approximation(cat, _names(args.observable), _single(args.target, "--target"))
    return report.to_json()


COMMANDS: dict[str, tuple[Callable[[Any], dict], str]] = {
    "validate": (cmd_validate, "check the category axioms of a composition table"),
    "free-cat": (cmd_free_cat, "path category of an acyclic quiver"),
    "nats": (cmd_nats, "enumerate natural transformations F => G"),
    "yoneda": (cmd_yoneda, "check Nat(Hom(-,X), F) against F(X)"),
    "crp": (cmd_crp, "check Hom(X,Y) against Nat(Hom(-,X), Hom(-,Y))"),
    "uct": (cmd_uct, "rebuild a presheaf as a colimit of representables"),
    "kan": (cmd_kan, "left or right Kan extension of F along K"),
    "dsep": (cmd_dsep, "d-separation test"),
    "backdoor": (cmd_backdoor, "back-door criterion test"),
    "intervene": (cmd_intervene, "graph surgery"),
    "alexandroff": (cmd_alexandroff, "finite topology of a DAG"),
    "presheaf": (cmd_presheaf, "presheaf of directed paths into a variable"),
    "joint": (cmd_joint, "exact joint distribution"),
    "do": (cmd_do, "exact interventional distribution"),
    "adjust": (cmd_adjust, "adjustment formula"),
    "ate": (cmd_ate, "exact average treatment effect"),
    "confounded": (cmd_confounded, "compare P(y|do(x)) with P(y|x)"),
    "sample": (cmd_sample, "ancestral sampling to CSV"),
    "ht": (cmd_ht, "Horvitz-Thompson estimate from a CSV"),
    "confound-kan": (cmd_confound_kan, "Kan-extension approximation from observables"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-i", "--input", action="append", help="input file (repeatable)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    defaults = _limits.Limits()
    for guard in ("max_objects", "max_morphisms", "max_set", "max_assignments"):
        common.add_argument("--" + guard.replace("_", "-"), type=int, default=getattr(defaults, guard))

    parser = _Parser(prog="causalcat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "yoneda":
            p.add_argument("--object")
        elif name == "crp":
            p.add_argument("--source")
            p.add_argument("--target")
        elif name == "kan":
            p.add_argument("--mode", choices=("left", "right"), default="left")
        elif name in ("dsep", "backdoor", "adjust", "ate", "confounded"):
            p.add_argument("-x", action="append")
            p.add_argument("-y", action="append")
            p.add_argument("-z", action="append")
            if name == "adjust":
                p.add_argument("--value", type=int)
        elif name == "intervene":
            p.add_argument("--target", action="append")
        elif name == "presheaf":
            p.add_argument("--variable", action="append")
        elif name == "do":
            p.add_argument("--set", action="append", metavar="VAR=VALUE")
        elif name == "sample":
            p.add_argument("-n", type=int)
            p.add_argument("-o", "--output")
        elif name == "ht":
            p.add_argument("--treatment")
            p.add_argument("--outcome")
            p.add_argument("--covariate", action="append")
            p.add_argument("--propensity", type=float)
        elif name == "confound-kan":
            p.add_argument("--observable", action="append")
            p.add_argument("--target", action="append")
    return parser


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True)
    lines = [f"{report['command']}: {report['status']}"]
    payload = report["payload"]
    for key in sorted(payload):
        lines.append(f"  {key}: {json.dumps(payload[key], sort_keys=True)}")
    return "\n".join(lines)


def run(argv: Sequence[str] | None = None) -> tuple[int, dict, str]:
    """Parse ``argv``, dispatch, and return ``(exit code, report, rendered text)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    text_requested = "--format=text" in argv or any(
        a == "--format" and b == "text" for a, b in zip(argv, argv[1:])
    )
    fmt = "text" if text_requested else "json"
    command = argv[0] if argv and not argv[0].startswith("-") else None
    try:
        args = build_parser().parse_args(argv)
        command, fmt = args.command, args.format
        overrides = {g: getattr(args, g) for g in ("max_objects", "max_morphisms", "max_set", "max_assignments")}
        with _limits.limits(**overrides):
            payload = COMMANDS[command][0](args)
        code, status = EXIT_OK, "ok"
    except Outcome as out:
        code, status, payload = EXIT_VIOLATION, "violation", out.payload
    except (UctError, KanError) as exc:
        code, status, payload = EXIT_VIOLATION, "violation", {"error": str(exc), "kind": type(exc).__name__}
    except _limits.SizeGuardError as exc:
        code, status = EXIT_ERROR, "error"
        payload = {"error": str(exc), "kind": "SizeGuardError", "guard": exc.guard, "limit": exc.limit}
    except (UsageError, CategoryError, FunctorError, DiagramError, DagError, ScmError) as exc:
        code, status, payload = EXIT_ERROR, "error", {"error": str(exc), "kind": type(exc).__name__}
    except SystemExit as exc:  # --help
        code = EXIT_OK if not exc.code else EXIT_ERROR
        status, payload = ("ok" if code == EXIT_OK else "error"), {}
    except Exception as exc:  # never leak a traceback
        code, status, payload = EXIT_ERROR, "error", {"error": str(exc), "kind": type(exc).__name__}
    report = {
        "command": command,
        "status": status,
        "payload": payload,
        "ms": round((time.perf_counter() - start) * 1000, 3),
    }
    return code, report, _render(report, fmt)


def main(argv: Sequence[str] | None = None) -> int:
    code, _, text = run(argv)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
