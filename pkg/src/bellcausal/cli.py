"""Command-line interface.

Exit codes: 0 success, 1 a case or check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import casebook
from .discovery import (
    NoFaithfulStructure,
    enumerate_latent_structures,
    filter_faithful,
    icstar_pattern,
    wermuth_lauritzen,
)
from .distributions import DEFAULT_TOL, DistributionError, all_ci, joint_from_model, marginalize
from .faithfulness import classify_independences, perturbation_runs
from .graphs import GraphError, expand_pattern, to_dot
from .independence import CISet, parse_statement, semigraphoid_closure
from .modelio import load_model, model_to_json
from .quantum import BellSpecError, bell_joint, chsh_value, outcome_distribution, preset_spec


class UsageError(Exception):
    pass


@dataclass
class Output:
    text: str
    data: Any
    dots: dict[str, str] = field(default_factory=dict)
    failed: bool = False


def _split(text: str | None) -> list[str] | None:
    if text is None:
        return None
    return [v.strip() for v in text.split(",") if v.strip()]


def _constraints(items: Sequence[str] | None) -> list[tuple[str, str]]:
    out = []
    for item in items or ():
        parts = item.split("<")
        if len(parts) != 2 or not all(p.strip() for p in parts):
            raise UsageError(f"order constraint {item!r} must look like S<T")
        out.append((parts[0].strip(), parts[1].strip()))
    return out


def _ci_input(args: argparse.Namespace) -> tuple[CISet, list[str]]:
    if args.model:
        m = load_model(args.model)
        observed = _split(args.observed) or list(m.variables)
        d = joint_from_model(m, args.tol)
        if set(observed) != set(d.variables):
            d = marginalize(d, observed)
        return all_ci(d, "full_sets", args.tol), observed
    if not args.ci:
        raise UsageError("give --model or --ci")
    try:
        gens = [parse_statement(s) for s in args.ci.split(";") if s.strip()]
    except ValueError as err:
        raise UsageError(str(err)) from err
    variables = _split(args.vars)
    if not variables:
        seen: list[str] = []
        for g in gens:
            for v in sorted(g.variables):
                if v not in seen:
                    seen.append(v)
        variables = seen
    return semigraphoid_closure(CISet(gens, variables)), variables


def _render_ci(ci: CISet) -> str:
    return casebook.render_ci(ci)


# ---------------------------------------------------------------------------
# commands


def cmd_model(args: argparse.Namespace) -> Output:
    m = load_model(args.path)
    if args.action == "show":
        lines = [f"DAG {m.dag}"]
        for v in m.variables:
            cpt = m.cpts[v]
            lines.append(f"{v} (cardinality {m.cardinalities[v]}) given {list(cpt.parents) or 'nothing'}")
            for key in sorted(cpt.table):
                given = ", ".join(f"{p}={k}" for p, k in zip(cpt.parents, key))
                lines.append(f"  {given or '-'}: " + " ".join(str(x) for x in cpt.table[key]))
        return Output("\n".join(lines), model_to_json(m), {"model.dot": to_dot(m.dag, "model")})
    d = joint_from_model(m, args.tol)
    observed = _split(args.observed)
    if observed:
        d = marginalize(d, observed)
    if args.action == "joint":
        return Output(d.bracket(), d.to_json())
    if args.action == "ci":
        ci = all_ci(d, args.scope, args.tol)
        return Output(_render_ci(ci), {"variables": list(d.variables), "ci": ci.to_json()})
    return Output(to_dot(m.dag, "model"), None, {"model.dot": to_dot(m.dag, "model")})


def cmd_discover(args: argparse.Namespace) -> Output:
    ci, variables = _ci_input(args)
    constraints = _constraints(args.order)
    header = f"input: {_render_ci(ci)}"
    if args.action == "nolatent":
        dags = wermuth_lauritzen(ci, variables, constraints)
        faithful = filter_faithful(dags, ci)
        lines = [header, f"candidates ({len(dags)}):"] + [f"  {d}" for d in dags]
        lines += [f"faithful ({len(faithful)}):"] + [f"  {d}" for d in faithful]
        dots = {f"candidate-{k}.dot": to_dot(d, f"candidate {k}") for k, d in enumerate(dags, 1)}
        data = {"candidates": [str(d) for d in dags], "faithful": [str(d) for d in faithful]}
        return Output("\n".join(lines), data, dots)
    if args.action == "latent":
        found = enumerate_latent_structures(ci, variables, args.mode, args.max_latents, constraints)
        lines = [header, f"structures ({len(found)}):"] + [f"  {s}" for s in found]
        dots = {f"structure-{k}.dot": to_dot(s, f"structure {k}") for k, s in enumerate(found, 1)}
        return Output("\n".join(lines), {"structures": [str(s) for s in found]}, dots)
    try:
        pattern = icstar_pattern(ci, variables)
    except NoFaithfulStructure as err:
        return Output(f"{header}\nno faithful structure: {err}", {"pattern": None, "error": str(err)}, failed=True)
    expansions = expand_pattern(pattern)
    lines = [header, f"pattern: {pattern}", f"expansion ({len(expansions)}):"] + [f"  {s}" for s in expansions]
    dots = {"pattern.dot": to_dot(pattern, "pattern")}
    dots.update({f"structure-{k}.dot": to_dot(s, f"structure {k}") for k, s in enumerate(expansions, 1)})
    return Output("\n".join(lines), {"pattern": str(pattern), "structures": [str(s) for s in expansions]}, dots)


def cmd_faithfulness(args: argparse.Namespace) -> Output:
    m = load_model(args.path)
    observed = _split(args.observed)
    magnitude = Fraction(args.magnitude)
    if args.action == "classify":
        rep = classify_independences(m, observed, tol=args.tol, trials=args.trials, magnitude=magnitude, seed=args.seed)
        return Output(rep.table(), rep.to_json())
    if not args.statement:
        raise UsageError("perturb needs --statement")
    try:
        stmts = [parse_statement(s) for s in args.statement]
    except ValueError as err:
        raise UsageError(str(err)) from err
    runs = perturbation_runs(m, stmts, args.trials, magnitude, args.seed, observed, args.tol)
    lines = [f"{r.statement}: survival {r.rate:.3f} over {r.trials} trials (seed {r.seed}); surviving trials {list(r.survivors)}" for r in runs]
    data = [
        {"statement": str(r.statement), "survival": r.rate, "trials": r.trials, "seed": r.seed, "magnitude": r.magnitude, "survivors": list(r.survivors)}
        for r in runs
    ]
    return Output("\n".join(lines), data)


def _settings_prior(text: str | None) -> tuple[tuple[float, float], tuple[float, float]] | None:
    if text is None:
        return None
    try:
        w = [float(Fraction(x.strip())) for x in text.split(",")]
    except ValueError as err:
        raise UsageError(f"bad settings prior {text!r}") from err
    if len(w) != 4:
        raise UsageError("settings prior needs four weights P(S,T) for 00,01,10,11")
    return ((w[0], w[1]), (w[2], w[3]))


def cmd_bell(args: argparse.Namespace) -> Output:
    spec = preset_spec(args.kind, args.p)
    prior = _settings_prior(args.settings_prior)
    if prior is not None:
        spec = replace(spec, settings_prior=prior)
    if args.action == "tables":
        lines, data = [], {}
        for s in (0, 1):
            for t in (0, 1):
                tab = outcome_distribution(spec, s, t)
                lines.append(f"S={s} T={t}: " + "  ".join(f"P({a}{b})={tab[a, b]:.10f}" for a in (0, 1) for b in (0, 1)))
                data[f"{s}{t}"] = tab.tolist()
        return Output("\n".join(lines), data)
    d = bell_joint(spec, args.tol)
    if args.action == "joint":
        return Output(d.bracket(), d.to_json())
    if args.action == "ci":
        ci = all_ci(d, args.scope, args.tol)
        return Output(_render_ci(ci), {"kind": args.kind, "p": args.p, "tol": args.tol, "ci": ci.to_json()})
    value = chsh_value(spec)
    return Output(f"{value:.10f}", {"kind": args.kind, "p": args.p, "chsh": value})


def cmd_case(args: argparse.Namespace) -> Output:
    if args.action == "list":
        lines = [f"{name}" for name in casebook.CASES]
        return Output("\n".join(lines), list(casebook.CASES))
    if not args.name:
        raise UsageError("case run needs a case name (or 'all')")
    names = list(casebook.CASES) if args.name == "all" else [args.name]
    results = []
    for name in names:
        try:
            results.append(casebook.run_case(name, args.out))
        except casebook.UnknownCase as err:
            raise UsageError(str(err)) from err
    text = "\n".join(r.text() for r in results)
    if len(results) > 1:
        text += "\n" + "\n".join(f"{'pass' if r.passed else 'FAIL'}  {r.name}" for r in results)
    dots = {f"{r.name}/{k}": v for r in results for k, v in sorted(r.dots.items())}
    data = [r.to_json() for r in results] if len(results) > 1 else results[0].to_json()
    return Output(text, data, dots, failed=not all(r.passed for r in results))


# ---------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="float CI tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("text", "json", "dot"), default="text")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="bellcausal", description="Causal discovery on exact discrete and quantum distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", parents=[common], help="inspect a model file")
    p.add_argument("action", choices=("show", "joint", "ci", "dot"))
    p.add_argument("path")
    p.add_argument("--observed", help="comma-separated observed variables")
    p.add_argument("--scope", choices=("singleton_pairs", "full_sets"), default="full_sets")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("discover", parents=[common], help="run a discovery procedure")
    p.add_argument("action", choices=("nolatent", "latent", "pattern"))
    p.add_argument("--model", help="model file whose observed CI set is the input")
    p.add_argument("--observed", help="comma-separated observed variables of --model")
    p.add_argument("--ci", help="generating statements separated by ';', e.g. 'S ⊥ C | T'")
    p.add_argument("--vars", help="comma-separated variables, in order")
    p.add_argument("--order", action="append", metavar="A<B", help="order constraint; repeatable")
    p.add_argument("--mode", choices=("pairwise", "unrestricted"), default="pairwise")
    p.add_argument("--max-latents", type=int)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("faithfulness", parents=[common], help="structural versus fine-tuned independences")
    p.add_argument("action", choices=("classify", "perturb"))
    p.add_argument("path")
    p.add_argument("--observed")
    p.add_argument("--statement", action="append", help="CI statement for perturb; repeatable")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--magnitude", default="1/10")
    p.set_defaults(func=cmd_faithfulness)

    p = sub.add_parser("bell", parents=[common], help="quantum Bell experiments")
    p.add_argument("action", choices=("tables", "joint", "ci", "chsh"))
    p.add_argument("--kind", choices=("epr", "chsh"), default="chsh")
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--settings-prior", metavar="W00,W01,W10,W11", help="joint prior over (S, T); default uniform")
    p.add_argument("--scope", choices=("singleton_pairs", "full_sets"), default="full_sets")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("case", parents=[common], help="run the casebook")
    p.add_argument("action", choices=("run", "list"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_case)
    return parser


def _emit(out: Output, args: argparse.Namespace) -> str:
    if args.format == "json":
        return json.dumps(out.data, indent=2, ensure_ascii=False)
    if args.format == "dot":
        if not out.dots:
            raise UsageError("this command has no DOT output")
        return "\n".join(f"// {name}\n{dot}" for name, dot in sorted(out.dots.items())).rstrip("\n")
    return out.text.rstrip("\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 0) is None:
        args.trials = 200 if args.action == "perturb" else 0
    try:
        out = args.func(args)
        text = _emit(out, args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (DistributionError, GraphError, BellSpecError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(text)
    if args.out and args.command != "case":
        base = Path(args.out)
        base.mkdir(parents=True, exist_ok=True)
        ext = {"text": "txt", "json": "json", "dot": "dot"}[args.format]
        (base / f"{args.command}-{args.action}.{ext}").write_text(text + "\n", encoding="utf-8")
    return 1 if out.failed else 0


if __name__ == "__main__":
    sys.exit(main())
