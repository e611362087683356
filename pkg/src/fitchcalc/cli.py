"""Command-line entry point.

Exit codes: 0 success / all pass, 1 check or goal failure, 2 usage or
parse error. Identical invocations produce identical output; the
environment variable FITCHCALC_SEED overrides suite seeds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .syntax import IK, IK_DIA, IR, IS4, Mode, mode_name, mode_named
from .surface import (
    ParseError, SourceFile, parse_file, print_ctx, print_term, print_type,
)
from .typecheck import (
    BoundExceeded, TypecheckError, check, enumerate_derivations,
    format_derivation, infer,
)
from .rewrite import Equal, Distinct, Fuel, FuelExhausted, IllTyped, def_eq, normalize_trace, trace_terms
from .semantics import ModeUnsupported, UnknownBaseType, denote, model_from_decl
from .metatheory import suites


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(path: str) -> SourceFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", 2)
    try:
        return parse_file(text)
    except ParseError as exc:
        raise CliError(f"{path}: {exc}", 2)


def _mode_for(args, src: SourceFile) -> Mode:
    if args.mode:
        try:
            return mode_named(args.mode)
        except ValueError as exc:
            raise CliError(str(exc), 2)
    if src.mode is not None:
        return src.mode
    raise CliError("no --mode flag and the file declares none", 2)


def _pick(table: dict, name: str | None, what: str, path: str):
    if name is None:
        if len(table) == 1:
            return next(iter(table.values()))
        raise CliError(f"{path} has {len(table)} {what}s; use --name", 2)
    if name not in table:
        raise CliError(f"no {what} named {name!r} in {path}", 2)
    return table[name]


def cmd_check(args, out) -> int:
    src = _load(args.file)
    mode = _mode_for(args, src)
    failures = 0
    results = []
    for d in src.defs.values():
        try:
            got, _ = infer(mode, d.ctx, d.term)
            if d.expected_ty is not None and got != d.expected_ty:
                status = (f"FAIL expected {print_type(d.expected_ty)}, "
                          f"inferred {print_type(got)}")
                failures += 1
            else:
                status = f"ok : {print_type(got)}"
        except TypecheckError as exc:
            status = f"FAIL {exc}"
            failures += 1
        results.append({"def": d.name, "status": status})
    if args.json:
        print(json.dumps({"mode": mode_name(mode), "results": results},
                         indent=2, sort_keys=True), file=out)
    else:
        for r in results:
            print(f"{r['def']}: {r['status']}", file=out)
    return 1 if failures else 0


def cmd_normalize(args, out) -> int:
    src = _load(args.file)
    mode = _mode_for(args, src)
    d = _pick(src.defs, args.name, "def", args.file)
    try:
        check_ty, _ = infer(mode, d.ctx, d.term)
    except TypecheckError as exc:
        print(f"ill-typed: {exc}", file=out)
        return 1
    fuel = Fuel(args.fuel) if args.fuel is not None else None
    try:
        steps = trace_terms(d.term, fuel)
    except FuelExhausted as exc:
        print(f"fuel exhausted: {exc}", file=out)
        return 1
    if args.json:
        print(json.dumps({
            "def": d.name,
            "type": print_type(check_ty),
            "steps": [{"tag": tag.value, "term": print_term(t)} for t, tag in steps],
            "normal_form": print_term(steps[-1][0] if steps else d.term),
        }, indent=2, sort_keys=True), file=out)
    else:
        print(f"{print_term(d.term)} : {print_type(check_ty)}", file=out)
        for t, tag in steps:
            print(f"  --[{tag.value}]--> {print_term(t)}", file=out)
        print(f"normal form: {print_term(steps[-1][0] if steps else d.term)}",
              file=out)
    return 0


def cmd_derivations(args, out) -> int:
    src = _load(args.file)
    mode = _mode_for(args, src)
    d = _pick(src.defs, args.name, "def", args.file)
    try:
        ty, _ = infer(mode, d.ctx, d.term)
        derivs = enumerate_derivations(mode, d.ctx, d.term, ty, args.bound)
    except TypecheckError as exc:
        print(f"ill-typed: {exc}", file=out)
        return 1
    except BoundExceeded as exc:
        print(f"bound exceeded: {exc}", file=out)
        return 1
    if args.json:
        print(json.dumps({
            "def": d.name,
            "count": len(derivs),
            "split_vectors": [repr(x.split_vector()) for x in derivs],
        }, indent=2, sort_keys=True), file=out)
    else:
        print(f"{len(derivs)} derivation(s)", file=out)
        for i, deriv in enumerate(derivs):
            print(f"-- derivation {i}", file=out)
            print(format_derivation(deriv), file=out)
    return 0


def cmd_denote(args, out) -> int:
    src = _load(args.file)
    mode = _mode_for(args, src)
    d = _pick(src.defs, args.name, "def", args.file)
    decl = _pick(src.models, args.model, "model", args.file)
    try:
        model = model_from_decl(decl)
        deriv = (check(mode, d.ctx, d.term, d.expected_ty)
                 if d.expected_ty is not None
                 else infer(mode, d.ctx, d.term)[1])
        mor = denote(model, deriv)
    except (TypecheckError, ModeUnsupported, UnknownBaseType) as exc:
        print(f"error: {exc}", file=out)
        return 1
    tables = [{"stage": k,
               "map": [[repr(x), repr(y)]
                       for x, y in zip(mor.dom.stages[k], mor.maps[k])]}
              for k in range(mor.dom.n_stages)]
    if args.json:
        print(json.dumps({"def": d.name, "model": decl.name, "tables": tables},
                         indent=2, sort_keys=True), file=out)
    else:
        print(f"{d.name} in model {decl.name}: "
              f"{print_ctx(d.ctx)} |- {print_term(d.term)} : {print_type(deriv.ty)}",
              file=out)
        for table in tables:
            print(f"stage {table['stage']}:", file=out)
            for x, y in table["map"]:
                print(f"  {x} -> {y}", file=out)
    return 0


def cmd_eq(args, out) -> int:
    src = _load(args.file)
    mode = _mode_for(args, src)
    g = _pick(src.goals, args.goal, "goal", args.file)
    try:
        verdict = def_eq(mode, g.ctx, g.lhs, g.rhs, g.ty, search_bound=args.bound)
    except IllTyped as exc:
        print(f"ill-typed goal: {exc}", file=out)
        return 1
    if args.json:
        payload = {"goal": g.name, "verdict": type(verdict).__name__}
        if isinstance(verdict, Equal):
            payload["trace"] = list(verdict.trace)
        print(json.dumps(payload, indent=2, sort_keys=True), file=out)
    else:
        print(f"{g.name}: {type(verdict).__name__}", file=out)
        if isinstance(verdict, Equal):
            for line in verdict.trace:
                print(f"  {line}", file=out)
        elif isinstance(verdict, Distinct):
            print(f"  lhs normal form: {print_term(verdict.lhs_normal)}", file=out)
            print(f"  rhs normal form: {print_term(verdict.rhs_normal)}", file=out)
    return 0 if isinstance(verdict, Equal) else 1


def _default_models():
    from .semantics import make_model
    return {
        "identity": make_model("identity", 0, {"A": 2, "B": 2}),
        "chain1": make_model("chain", 1, {"A": ([1, 2], [[0]]), "B": ([2, 1], [[0, 0]])}),
        "chain2": make_model("chain", 2, {"A": ([1, 2, 2], [[0], [1, 0]]),
                                          "B": ([2, 1, 2], [[0, 0], [1]])}),
        "cc1": make_model("constant_comonad", 1, {"A": ([2, 2], [[1, 0]]),
                                                  "B": ([2, 1], [[0, 0]])}),
    }


def cmd_suite(args, out) -> int:
    seed = args.seed
    env = os.environ.get("FITCHCALC_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise CliError(f"FITCHCALC_SEED must be an integer, got {env!r}", 2)
    mode = mode_named(args.mode) if args.mode else IK
    models = _default_models()
    name = args.name
    if name == "subject-reduction":
        results = [suites.run_subject_reduction(mode, args.samples, seed)]
    elif name == "confluence":
        results = [suites.run_confluence(mode, args.samples, seed)]
    elif name == "canonicity":
        results = [suites.run_canonicity(mode, args.samples, seed)]
    elif name == "subformula":
        results = [suites.run_subformula(args.samples, seed)]
    elif name == "coherence":
        model = models["cc1"] if mode.calculus == "IS4" else (
            models["chain1"] if mode.calculus == "IR" else models["identity"])
        results = [suites.run_coherence(mode, model, args.samples, seed)]
    elif name == "soundness":
        model = models["cc1"] if mode.calculus == "IS4" else (
            models["chain1"] if mode.calculus == "IR" else models["identity"])
        results = [suites.run_soundness(mode, model, args.samples, seed)]
    elif name == "appendix-goals":
        root = Path(args.corpus)
        files = sorted(str(p) for p in root.rglob("*.fmlc"))
        if not files:
            raise CliError(f"no .fmlc goal files under {root}", 2)
        results = [suites.run_appendix_goals(files)]
    else:
        raise CliError(f"unknown suite {name!r}", 2)

    if args.json:
        print(json.dumps([r.to_dict() for r in results], indent=2, sort_keys=True),
              file=out)
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"[{status}] {r.suite} ({r.mode}): {r.checked}/{r.samples} checked, "
                  f"{len(r.failures)} failure(s)", file=out)
            for f in r.failures[:20]:
                print(f"  {f}", file=out)
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fitchcalc",
        description="Fitch-style modal lambda calculi: check, rewrite, denote, test")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_mode=True):
        if with_mode:
            sp.add_argument("--mode", help="ik | ik_dia | is4 | is4_dia | ir | ir_box")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("check", help="type-check every def in a file")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("normalize", help="print a reduction trace")
    sp.add_argument("file")
    sp.add_argument("--name", help="def to normalize")
    sp.add_argument("--fuel", type=int, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("derivations", help="enumerate split choices")
    sp.add_argument("file")
    sp.add_argument("--name")
    sp.add_argument("--bound", type=int, default=64)
    common(sp)
    sp.set_defaults(fn=cmd_derivations)

    sp = sub.add_parser("denote", help="interpret a def in a finite model")
    sp.add_argument("file")
    sp.add_argument("--name")
    sp.add_argument("--model", help="model declaration to use")
    common(sp)
    sp.set_defaults(fn=cmd_denote)

    sp = sub.add_parser("eq", help="decide a definitional-equality goal")
    sp.add_argument("file")
    sp.add_argument("--goal")
    sp.add_argument("--bound", type=int, default=32)
    common(sp)
    sp.set_defaults(fn=cmd_eq)

    sp = sub.add_parser("suite", help="run a property suite")
    sp.add_argument("name", choices=suites.SUITE_NAMES)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--corpus", default="corpus/goals")
    common(sp)
    sp.set_defaults(fn=cmd_suite)

    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
