"""The ``tr`` command line: check, run, compile-net, serve, report.

Exit codes: 0 success (check: universal; compile-net --verify: verified),
1 file/schema problems, 2 runtime errors during a run, 3 a check that
completed but failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis, netcomp
from .lang import ParseError, ast, parse, validate


def _setup_logging() -> None:
    level = os.environ.get("TR_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(name)s: %(message)s")


def _load_library(path: str):
    try:
        source = Path(path).read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None
    try:
        library = parse(source)
    except ParseError as exc:
        for diag in exc.diagnostics:
            print(f"{path}:{diag}", file=sys.stderr)
        return None
    diags = validate(library)
    if diags:
        for diag in diags:
            print(f"{path}:{diag}", file=sys.stderr)
        return None
    return library


def _select_program(library, name):
    if name is not None:
        decl = library.programs.get(name)
        if decl is None:
            print(f"error: no program {name!r}", file=sys.stderr)
        return decl
    if len(library.programs) == 1:
        return next(iter(library.programs.values()))
    print(
        f"error: choose one of {sorted(library.programs)} with --program",
        file=sys.stderr,
    )
    return None


def cmd_check(args) -> int:
    library = _load_library(args.program_file)
    if library is None:
        return 1
    try:
        models = analysis.load_models(args.models)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot load models: {exc}", file=sys.stderr)
        return 1

    names = [args.program] if args.program else list(library.programs) + list(library.trees)
    reports = {}
    failed = False
    for name in names:
        decl = library.lookup_callable(name)
        if decl is None:
            print(f"error: no program or tree {name!r}", file=sys.stderr)
            return 1
        try:
            if isinstance(decl, ast.Program):
                rules = analysis.prop_rules_from_program(decl, models.overrides_for(name))
                report = analysis.check_universal(rules, models.actions, models.features)
            else:
                nodes = analysis.prop_nodes_from_tree(decl)
                report = analysis.check_tree(nodes, models.actions, models.features)
        except analysis.AnalysisError as exc:
            print(f"error: {name}: {exc}", file=sys.stderr)
            return 1
        reports[name] = report
        print(f"{name}: {'UNIVERSAL' if report.universal else 'NOT UNIVERSAL'}")
        for verdict in report.verdicts:
            mark = "ok" if (verdict.index == 1 or verdict.regresses_from is not None) else "FAIL"
            print(f"  rule {verdict.index}: {mark} ({verdict.detail})")
        if report.complete:
            print("  coverage: ok (some rule always fires)")
        else:
            print(f"  coverage: FAIL, counterexample {report.counterexample}")
        failed = failed or not report.universal
    if args.json:
        doc = {name: report.to_json() for name, report in reports.items()}
        Path(args.json).write_text(json.dumps(doc, indent=2) + "\n")
    return 3 if failed else 0


def cmd_run(args) -> int:
    from .service.headless import run_headless

    status = run_headless(args.scenario, args.trace, seed=args.seed, ticks=args.ticks)
    if status == 0 and args.plot:
        from .service.report import render_report

        paths = render_report(args.trace, Path(args.trace).parent, scenario_path=args.scenario)
        for p in paths:
            print(f"wrote {p}")
    return status


def cmd_compile_net(args) -> int:
    library = _load_library(args.program_file)
    if library is None:
        return 1
    program = _select_program(library, args.program)
    if program is None:
        return 1
    try:
        rules = analysis.prop_rules_from_program(program)
    except analysis.NonPropositionalError as exc:
        print(f"error: NonConjunctive: {exc}", file=sys.stderr)
        return 1
    features = args.features.split(",") if args.features else None
    if features is None:
        # Feature order = declaration order of the 0-ary symbols used.
        used = set()
        for r in rules:
            used |= r.condition.features()
        features = [n for n, arity in library.env_symbols.items() if arity == 0 and n in used]
        missing = used - set(features)
        if missing:
            print(f"error: condition features not declared 0-ary: {sorted(missing)}",
                  file=sys.stderr)
            return 1
    net = netcomp.compile_rules(rules, features)
    netcomp.save_net(net, args.out)
    print(f"wrote {args.out}: n={net.n} m={net.m} k={net.k}")
    if args.verify:
        ok, counterexample = netcomp.verify_equivalence(net, rules, features)
        if ok:
            print(f"verify: PASS ({2 ** net.n} inputs)")
        else:
            print(f"verify: FAIL at input {counterexample}")
            return 3
    return 0


def cmd_serve(args) -> int:
    from .service.server import ControlServer

    scenario_doc = None
    base_dir = None
    if args.scenario:
        try:
            scenario_doc = json.loads(Path(args.scenario).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        base_dir = Path(args.scenario).parent
    server = ControlServer(args.host, args.port, scenario_doc=scenario_doc, base_dir=base_dir)
    server.start()
    print(f"serving on ws://{args.host}:{server.port} (ctrl-c to stop)")
    try:
        server.serve_forever()
    finally:
        server.stop()
    return 0


def cmd_report(args) -> int:
    from .service.report import render_report

    try:
        paths = render_report(args.trace, args.out, scenario_path=args.scenario)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify regression/coverage properties")
    p.add_argument("program_file")
    p.add_argument("--models", required=True, help="action-model JSON file")
    p.add_argument("--program", help="check only this program or tree")
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("run", help="run a scenario headlessly")
    p.add_argument("scenario")
    p.add_argument("--trace", required=True, help="output JSONL path")
    p.add_argument("--seed", type=int)
    p.add_argument("--ticks", type=int)
    p.add_argument("--plot", action="store_true", help="render figures next to the trace")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("compile-net", help="compile a propositional program to a threshold net")
    p.add_argument("program_file")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--program")
    p.add_argument("--features", help="comma-separated feature order")
    p.add_argument("--verify", action="store_true", help="exhaustively check equivalence")
    p.set_defaults(fn=cmd_compile_net)

    p = sub.add_parser("serve", help="streaming control service")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--scenario", help="scenario to preload")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("report", help="render figures from a trace")
    p.add_argument("trace")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--scenario", help="scenario file, for world geometry")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
