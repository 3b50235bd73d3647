"""Command-line interface.

    conceptkit init [--seed FILE] --out KB.json
    conceptkit teach SCRIPT --kb KB.json [--out FILE] [--snapshots DIR]
    conceptkit teach --interactive --kb KB.json [--out FILE]
    conceptkit query --kb KB.json --goal G [--fact "k=v" ...]
    conceptkit export-dot --kb KB.json [--out FILE]
    conceptkit validate --kb KB.json
    conceptkit serve --kb KB.json [--bind HOST:PORT] [--frontend DIR]

Exit codes: 0 success, 1 domain error (including validation failures),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import engine, persist, server, teaching
from .errors import ConceptKitError
from .facts import FactSet
from .kb import KnowledgeBase, new_kb


def _load(path: str) -> KnowledgeBase:
    return persist.load_kb(path)


def _parse_fact(kb: KnowledgeBase, text: str) -> tuple[str, object]:
    name, sep, raw = text.partition("=")
    if not sep:
        raise ConceptKitError(f"facts look like name=value, got {text!r}")
    name = name.strip()
    raw = raw.strip()
    defn = kb.feature(name)
    if defn.kind == "numeric":
        try:
            return name, float(raw)
        except ValueError:
            raise ConceptKitError(f"{name!r} is numeric, got {raw!r}") from None
    return name, raw


def cmd_init(args: argparse.Namespace) -> int:
    seed = None
    if args.seed:
        seed = json.loads(Path(args.seed).read_text(encoding="utf-8"))
    kb = new_kb(seed)
    persist.save_kb(kb, args.out)
    print(f"wrote {args.out} (revision {kb.revision})")
    return 0


def cmd_teach(args: argparse.Namespace) -> int:
    kb = _load(args.kb) if args.kb else new_kb()
    out = args.out or args.kb
    if args.interactive:
        session = teaching.Session(kb)
        print("conceptkit teaching session; empty line or Ctrl-D to finish")
        while True:
            try:
                line = input("> ")
            except EOFError:
                print()
                break
            if not line.strip():
                break
            reply = teaching.run_session_step(session, line)
            print(f"[{reply.kind}] {reply.text}")
    else:
        if not args.script:
            print("a script file is required unless --interactive", file=sys.stderr)
            return 2
        result = teaching.replay_script(kb, Path(args.script))
        print(f"replayed {args.script}: revision {kb.revision}, "
              f"{len(result.snapshots)} snapshot(s)")
        if args.snapshots:
            snapdir = Path(args.snapshots)
            snapdir.mkdir(parents=True, exist_ok=True)
            for name, graph in result.snapshots:
                path = snapdir / f"{name}.json"
                path.write_text(json.dumps(graph, indent=2, sort_keys=True) + "\n",
                                encoding="utf-8")
                print(f"  snapshot {name} -> {path}")
    if out:
        persist.save_kb(kb, out)
        print(f"wrote {out}")
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    kb = _load(args.kb)
    facts = FactSet()
    for item in args.fact or []:
        name, value = _parse_fact(kb, item)
        facts.bind(name, value)
    answer = engine.query(kb, facts, args.goal, depth=args.depth)
    obj = teaching.engine_answer_to_obj(kb, answer)
    print(json.dumps(obj, indent=2, sort_keys=True))
    return 0


def cmd_export_dot(args: argparse.Namespace) -> int:
    kb = _load(args.kb)
    text = persist.export_dot(kb)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        kb = _load(args.kb)
    except ConceptKitError as exc:
        violations = getattr(exc, "violations", None)
        if violations is None:
            raise
        for violation in violations:
            print(violation)
        return 1
    violations = kb.validate()
    for violation in violations:
        print(violation)
    if violations:
        return 1
    print("ok")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    server.serve(args.kb, bind=args.bind, frontend_dir=args.frontend)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conceptkit",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a knowledge base, optionally from a seed")
    p.add_argument("--seed", help="JSON seed fragment")
    p.add_argument("--out", required=True, help="where to write the base")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("teach", help="replay a script or run an interactive session")
    p.add_argument("script", nargs="?", help="teaching script (.col)")
    p.add_argument("--kb", help="existing knowledge base to grow")
    p.add_argument("--out", help="where to save the result (defaults to --kb)")
    p.add_argument("--snapshots", help="directory for @snapshot graph dumps")
    p.add_argument("--interactive", action="store_true")
    p.set_defaults(func=cmd_teach)

    p = sub.add_parser("query", help="ask for a feature value given facts")
    p.add_argument("--kb", required=True)
    p.add_argument("--goal", required=True)
    p.add_argument("--fact", action="append", metavar="NAME=VALUE")
    p.add_argument("--depth", type=int, default=engine.DEFAULT_DEPTH)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("export-dot", help="write the concept graph in DOT format")
    p.add_argument("--kb", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser("validate", help="list invariant violations")
    p.add_argument("--kb", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP console service")
    p.add_argument("--kb", required=True)
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.add_argument("--frontend", help="directory with built console assets")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConceptKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
