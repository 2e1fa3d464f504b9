"""Command line front end.

``roofskel build`` runs an input polygon document to completion and
writes whichever artifacts were requested; ``roofskel serve`` hosts the
session API on the loopback interface.

Exit codes from ``build``: 0 on a clean run, 1 when the engine faults
(a state dump lands next to the input), 2 for unusable invocations or
malformed documents.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .document import DocumentError, parse_document
from .oracle import verify_skeleton
from .outputs import write_report
from .session import run_batch

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roofskel",
        description="weighted straight skeletons by shrinking the polygon",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="run an input document to completion")
    build.add_argument("input", type=Path, help="polygon document (JSON)")
    build.add_argument("--step", type=float, default=0.1, metavar="DZ",
                       help="height granularity of recorded offset snapshots")
    build.add_argument("--max-z", type=float, default=None, metavar="Z",
                       help="stop at this height (required for inputs that may run forever)")
    build.add_argument("--skeleton", type=Path, metavar="OUT.json",
                       help="write the skeleton graph as JSON")
    build.add_argument("--svg", type=Path, metavar="OUT.svg",
                       help="write an offset-plot SVG")
    build.add_argument("--obj", type=Path, metavar="OUT.obj",
                       help="write the lifted roof as Wavefront OBJ")
    build.add_argument("--report", type=Path, metavar="STEM",
                       help="write STEM.png (figure) and STEM.csv (node table)")
    build.add_argument("--oracle-check", action="store_true",
                       help="replay the run against the independent checker")

    serve = sub.add_parser("serve", help="host the session API on 127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _cmd_build(args: argparse.Namespace) -> int:
    try:
        doc = parse_document(args.input.read_bytes())
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return 2
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.max_z is None and doc.may_run_forever():
        print(
            "error: input has stationary or outward edges and may never "
            "terminate; pass --max-z",
            file=sys.stderr,
        )
        return 2

    try:
        session = run_batch(doc, args.step, args.max_z)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if session.status == "faulted":
        dump_path = args.input.with_suffix(".fault.json")
        dump_path.write_text(json.dumps(session.fault, indent=2, default=repr))
        print(f"fault: {session.fault['message']} (state dump: {dump_path})",
              file=sys.stderr)
        return 1

    graph = session.world_graph()
    if args.skeleton:
        args.skeleton.write_bytes(session.export("json"))
    if args.svg:
        args.svg.write_bytes(session.export("svg"))
    if args.obj:
        args.obj.write_bytes(session.export("obj"))
    if args.report:
        png, csv_path = write_report(
            str(args.report),
            session.world_input_loops(),
            session.world_snapshots(),
            graph,
            session.status,
        )
        print(f"report: {png}, {csv_path}")

    z = session.frame.z_to_world(session.w.z)
    print(
        f"{session.status}: z={z:.6g}, "
        f"{len(graph.nodes)} nodes, {len(graph.arcs)} arcs, {len(graph.faces)} faces"
    )

    if args.oracle_check:
        report = verify_skeleton(doc.loops, doc.alphas(), graph)
        for note in report.notes:
            print(f"oracle: {note}")
        if not report.ok:
            print("oracle: MISMATCH", file=sys.stderr)
            return 1
        print("oracle: ok")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host="127.0.0.1", port=args.port, log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "build":
        return _cmd_build(args)
    return _cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
