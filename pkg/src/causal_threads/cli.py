"""Command line front end: validate, run, trace, explain, export, serve.

Exit codes: 0 success, 1 validation errors in the model, 2 I/O or parse
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import format as model_format
from .engine import DEFAULT_QUIESCENCE_WINDOW, detect_equilibrium, run, serialize_trace
from .export import export_graph, export_timeline, highlight_for_episode, serialize_timeline
from .model import SystemModel, validate_model
from .narrative import render_overview, render_steps
from .threads import classify_links, trace_thread

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2

DEFAULT_MAX_STEPS = 60


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path: str) -> SystemModel:
    try:
        model, _doc = model_format.parse_file(path)
    except OSError as exc:
        raise CliFailure(EXIT_IO, f"cannot read {path}: {exc}") from exc
    except model_format.ParseError as exc:
        issues = "\n".join(f"  {path}:{i}" for i in exc.issues)
        raise CliFailure(EXIT_IO, f"parse failed:\n{issues}") from exc
    return model


def _load_valid(path: str) -> SystemModel:
    model = _load(path)
    report = validate_model(model)
    if not report.ok():
        lines = [f"error {d.element_id}: {d.message}" for d in report.errors]
        raise CliFailure(EXIT_INVALID, "\n".join(lines))
    return model


def _episode(model: SystemModel, episode_id: str):
    episode = model.episode_map().get(episode_id)
    if episode is None:
        raise CliFailure(EXIT_INVALID, f"model has no episode {episode_id!r}")
    return episode


def _episode_thread(model: SystemModel, episode_id: str, max_steps: int):
    episode = _episode(model, episode_id)
    trace = run(model, model.disruptions, max_steps)
    intervals = detect_equilibrium(trace, DEFAULT_QUIESCENCE_WINDOW)
    thread = classify_links(trace_thread(trace, model, episode.causal_disruption),
                            intervals)
    return episode, trace, thread


def cmd_validate(args: argparse.Namespace) -> int:
    model = _load(args.file)
    report = validate_model(model)
    for d in report.diagnostics:
        print(f"{d.severity} {d.element_id}: {d.message}")
    if report.ok():
        print(f"{args.file}: ok "
              f"({len(report.warnings)} warning{'s' if len(report.warnings) != 1 else ''})")
        return EXIT_OK
    return EXIT_INVALID


def cmd_run(args: argparse.Namespace) -> int:
    model = _load_valid(args.file)
    trace = run(model, model.disruptions, args.max_steps)
    text = serialize_trace(trace)
    if args.trace_out:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.trace_out} ({trace.steps} steps, {len(trace.events)} events)")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    model = _load_valid(args.file)
    _episode_spec, _trace, thread = _episode_thread(model, args.episode, args.max_steps)
    print(" -> ".join(thread.ordered_dimension_path))
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    model = _load_valid(args.file)
    episode, _trace, thread = _episode_thread(model, args.episode, args.max_steps)
    print(render_overview(model, episode))
    print()
    for step in render_steps(model, thread, args.level):
        print(f"{step.ordinal + 1}. {step.text}")
    return EXIT_OK


def cmd_export_graph(args: argparse.Namespace) -> int:
    model = _load_valid(args.file)
    highlight = None
    if args.episode:
        episode, _trace, thread = _episode_thread(model, args.episode, args.max_steps)
        highlight = highlight_for_episode(model, episode, thread)
    print(export_graph(model, highlight), end="")
    return EXIT_OK


def cmd_export_timeline(args: argparse.Namespace) -> int:
    model = _load_valid(args.file)
    trace = run(model, model.disruptions, args.max_steps)
    records = export_timeline(trace, model.episodes, model)
    print(serialize_timeline(records), end="")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import ServerConfig, create_app

    path = args.file or os.environ.get("CT_MODEL")
    if not path:
        raise CliFailure(EXIT_IO, "no model file given and CT_MODEL is unset")
    config = ServerConfig(model_path=path, bind_address=args.host, port=args.port,
                          session_log=args.session_log, max_steps=args.max_steps)
    try:
        app = create_app(config)
    except OSError as exc:
        raise CliFailure(EXIT_IO, str(exc)) from exc
    except model_format.ParseError as exc:
        raise CliFailure(EXIT_IO, str(exc)) from exc
    except ValueError as exc:
        raise CliFailure(EXIT_INVALID, str(exc)) from exc
    uvicorn.run(app, host=config.bind_address, port=config.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causal-threads")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, file_required: bool = True):
        p = sub.add_parser(name)
        if file_required:
            p.add_argument("file")
        p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
        p.set_defaults(handler=handler)
        return p

    add("validate", cmd_validate)

    p = add("run", cmd_run)
    p.add_argument("--trace-out", default=None)

    p = add("trace", cmd_trace)
    p.add_argument("--episode", required=True)

    p = add("explain", cmd_explain)
    p.add_argument("--episode", required=True)
    p.add_argument("--level", type=int, default=0)

    p = add("export-graph", cmd_export_graph)
    p.add_argument("--episode", default=None)

    add("export-timeline", cmd_export_timeline)

    p = sub.add_parser("serve")
    p.add_argument("file", nargs="?")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--session-log", default=None)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except CliFailure as exc:
        print(str(exc), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
