"""Command-line driver: build maps from fixtures or a remote model, lay them
out, evaluate scripts into CSV + figures, and serve the HTTP API.

Exit codes: 0 success, 1 runtime failure (bad files, backend errors),
2 usage errors. Logs go to standard error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .backends import FixtureBackend, OpenAICompletionBackend
from .builder import BuildError, BuildReport, build_map
from .gml import export_gml, import_gml
from .graph import MapGraph
from .layout import LayoutParams, run_layout
from .script import EvaluationSession, export_trajectory_csv, load_script, trajectory_stats
from .similarity import HashedBagEmbedder, RemoteEmbedder
from .validators import AcceptAllValidator, AllowlistValidator, PageExistenceValidator

log = logging.getLogger("nnm")


def _make_backend(spec: str, parser: argparse.ArgumentParser):
    if spec == "remote":
        return OpenAICompletionBackend()
    if spec.startswith("fixture:"):
        return FixtureBackend.from_file(spec[len("fixture:"):])
    parser.error(f"--backend must be 'remote' or 'fixture:PATH', got {spec!r}")


def _make_validator(spec: str, parser: argparse.ArgumentParser):
    if spec == "accept-all":
        return AcceptAllValidator()
    if spec.startswith("allowlist:"):
        path = spec[len("allowlist:"):]
        names = [line.strip() for line in
                 Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]
        return AllowlistValidator(names)
    if spec == "wikipedia":
        return PageExistenceValidator()
    if spec.startswith("wikipedia:"):
        return PageExistenceValidator(spec[len("wikipedia:"):])
    parser.error(
        f"--validator must be 'accept-all', 'allowlist:PATH' or 'wikipedia[:URL]', got {spec!r}"
    )


def _make_embedder(spec: str):
    return RemoteEmbedder() if spec == "remote" else HashedBagEmbedder()


def _load_map(path: Path) -> MapGraph:
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix == ".gml":
            return import_gml(text)
        return MapGraph.from_json(text)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def _save_map(path: Path, graph: MapGraph) -> None:
    if path.suffix == ".gml":
        path.write_text(export_gml(graph), encoding="utf-8")
    else:
        path.write_text(graph.to_json(), encoding="utf-8")


def _out_paths(out: str) -> tuple[Path, Path]:
    base = Path(out)
    if base.suffix in (".json", ".gml"):
        base = base.with_suffix("")
    return base.with_suffix(".gml"), base.with_suffix(".json")


def cmd_build(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    backend = _make_backend(args.backend, parser)
    validator = _make_validator(args.validator, parser)
    seeds = [s.strip() for s in args.seeds.split(",") if s.strip()]
    if not seeds:
        parser.error("--seeds must name at least one seed")
    report = BuildReport()
    try:
        # empty timestamps keep repeated builds byte-identical
        graph = build_map(args.template, seeds, args.max_queries, backend, validator,
                          clock=lambda: "", report=report)
    except BuildError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    run_layout(graph, LayoutParams(seed=args.seed, iterations=args.iterations))
    gml_path, json_path = _out_paths(args.out)
    gml_path.write_text(export_gml(graph), encoding="utf-8")
    json_path.write_text(graph.to_json(), encoding="utf-8")
    if args.out_png:
        from .report import save_map_figure

        save_map_figure(graph, args.out_png)
    log.info(
        "build: %d queries, %d parsed, %d rejected, %d validator errors",
        report.queries, report.parsed_items, report.rejected_items, report.validator_errors,
    )
    print(f"built map: {len(graph.nodes)} nodes, {len(graph.edges)} edges")
    print(f"wrote {gml_path} and {json_path}")
    return 0


def cmd_eval(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    graph = _load_map(Path(args.map))
    script_path = Path(args.script)
    try:
        steps = load_script(script_path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ValueError(f"{script_path}: {exc}") from exc
    session = EvaluationSession(graph, steps, _make_embedder(args.embedder),
                                agent_speed=args.speed)
    while session.advance() is not None:
        pass
    csv_path = Path(args.out_csv)
    csv_path.write_text(export_trajectory_csv(session.records), encoding="utf-8")
    chart_path = Path(args.out_chart) if args.out_chart else csv_path.with_suffix(".png")
    map_png = Path(args.out_map_png) if args.out_map_png else None
    from .report import save_map_figure, save_trajectory_chart

    save_trajectory_chart(session.records, chart_path)
    if map_png:
        save_map_figure(graph, map_png, session.records)
    try:
        stats = trajectory_stats(session.records)
        for label, value in (("records", stats.pearson), ("filled", stats.pearson_filled)):
            shown = "undefined (constant series)" if value is None else f"{value:.4f}"
            print(f"pearson ({label}): {shown}")
    except ValueError as exc:
        print(f"pearson: unavailable ({exc})")
    print(f"wrote {csv_path} ({len(session.records)} rows) and {chart_path}")
    return 0


def cmd_layout(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    path = Path(args.map)
    graph = _load_map(path)
    result = run_layout(graph, LayoutParams(seed=args.seed, iterations=args.iterations))
    out = Path(args.out) if args.out else path
    _save_map(out, graph)
    print(f"laid out {len(graph.nodes)} nodes in {len(result.displacement_history)} iterations")
    print(f"wrote {out}")
    return 0


def cmd_serve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.rpartition(":")
    if not host or not port.isdigit():
        parser.error(f"--addr must look like HOST:PORT, got {args.addr!r}")
    backend = _make_backend(args.backend, parser) if args.backend else None
    app = create_app(
        args.data_dir,
        backend=backend,
        embedder=_make_embedder(args.embedder),
        ui_dir=args.ui_dir,
    )
    uvicorn.run(app, host=host, port=int(port), log_level="info")
    return 0


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nnm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="grow a map by iterative prompting")
    p_build.add_argument("--template", required=True,
                         help="prompt template with one {} placeholder")
    p_build.add_argument("--seeds", required=True, help="comma-separated initial seeds")
    p_build.add_argument("--max-queries", required=True, type=_positive_int)
    p_build.add_argument("--backend", required=True, help="'remote' or 'fixture:PATH'")
    p_build.add_argument("--validator", default="accept-all",
                         help="'accept-all', 'allowlist:PATH' or 'wikipedia[:URL]'")
    p_build.add_argument("--out", required=True,
                         help="output stem; writes STEM.gml and STEM.json")
    p_build.add_argument("--seed", type=int, default=42, help="layout seed")
    p_build.add_argument("--iterations", type=_positive_int, default=500)
    p_build.add_argument("--out-png", help="also render the laid-out map to this file")

    p_eval = sub.add_parser("eval", help="play a script over a map and report")
    p_eval.add_argument("--map", required=True, help="map document (.json) or .gml")
    p_eval.add_argument("--script", required=True, help="script JSON file")
    p_eval.add_argument("--out-csv", required=True)
    p_eval.add_argument("--out-chart",
                        help="chart image path (default: out-csv with .png)")
    p_eval.add_argument("--out-map-png", help="also render the map with trajectories")
    p_eval.add_argument("--embedder", choices=("fallback", "remote"), default="fallback")
    p_eval.add_argument("--speed", type=float, default=100.0, help="agent speed, units/s")

    p_layout = sub.add_parser("layout", help="re-run the force layout on a map file")
    p_layout.add_argument("--map", required=True)
    p_layout.add_argument("--seed", type=int, default=42)
    p_layout.add_argument("--iterations", type=_positive_int, default=500)
    p_layout.add_argument("--out", help="output path (default: in place)")

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    p_serve.add_argument("--addr", default="127.0.0.1:8765")
    p_serve.add_argument("--data-dir", required=True)
    p_serve.add_argument("--backend", help="'remote' or 'fixture:PATH'")
    p_serve.add_argument("--embedder", choices=("fallback", "remote"), default="fallback")
    p_serve.add_argument("--ui-dir", help="static frontend directory to mount at /ui")

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "build": cmd_build,
        "eval": cmd_eval,
        "layout": cmd_layout,
        "serve": cmd_serve,
    }
    try:
        return handlers[args.command](args, parser)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
