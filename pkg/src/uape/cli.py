"""Batch front end: ``uape generate | simulate | evaluate``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal assertion.
Every command writes a ``manifest.json`` next to its outputs; ``simulate
--manifest`` replays a previous run from one.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import EdgeGate, Model, SimulationConfig, parse_config
from .engine import run_monte_carlo, run_uape, write_trace
from .evaluation import (EvaluationReport, GroundTruth, UndefinedAUCError, activation_curve,
                         apply_trace, load_scores, load_truth, roc_auc, write_curve,
                         write_scores, write_truth)
from .graph import (FormatError, generate_synthetic, load_attitude_table, load_edge_list,
                    load_seed_file, seed_sets, write_attitude_table, write_edge_list,
                    write_seed_file, _fields)

EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _read(path):
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _out_dir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create output directory {out}: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise DataError(f"output directory {out} is not writable")
    return out


def _write(path: Path, writer) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            writer(fh)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def _write_manifest(out: Path, manifest: dict, outputs) -> None:
    manifest = dict(manifest)
    manifest["outputs"] = {name: sha256_file(out / name) for name in outputs}
    manifest["tool"] = {"name": "uape", "version": __version__}
    _write(out / "manifest.json", lambda fh: fh.write(json.dumps(manifest, indent=2,
                                                                  sort_keys=True) + "\n"))


def _infer_topics(*paths) -> int:
    top = 0
    for path in paths:
        if path is None:
            continue
        with _read(path) as fh:
            for _, _, fields in _fields(fh):
                if len(fields) >= 2 and fields[1] not in ("", "*"):
                    try:
                        top = max(top, int(fields[1]) + 1)
                    except ValueError:
                        pass
    return max(top, 1)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    try:
        graph, attitudes, seeds = generate_synthetic(args.nodes, args.edges, args.topics,
                                                     args.seeds, args.rng_seed,
                                                     weight=args.edge_weight or 1.0)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    out = _out_dir(args.out_dir)
    weights = args.edge_weight is not None
    _write(out / "edges.csv", lambda fh: write_edge_list(graph, fh, weights=weights))
    _write(out / "attitudes.csv", lambda fh: write_attitude_table(graph, attitudes, fh))
    _write(out / "seeds.csv", lambda fh: write_seed_file(graph, seeds, fh))
    manifest = {
        "command": "generate",
        "options": {"nodes": args.nodes, "edges": args.edges, "topics": args.topics,
                    "seeds": args.seeds, "edge_weight": args.edge_weight},
        "rng_seed": args.rng_seed,
    }
    _write_manifest(out, manifest, ["edges.csv", "attitudes.csv", "seeds.csv"])
    print(f"wrote {graph.node_count} nodes, {graph.edge_count} edges, {args.topics} topic(s), "
          f"{args.seeds} seed(s) per topic to {out}")
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _resolve_simulation(args) -> tuple[dict, SimulationConfig]:
    """Inputs and fully materialized config, from flags or from a manifest."""
    if args.manifest:
        with _read(args.manifest) as fh:
            try:
                manifest = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"manifest is not valid JSON: {exc}") from None
        if manifest.get("command") != "simulate":
            raise DataError("manifest was not produced by 'simulate'")
        inputs = manifest["inputs"]
        for name, entry in inputs.items():
            if entry is None:
                continue
            if not Path(entry["path"]).exists():
                raise DataError(f"input {name} missing: {entry['path']}")
            if sha256_file(entry["path"]) != entry["sha256"]:
                raise DataError(f"input {name} changed since the manifest was written")
        config = parse_config(manifest["config"])
        options = manifest["options"]
        return {"inputs": {k: (v["path"] if v else None) for k, v in inputs.items()},
                "topics": options["topics"], "jobs": args.jobs or options.get("jobs", 1)}, config

    missing = [flag for flag, value in (("--graph", args.graph), ("--attitudes", args.attitudes),
                                        ("--config", args.config)) if value is None]
    if missing:
        raise UsageError(f"missing required option(s): {', '.join(missing)}")
    with _read(args.config) as fh:
        config = parse_config(fh)
    changes = {}
    if args.model is not None:
        changes["model"] = Model(args.model)
    if args.p is not None:
        changes["ic_probability"] = args.p
    if args.rng_seed is not None:
        changes["rng_seed"] = args.rng_seed
    if args.monte_carlo is not None:
        changes["monte_carlo_runs"] = args.monte_carlo
    if args.rounds is not None:
        changes["rounds"] = args.rounds
    try:
        config = config.replace(**changes)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    topics = args.topics or _infer_topics(args.attitudes, args.seeds)
    inputs = {"graph": str(Path(args.graph).resolve()),
              "attitudes": str(Path(args.attitudes).resolve()),
              "config": str(Path(args.config).resolve()),
              "seeds": str(Path(args.seeds).resolve()) if args.seeds else None}
    return {"inputs": inputs, "topics": topics, "jobs": args.jobs or 1}, config


def cmd_simulate(args) -> int:
    resolved, config = _resolve_simulation(args)
    inputs, z = resolved["inputs"], resolved["topics"]
    with _read(inputs["graph"]) as fh:
        graph = load_edge_list(fh, default_weight=config.global_edge_probability)
    with _read(inputs["attitudes"]) as fh:
        attitudes = load_attitude_table(fh, graph, z)
    if config.topic is not None and config.topic >= z:
        raise DataError(f"config topic {config.topic} out of range for {z} topic(s)")

    persistence = np.full((graph.node_count, z), config.initial_persistence)
    if inputs["seeds"]:
        with _read(inputs["seeds"]) as fh:
            entries = load_seed_file(fh, graph, z)
        for topic, nodes in enumerate(seed_sets(entries, z)):
            unknown = [v for v in nodes if attitudes.values[v, topic] == -1.0]
            if unknown:
                raise DataError(f"seed {graph.labels[unknown[0]]!r} has no attitude "
                                f"on topic {topic} in the attitude table")
        for e in entries:
            if e.persistence is not None:
                cols = range(z) if e.topic is None else [e.topic]
                persistence[e.node, list(cols)] = e.persistence

    if config.model is Model.IC:
        from .baselines import run_ic_topics
        final, trace = run_ic_topics(graph, attitudes, config)
    else:
        state, trace = run_uape(graph, attitudes, config, persistence, record_messages=False)
        final = state.attitudes

    stochastic = config.model is Model.IC or config.edge_gate is EdgeGate.BERNOULLI
    if stochastic and config.monte_carlo_runs > 1:
        scores = run_monte_carlo(graph, attitudes, config, jobs=resolved["jobs"],
                                 initial_persistence=persistence)
    else:
        scores = (final.values != -1.0).astype(np.float64)

    out = _out_dir(args.out_dir)
    curve = activation_curve(trace, attitudes, config.rounds)
    _write(out / "trace.csv", lambda fh: write_trace(trace, graph, fh))
    _write(out / "curve.csv", lambda fh: write_curve(curve, fh))
    _write(out / "summary.csv", lambda fh: _write_summary(trace, curve, fh))
    _write(out / "scores.csv", lambda fh: write_scores(graph, scores, fh))
    truth = GroundTruth((final.values != -1.0).astype(np.int64))
    _write(out / "activation.csv", lambda fh: write_truth(graph, truth, fh))
    manifest = {
        "command": "simulate",
        "config": config.to_text(),
        "config_digest": config.digest(),
        "inputs": {k: ({"path": v, "sha256": sha256_file(v)} if v else None)
                   for k, v in inputs.items()},
        "options": {"topics": z, "jobs": resolved["jobs"]},
        "rng_seed": config.rng_seed,
    }
    _write_manifest(out, manifest, ["trace.csv", "curve.csv", "summary.csv", "scores.csv",
                                    "activation.csv"])
    print(f"{config.model.value}: {len(trace)} event(s) over {config.rounds} round(s); "
          f"outputs in {out}")
    return 0


def _write_summary(trace, curve, fh) -> None:
    fh.write("round,topic,positive,neutral,negative,unknown,adjacent\n")
    for r in range(curve.shape[0]):
        for t in range(curve.shape[1]):
            sizes = trace.adjacent_sizes.get(t)
            adj = 0 if sizes is None or r == 0 else int(sizes[r - 1])
            pos, neu, neg, unk = curve[r, t].tolist()
            fh.write(f"{r},{t},{pos},{neu},{neg},{unk},{adj}\n")


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def cmd_evaluate(args) -> int:
    if (args.scores is None) == (args.trace is None):
        raise UsageError("give exactly one of --scores or --trace")
    if args.trace is not None and args.attitudes is None:
        raise UsageError("--trace needs --attitudes (the initial attitude table)")
    z = args.topics or _infer_topics(args.truth)
    with _read(args.graph) as fh:
        graph = load_edge_list(fh)
    with _read(args.truth) as fh:
        truth = load_truth(fh, graph, z)
    if args.scores is not None:
        with _read(args.scores) as fh:
            scores = load_scores(fh, graph, z)
        source = args.scores
        curve = None
    else:
        from .engine import read_trace
        with _read(args.attitudes) as fh:
            initial = load_attitude_table(fh, graph, z)
        with _read(args.trace) as fh:
            trace = read_trace(fh, graph)
        final = apply_trace(initial, trace)
        scores = (final.values != -1.0).astype(np.float64)
        source = args.trace
        rounds = int(trace.round.max()) if len(trace) else 0
        curve = activation_curve(trace, initial, rounds)
    missing = np.argwhere(np.isnan(scores))
    if len(missing):
        v, t = missing[0]
        raise DataError(f"scores missing for node {graph.labels[v]!r}, topic {t}")
    topics = range(z) if args.topic is None else [args.topic]
    auc = {}
    for t in topics:
        try:
            auc[t] = roc_auc(scores[:, t], truth.labels[:, t])
        except UndefinedAUCError:
            raise DataError(f"AUC undefined for topic {t}: truth labels are all "
                            f"{int(truth.labels[0, t])}") from None
    report = EvaluationReport(
        model=args.model, auc=auc, curve=curve,
        metadata={"scores_digest": sha256_file(source), "truth_digest": sha256_file(args.truth)})
    out = Path(args.out)
    _out_dir(out.parent)
    _write(out, lambda fh: fh.write(report.to_text()))
    if curve is not None:
        _write(out.with_suffix(".curve.csv"), lambda fh: write_curve(curve, fh))
    for t, value in auc.items():
        print(f"auc.{t} = {value:.6f}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uape", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"uape {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a synthetic corpus (edge list, attitudes, seeds)")
    gen.add_argument("--nodes", type=int, required=True, help="node count n")
    gen.add_argument("--edges", type=int, required=True, help="distinct directed edges m")
    gen.add_argument("--topics", type=int, required=True, help="topic count z")
    gen.add_argument("--seeds", type=int, required=True, help="seed nodes per topic")
    gen.add_argument("--rng-seed", type=int, default=0, help="generator seed (default 0)")
    gen.add_argument("--edge-weight", type=float, default=None,
                     help="write this delivery probability on every edge (default: omit weights)")
    gen.add_argument("--out-dir", required=True, help="directory for the corpus files")
    gen.set_defaults(func=cmd_generate)

    sim = sub.add_parser("simulate", help="run a cascade and write trace, curves and scores")
    sim.add_argument("--graph", help="edge list file")
    sim.add_argument("--attitudes", help="initial attitude table (node,topic,attitude)")
    sim.add_argument("--config", help="key = value config file")
    sim.add_argument("--seeds", help="seed file (label[,topic[,persistence]]); optional")
    sim.add_argument("--topics", type=int, help="topic count (default: inferred from inputs)")
    sim.add_argument("--model", choices=[m.value for m in Model], help="overrides config 'model'")
    sim.add_argument("--p", type=float, help="IC activation probability (default: edge weights)")
    sim.add_argument("--rounds", type=int, help="overrides config 'rounds'")
    sim.add_argument("--rng-seed", type=int, help="overrides config 'rng_seed'")
    sim.add_argument("--monte-carlo", type=int, metavar="M",
                     help="Monte Carlo runs for scores (overrides 'monte_carlo_runs')")
    sim.add_argument("--jobs", type=int, metavar="J", help="worker processes for Monte Carlo")
    sim.add_argument("--manifest", help="replay the run recorded in this manifest.json")
    sim.add_argument("--out-dir", required=True, help="directory for outputs")
    sim.set_defaults(func=cmd_simulate)

    ev = sub.add_parser("evaluate", help="ROC-AUC of scores or a trace against ground truth")
    ev.add_argument("--graph", required=True, help="edge list file (node label table)")
    ev.add_argument("--truth", required=True, help="ground truth (node,topic,label)")
    ev.add_argument("--scores", help="scores file (node,topic,score)")
    ev.add_argument("--trace", help="trace file; scored by final activation")
    ev.add_argument("--attitudes", help="initial attitude table, required with --trace")
    ev.add_argument("--topics", type=int, help="topic count (default: inferred from truth)")
    ev.add_argument("--topic", type=int, help="evaluate a single topic")
    ev.add_argument("--model", default="uape", help="model label recorded in the report")
    ev.add_argument("--out", required=True, help="report path (key = value text)")
    ev.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"uape: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FormatError, UndefinedAUCError) as exc:
        print(f"uape: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AssertionError as exc:
        print(f"uape: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as exc:
        print(f"uape: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
