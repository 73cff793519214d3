"""Command-line front end: generation, attacks, pipeline runs, inspection.

Every artifact-writing invocation drops a ``<out>.manifest.json`` sidecar
recording the command, resolved configuration, seeds, library version, and
wall-clock time.  Outputs themselves are deterministic for fixed seeds; the
manifest (which carries timing) is the one file excluded from that contract.

Exit codes: 0 success, 1 algorithmic failure (a report is still emitted),
2 usage or input error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

from . import __version__
from .absorber import (
    AbsorberConfig,
    absorber_from_json_obj,
    absorber_to_json_obj,
    build_single_absorbers,
    chain_absorbers,
    complete_absorbers,
    verify_absorber,
)
from .adversary import (
    ExperimentChecks,
    experiment_report_to_csv,
    k3_attack,
    resilience_experiment,
    triangle_retention_profile,
)
from .connector import ConnectionRequest, connect_all
from .gadgets import build_gadget
from .graphcore import (
    Graph,
    InputError,
    gnp_generate,
    graph_from_edgelist_text,
    graph_to_edgelist_text,
    graph_to_json_obj,
    random_partition,
    read_graph,
    rng_for,
)
from .hamiltonian import (
    Certificate,
    FailureReport,
    PipelineConfig,
    certificate_from_json_obj,
    certificate_to_json_obj,
    cover_with_square_paths,
    failure_report_to_json_obj,
    find_square_ham,
    jsonable,
    verify_certificate,
)

_USAGE_ERROR = 2
_IO_ERROR = 3


def _json_text(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def _ints(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(int(tok) for tok in text.replace(";", ",").split(","))
    except ValueError as exc:
        raise InputError(f"expected a comma-separated integer list: {text!r}") from exc


def _job_pairs(text: str) -> tuple[tuple[tuple[int, int], tuple[int, int]], ...]:
    """Parse ``a,b,c,d[;e,f,g,h...]`` into ((a,b),(c,d)) jobs."""
    jobs = []
    for chunk in text.split(";"):
        vals = _ints(chunk)
        if len(vals) != 4:
            raise InputError(
                f"each job needs four vertices from,from,to,to — got {chunk!r}"
            )
        jobs.append(((vals[0], vals[1]), (vals[2], vals[3])))
    return tuple(jobs)


def load_pipeline_config(path: str | None, seed: int | None) -> PipelineConfig:
    """Build a :class:`PipelineConfig` from a flat ``key=value`` file.

    Blank lines and ``#`` comments are ignored; ``seed`` (from ``--seed``)
    overrides the file.  Types follow the field defaults; the assembly
    length list is comma-separated.
    """
    data: dict[str, str] = {}
    if path is not None:
        for lineno, line in enumerate(
            Path(path).read_text().splitlines(), start=1
        ):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise InputError(f"{path}:{lineno}: expected key=value")
            key, _, value = stripped.partition("=")
            data[key.strip()] = value.strip()
    fields = {f.name: f.default for f in dataclasses.fields(PipelineConfig)}
    kwargs = {}
    for key, raw in data.items():
        if key not in fields:
            raise InputError(f"unknown config key {key!r}")
        default = fields[key]
        if isinstance(default, tuple):
            kwargs[key] = _ints(raw)
        elif isinstance(default, int):
            kwargs[key] = int(raw)
        else:
            kwargs[key] = float(raw)
    if seed is not None:
        kwargs["seed"] = seed
    return PipelineConfig(**kwargs)


def _pool_plan(x_count: int, blocks: int) -> list[int]:
    """Reservoir sizes for a standalone absorber build over given absorbees."""
    interior = 4 * blocks - 4
    star = x_count + 4
    # Rounds after the first match against two anchors at once, so their
    # pools see roughly squared edge density and need more slack.
    joint = 2 * x_count + 8
    # Three or more blocks push the spine search onto the layered route,
    # which only gains traction once the reservoir is population-scale.
    floor = 110 if blocks >= 3 else max(8, interior + 1)
    w5 = interior * x_count + floor
    w6 = 2 * (blocks - 1) * x_count + 4
    w7 = 2 * max(x_count - 1, 1) + 4
    return [star, joint, joint, joint, w5, w6, w7]


def _cmd_generate(args) -> tuple[int, str, dict]:
    g = gnp_generate(args.n, args.p, args.seed)
    text = (
        graph_to_edgelist_text(g)
        if args.format == "edgelist"
        else _json_text(graph_to_json_obj(g))
    )
    return 0, text, {"n": args.n, "p": args.p, "seed": args.seed}


def _cmd_attack(args) -> tuple[int, str, dict]:
    g = read_graph(args.graph)
    res = k3_attack(g, args.gamma, args.seed)
    if args.format == "edgelist":
        text = graph_to_edgelist_text(res.attacked)
    else:
        text = _json_text(
            {
                "v1": list(res.v1),
                "v2": list(res.v2),
                "removed_edge_count": res.removed_edge_count,
                "graph": graph_to_json_obj(res.attacked),
            }
        )
    return 0, text, {"gamma": args.gamma, "seed": args.seed, "graph": args.graph}


def _cmd_profile(args) -> tuple[int, str, dict]:
    before = read_graph(args.before)
    after = read_graph(args.after)
    prof = triangle_retention_profile(before, after, args.p_hint, args.gamma)
    if args.format == "csv":
        lines = ["vertex,before,after,retained"]
        for v, (b, a) in enumerate(zip(prof.before, prof.after)):
            ratio = a / b if b else 1.0
            lines.append(f"{v},{b},{a},{ratio}")
        text = "\n".join(lines) + "\n"
    else:
        text = _json_text(prof)
    return 0, text, {"before": args.before, "after": args.after}


def _cmd_find(args) -> tuple[int, str, dict]:
    g = read_graph(args.graph)
    host = read_graph(args.host) if args.host else None
    config = load_pipeline_config(args.config, args.seed)
    outcome = find_square_ham(g, host, config)
    cfg = dataclasses.asdict(config)
    if isinstance(outcome, Certificate):
        return 0, _json_text(certificate_to_json_obj(outcome)), cfg
    return 1, _json_text(failure_report_to_json_obj(outcome)), cfg


def _cmd_verify(args) -> tuple[int, str, dict]:
    g = read_graph(args.graph)
    obj = json.loads(Path(args.certificate).read_text())
    cert = certificate_from_json_obj(obj)
    check = verify_certificate(g, cert)
    return (0 if check.ok else 1), _json_text(check), {
        "graph": args.graph,
        "certificate": args.certificate,
    }


def _cmd_connect(args) -> tuple[int, str, dict]:
    g = read_graph(args.graph)
    pairs = _job_pairs(args.pairs)
    ports = {v for (a, c) in pairs for v in (*a, *c)}
    if args.w:
        w = _ints(args.w)
    else:
        w = tuple(v for v in range(g.n) if v not in ports)
    req = ConnectionRequest(
        pairs=pairs, w=w, b=args.b, length=args.length, retries=args.retries
    )
    res = connect_all(g, req, args.seed, x=_ints(args.exclude), route=args.route)
    payload = {
        "ok": res.ok,
        "embeddings": [
            None if emb is None else list(emb.vertices) for emb in res.embeddings
        ],
        "diagnostics": jsonable(res.diagnostics),
    }
    cfg = {
        "pairs": args.pairs,
        "b": args.b,
        "length": args.length,
        "route": args.route,
        "seed": args.seed,
    }
    return (0 if res.ok else 1), _json_text(payload), cfg


def _cmd_absorber_build(args) -> tuple[int, str, dict]:
    g = read_graph(args.graph)
    xs = _ints(args.x)
    sizes = _pool_plan(len(xs), args.blocks)
    rest = [v for v in range(g.n) if v not in set(xs)]
    if sum(sizes) > len(rest):
        report = FailureReport(
            "partition",
            {"reason": "not enough vertices for the reservoirs",
             "needed": sum(sizes), "available": len(rest)},
        )
        return 1, _json_text(failure_report_to_json_obj(report)), {}
    part = random_partition(rest, sizes, rng_for(args.seed, 71))
    w1, w2, w3, w4, w5, w6, w7 = part.classes
    cfg = AbsorberConfig(blocks=args.blocks, seed=args.seed)
    records, fail = build_single_absorbers(g, xs, w1, w2, w3, w4)
    if fail is None:
        singles, fail = complete_absorbers(g, records, w5, w6, cfg)
    if fail is None:
        # Reservoir slack left over from earlier stages funds the links.
        taken = {v for rec in singles for v in rec.body()}
        link_pool = sorted((set(w5) | set(w6) | set(w7)) - taken)
        built, fail = chain_absorbers(g, singles, link_pool, cfg)
    meta = {"x": list(xs), "blocks": args.blocks, "seed": args.seed}
    if fail is not None:
        report = FailureReport(fail.stage, dict(fail.diagnostics))
        return 1, _json_text(failure_report_to_json_obj(report)), meta
    return 0, _json_text(absorber_to_json_obj(built)), meta


def _cmd_absorber_verify(args) -> tuple[int, str, dict]:
    g = read_graph(args.graph)
    obj = json.loads(Path(args.absorber).read_text())
    a = absorber_from_json_obj(obj)
    report = verify_absorber(g, a, args.mode, samples=args.samples, seed=args.seed)
    meta = {"absorber": args.absorber, "mode": args.mode, "seed": args.seed}
    return (0 if report.ok else 1), _json_text(report), meta


def _cmd_gadget(args) -> tuple[int, str, dict]:
    gadget = build_gadget(
        args.kind, length=args.length, b=args.b, blocks=args.blocks
    )
    meta = {"kind": args.kind}
    if args.format == "edgelist":
        return 0, graph_to_edgelist_text(Graph(gadget.labels, gadget.edges)), meta
    return 0, _json_text(gadget), meta


def _cmd_experiment(args) -> tuple[int, str, dict]:
    report = resilience_experiment(
        args.n,
        args.p,
        args.gamma,
        args.seeds,
        checks=ExperimentChecks(),
        jobs=args.jobs,
    )
    text = (
        experiment_report_to_csv(report)
        if args.format == "csv"
        else _json_text(report)
    )
    cfg = {"n": args.n, "p": args.p, "gamma": args.gamma, "seeds": args.seeds}
    return 0, text, cfg


def _cmd_cover(args) -> tuple[int, str, dict]:
    g = read_graph(args.graph)
    verts = _ints(args.verts) if args.verts else tuple(range(g.n))
    res = cover_with_square_paths(
        g,
        verts,
        eps=args.eps,
        seed=args.seed,
        class_floor=args.class_floor,
        budget=args.budget,
    )
    meta = {"eps": args.eps, "seed": args.seed}
    return 0, _json_text(res), meta


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artifact",
        description="Square-Hamilton-cycle machinery: gadgets, absorbers, "
        "connections, attacks, and experiments.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=str, default=None)

    p = sub.add_parser("generate", help="write a random binomial graph")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-p", type=float, required=True)
    p.add_argument("--format", choices=("edgelist", "json"), default="edgelist")
    common(p)
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("attack", help="remove all edges inside a random class")
    p.add_argument("--graph", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--format", choices=("edgelist", "json"), default="json")
    common(p)
    p.set_defaults(handler=_cmd_attack)

    p = sub.add_parser("profile", help="per-vertex triangle retention")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--p-hint", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_profile)

    p = sub.add_parser("find", help="run the full pipeline on a stored graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--host", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(handler=_cmd_find)

    p = sub.add_parser("verify", help="check a stored certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--certificate", required=True)
    common(p, seed=False)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("connect", help="batch pair-to-pair connections")
    p.add_argument("--graph", required=True)
    p.add_argument(
        "--pairs",
        required=True,
        help="jobs 'a,b,c,d[;...]': connect ordered edge (a,b) to (c,d)",
    )
    p.add_argument("--w", default="", help="reservoir vertices (default: rest)")
    p.add_argument("--b", type=int, choices=(1, 2), default=1)
    p.add_argument("--length", type=int, default=4)
    p.add_argument("--route", choices=("auto", "direct", "projection"), default="auto")
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--exclude", default="", help="vertices to keep out of interiors")
    common(p)
    p.set_defaults(handler=_cmd_connect)

    p = sub.add_parser("absorber", help="build or verify absorbers")
    actions = p.add_subparsers(dest="action", required=True)
    pb = actions.add_parser("build", help="build a chained absorber")
    pb.add_argument("--graph", required=True)
    pb.add_argument("--x", required=True, help="absorbee vertices, comma-separated")
    pb.add_argument("--blocks", type=int, default=2)
    common(pb)
    pb.set_defaults(handler=_cmd_absorber_build)
    pv = actions.add_parser("verify", help="verify a stored absorber")
    pv.add_argument("--graph", required=True)
    pv.add_argument("--absorber", required=True)
    pv.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    pv.add_argument("--samples", type=int, default=64)
    common(pv)
    pv.set_defaults(handler=_cmd_absorber_verify)

    p = sub.add_parser("gadget", help="dump a labeled template")
    p.add_argument(
        "--kind", choices=("square-path", "pseudo-path", "backbone"), required=True
    )
    p.add_argument("--length", type=int, default=None)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--blocks", type=int, default=None)
    p.add_argument("--format", choices=("json", "edgelist"), default="json")
    common(p, seed=False)
    p.set_defaults(handler=_cmd_gadget)

    p = sub.add_parser("experiment", help="seeded Monte Carlo attack sweep")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-p", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(handler=_cmd_experiment)

    p = sub.add_parser("cover", help="cover a vertex set with square paths")
    p.add_argument("--graph", required=True)
    p.add_argument("--verts", default="", help="target vertices (default: all)")
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--class-floor", type=int, default=10)
    p.add_argument("--budget", type=int, default=60_000)
    common(p)
    p.set_defaults(handler=_cmd_cover)
    return parser


def run_command(argv=None) -> int:
    """Parse and run one command; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        code, text, config = args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return _IO_ERROR
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON input: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    elapsed = time.perf_counter() - start
    if args.out:
        try:
            out = Path(args.out)
            out.write_text(text)
            manifest = {
                "command": args.command,
                "argv": list(argv) if argv is not None else sys.argv[1:],
                "config": jsonable(config),
                "seed": getattr(args, "seed", None),
                "version": __version__,
                "wall_clock_seconds": elapsed,
                "outputs": [str(out)],
            }
            Path(str(out) + ".manifest.json").write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n"
            )
        except OSError as exc:
            print(f"i/o error: {exc}", file=sys.stderr)
            return _IO_ERROR
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run_command())
