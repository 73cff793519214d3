"""End-to-end construction of squares of Hamilton cycles.

The pipeline partitions the vertex set into absorbee, reservoir, and covering
territory, builds a chained absorber, covers the rest with long square paths,
matches stray vertices to anchors, threads everything into one cycle through
a connector reservoir, and lets the absorber swallow whatever the threading
consumed.  Every returned certificate is re-verified; failures are
first-class reports naming the stage that ran out of room.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .absorber import (
    Absorber,
    AbsorberConfig,
    absorb,
    build_single_absorbers,
    chain_absorbers,
    complete_absorbers,
    verify_absorber,
)
from .connector import ConnectionRequest, connect_one
from .gadgets import is_square_path
from .graphcore import Graph, InputError, random_partition, rng_for
from .matching import BipartiteInstance, hall_saturating_matching

STAGES = (
    "partition",
    "absorber",
    "covering",
    "leftover-matching",
    "connecting",
    "absorption",
)


@dataclass(frozen=True)
class PipelineConfig:
    """Desk-scale tunables for the full pipeline.

    The asymptotic argument fixes these existentially; here they are explicit
    knobs, logged with every run.  ``connector_length`` is the width-2
    backbone connector length (a multiple of 4, at least 8); ``eps`` is the
    fraction of absorbees reserved as leftover anchors; ``x_fraction`` sizes
    the absorbee set against ``n``.
    """

    alpha: float = 0.05
    eps: float = 0.75
    connector_length: int = 8
    x_fraction: float = 0.05
    star_margin: int = 2
    joint_factor: int = 2
    joint_margin: int = 4
    backbone_headroom: int = 5
    junction_weight: int = 2
    link_weight: int = 2
    class_floor: int = 10
    cover_eps: float = 0.25
    cover_budget: int = 60_000
    small_n_cutoff: int = 40
    brute_budget: int = 3_000_000
    unit_retries: int = 8
    connect_retries: int = 3
    link_retries: int = 6
    assembly_lengths: tuple[int, ...] = (4, 5, 6, 7, 8)
    assembly_budget: int = 2_000
    restarts: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("alpha", "eps", "x_fraction", "cover_eps"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise InputError(f"{name} must lie in (0, 1), got {value}")
        if self.connector_length < 8 or self.connector_length % 4 != 0:
            raise InputError(
                "connector_length must be a multiple of 4, at least 8, "
                f"got {self.connector_length}"
            )
        if self.small_n_cutoff < 5:
            raise InputError("small_n_cutoff must be at least 5")
        if self.class_floor < 4:
            raise InputError("class_floor must be at least 4")
        for name in (
            "unit_retries",
            "connect_retries",
            "link_retries",
            "restarts",
            "assembly_budget",
        ):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be at least 1")
        for length in self.assembly_lengths:
            if not 4 <= length <= 8:
                raise InputError(
                    f"assembly lengths must lie in 4..8, got {length}"
                )


@dataclass(frozen=True)
class Certificate:
    """A cyclic vertex order realizing the square of a Hamilton cycle."""

    order: tuple[int, ...]


@dataclass(frozen=True)
class CertificateCheck:
    """Verification outcome; on failure the first missing edge is named."""

    ok: bool
    position: int | None
    distance: int | None
    missing: tuple[int, int] | None


@dataclass(frozen=True)
class FailureReport:
    """Where and why a pipeline run stopped.

    ``stage`` is one of :data:`STAGES`; ``diagnostics`` is stage-specific and
    never empty.
    """

    stage: str
    diagnostics: dict

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise InputError(f"unknown stage {self.stage!r}")
        if not self.diagnostics:
            raise InputError("failure reports need nonempty diagnostics")


def jsonable(obj):
    """Recursively strip dataclasses, tuples, and sets down to JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    return obj


def certificate_to_json_obj(cert: Certificate) -> dict:
    return {"order": list(cert.order)}


def certificate_from_json_obj(obj: Mapping) -> Certificate:
    try:
        return Certificate(tuple(int(v) for v in obj["order"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed certificate: {exc}") from exc


def failure_report_to_json_obj(report: FailureReport) -> dict:
    return {"stage": report.stage, "diagnostics": jsonable(report.diagnostics)}


def verify_certificate(g: Graph, cert: Certificate) -> CertificateCheck:
    """Check that every cyclic distance-1 and distance-2 pair is an edge.

    Args:
        g: Host graph.
        cert: Candidate cyclic order.

    Returns:
        A :class:`CertificateCheck`; the first missing edge is reported with
        its position and cyclic distance.

    Raises:
        InputError: If the order is not a permutation of all vertices, or
            the graph has fewer than 3 vertices.
    """
    if g.n < 3:
        raise InputError("squares of Hamilton cycles need at least 3 vertices")
    order = cert.order
    if len(order) != g.n or set(order) != set(range(g.n)):
        raise InputError("certificate order must be a permutation of all vertices")
    n = g.n
    for i in range(n):
        for d in (1, 2):
            u, v = order[i], order[(i + d) % n]
            if not g.has_edge(u, v):
                return CertificateCheck(False, i, d, (min(u, v), max(u, v)))
    return CertificateCheck(True, None, None, None)


@dataclass(frozen=True)
class BruteForceResult:
    """Outcome of exhaustive certificate search.

    ``status`` is ``found`` (with certificate), ``none`` (search space
    exhausted), or ``unknown`` (budget ran out first).
    """

    status: str
    certificate: Certificate | None
    nodes: int


def brute_force_square_ham(g: Graph, budget: int = 3_000_000) -> BruteForceResult:
    """Exhaustive backtracking over cyclic orders with symmetry reduction.

    Vertex 0 is pinned first and the two traversal directions are collapsed
    by requiring the second vertex to precede the last one.  Intended for
    small instances; larger ones exhaust ``budget`` and report ``unknown``.
    """
    n = g.n
    if n < 3:
        return BruteForceResult("none", None, 0)
    order = [0]
    used = [False] * n
    used[0] = True
    iters = [iter(sorted(g.neighbors(0)))]
    nodes = 0
    while iters:
        depth = len(order)
        try:
            v = next(iters[-1])
        except StopIteration:
            iters.pop()
            if len(order) > 1:
                used[order.pop()] = False
            continue
        if used[v]:
            continue
        if depth >= 2 and not g.has_edge(v, order[-2]):
            continue
        if depth == n - 1:
            if order[1] > v:
                continue
            if not (
                g.has_edge(v, order[0])
                and g.has_edge(v, order[1])
                and g.has_edge(order[-1], order[0])
            ):
                continue
            cert = Certificate(tuple(order) + (v,))
            check = verify_certificate(g, cert)
            assert check.ok, "brute-force search produced a bad certificate"
            return BruteForceResult("found", cert, nodes)
        nodes += 1
        if nodes > budget:
            return BruteForceResult("unknown", None, nodes)
        order.append(v)
        used[v] = True
        iters.append(iter(sorted(g.neighbors(v) - {order[0]})))
    return BruteForceResult("none", None, nodes)


@dataclass(frozen=True)
class AlmostSpanningResult:
    """Best square path found and the fraction of the target set it covers."""

    path: tuple[int, ...]
    coverage: float


def almost_spanning_square_path(
    g: Graph,
    eps: float = 0.1,
    seed: int = 0,
    budget: int = 50_000,
    verts: Iterable[int] | None = None,
) -> AlmostSpanningResult:
    """Randomized greedy search for a long square path.

    Grows a path from a random edge at both ends through common
    neighborhoods, restarting until the budget is spent or coverage reaches
    ``1 - eps``.  Always returns its best attempt (possibly a single vertex);
    this is a measured heuristic, not a guarantee.
    """
    vs = sorted(set(verts)) if verts is not None else list(range(g.n))
    if not vs:
        return AlmostSpanningResult((), 0.0)
    if len(vs) == 1:
        return AlmostSpanningResult((vs[0],), 1.0)
    vset = set(vs)
    rng = rng_for(seed, 47)
    best: tuple[int, ...] = (vs[0],)
    target = math.ceil((1 - eps) * len(vs))
    spent = 0
    while spent < budget and len(best) < target:
        spent += 1
        a = vs[int(rng.integers(len(vs)))]
        nbrs = sorted((g.neighbors(a) & vset) - {a})
        if not nbrs:
            continue
        b = nbrs[int(rng.integers(len(nbrs)))]
        path = [a, b]
        in_path = {a, b}
        while spent < budget:
            spent += 1
            fwd = sorted(
                (g.neighbors(path[-1]) & g.neighbors(path[-2]) & vset) - in_path
            )
            bwd = sorted(
                (g.neighbors(path[0]) & g.neighbors(path[1]) & vset) - in_path
            )
            if not fwd and not bwd:
                break
            # Feed the scarcer end first so neither side starves early.
            if fwd and (not bwd or len(fwd) <= len(bwd)):
                v = fwd[int(rng.integers(len(fwd)))]
                path.append(v)
            else:
                v = bwd[int(rng.integers(len(bwd)))]
                path.insert(0, v)
            in_path.add(v)
        if len(path) > len(best):
            best = tuple(path)
    if len(best) >= 2:
        check = is_square_path(g, best)
        assert check.ok, f"greedy extension produced a bad path: {check.reason}"
    return AlmostSpanningResult(best, len(best) / len(vs))


@dataclass(frozen=True)
class CoverResult:
    """Vertex-disjoint square paths over a target set plus the leftover."""

    paths: tuple[tuple[int, ...], ...]
    leftover: tuple[int, ...]
    class_sizes: tuple[int, ...]
    target_fraction: float
    leftover_fraction: float


def cover_with_square_paths(
    g: Graph,
    u_prime: Iterable[int],
    eps: float = 0.25,
    seed: int = 0,
    class_floor: int = 10,
    budget: int = 60_000,
) -> CoverResult:
    """Bootstrap covering: halving classes, each swept after the last's dregs.

    The target set is cut into classes of sizes ``|U'|/2, |U'|/4, ...``
    (remainder joining the last class); class ``i + 1`` is searched together
    with whatever class ``i`` left uncovered.  Paths shorter than two
    vertices are returned as leftover instead.
    """
    u = sorted(set(u_prime))
    msize = len(u)
    if msize == 0:
        return CoverResult((), (), (), eps, 0.0)
    q = 1
    while msize // 2 ** (q + 1) >= class_floor:
        q += 1
    sizes = [msize // 2 ** i for i in range(1, q + 1)]
    sizes[-1] += msize - sum(sizes)
    part = random_partition(u, sizes, rng_for(seed, 43))
    carry: tuple[int, ...] = ()
    paths: list[tuple[int, ...]] = []
    for i, cls in enumerate(part.classes):
        pool = sorted(set(carry) | set(cls))
        res = almost_spanning_square_path(
            g, eps=eps, seed=seed * 101 + i, budget=budget, verts=pool
        )
        if len(res.path) >= 2:
            paths.append(res.path)
            carry = tuple(sorted(set(pool) - set(res.path)))
        else:
            carry = tuple(pool)
    return CoverResult(
        tuple(paths), carry, tuple(sizes), eps, len(carry) / msize
    )


@dataclass(frozen=True)
class LeftoverMatching:
    """Saturating matching of leftover vertices into anchor absorbees."""

    ok: bool
    pairs: tuple[tuple[int, int], ...]
    violator: tuple[int, ...]
    neighborhood: tuple[int, ...]


def match_leftover(
    g: Graph, q_set: Iterable[int], x1: Iterable[int]
) -> LeftoverMatching:
    """Match every leftover vertex to a distinct adjacent anchor.

    Args:
        g: Host graph.
        q_set: Leftover vertices that must all be matched.
        x1: Anchor vertices (disjoint from ``q_set``).

    Returns:
        A :class:`LeftoverMatching`; on failure the violating leftover set
        and its joint neighborhood witness Hall's condition breaking.
    """
    qs = sorted(set(q_set))
    anchors = sorted(set(x1))
    if set(qs) & set(anchors):
        raise InputError("leftover vertices and anchors must be disjoint")
    index = {v: k for k, v in enumerate(anchors)}
    rows = tuple(
        tuple(sorted(index[u] for u in g.neighbors(q) if u in index))
        for q in qs
    )
    res = hall_saturating_matching(BipartiteInstance(rows, len(anchors)))
    if res.status != "matched":
        return LeftoverMatching(
            False,
            (),
            tuple(qs[i] for i in res.violator),
            tuple(anchors[j] for j in res.neighborhood),
        )
    pairs = tuple((qs[i], anchors[res.pairs[i]]) for i in range(len(qs)))
    return LeftoverMatching(True, pairs, (), ())


def _plan_partition(n: int, config: PipelineConfig) -> dict | None:
    """Role-weighted reservoir sizes, shrinking the absorbee count to fit.

    The first star pool feeds single-adjacency picks; the other three feed
    joint-adjacency picks and must be roughly twice as wide to keep the
    Hall rounds saturable.
    """
    blocks = config.connector_length // 4
    interior = config.connector_length - 4
    x = max(4, round(config.x_fraction * n))
    while x >= 2:
        star = x + config.star_margin
        joint = config.joint_factor * x + config.joint_margin
        # Star pools leave exactly (star - x) + 3 (joint - x) vertices
        # unpicked, and those flow into the backbone reservoir; the planned
        # slice only tops up the difference.
        spare = (star - x) + 3 * (joint - x)
        w5 = max(0, interior * x - spare) + max(
            config.backbone_headroom, interior + 1
        )
        w6 = config.junction_weight * (blocks - 1) * x + 4
        w7 = config.link_weight * max(x - 1, 1) + 4
        total = x + star + 3 * joint + w5 + w6 + w7
        if n - total >= max(config.class_floor, 8):
            return {
                "x": x,
                "star": star,
                "joint": joint,
                "w5": w5,
                "w6": w6,
                "w7": w7,
                "uncommitted": n - total,
            }
        x -= 1
    return None


def _direct_arc(g: Graph, frm: tuple[int, int], to: tuple[int, int]) -> bool:
    """Whether two ordered pairs chain into a square path with no interior."""
    return (
        g.has_edge(frm[1], to[0])
        and g.has_edge(frm[0], to[0])
        and g.has_edge(frm[1], to[1])
    )


def _cascade_connect(
    g: Graph,
    frm: tuple[int, int],
    to: tuple[int, int],
    pool: Sequence[int],
    exclude: set[int],
    seed: int,
    lengths: Sequence[int],
) -> tuple[int, ...] | None:
    """Shortest-first connection attempts; returns the interior or None."""
    if len({*frm, *to}) != 4:
        return None
    for k, length in enumerate(lengths):
        req = ConnectionRequest(pairs=((frm, to),), w=tuple(pool), b=1, length=length)
        res = connect_one(g, req, exclude, seed * 37 + k)
        if res.ok:
            return tuple(
                v for v in res.embedding.vertices if v not in (*frm, *to)
            )
    return None


def _insert_into_paths(g: Graph, paths: list[list[int]], q: int) -> bool:
    """Splice ``q`` into some path interior, preserving square-path pairs.

    Splicing between positions ``i - 1`` and ``i`` needs ``q`` adjacent to
    the two split vertices and to their outer distance-2 partners.
    """
    for path in paths:
        for i in range(1, len(path)):
            anchors = [path[i - 1], path[i]]
            if i >= 2:
                anchors.append(path[i - 2])
            if i + 1 < len(path):
                anchors.append(path[i + 1])
            if all(g.has_edge(q, v) for v in anchors):
                path.insert(i, q)
                return True
    return False


def _assemble_cycle(
    g: Graph,
    a: Absorber,
    pieces: Sequence[tuple[int, ...]],
    fuel: Sequence[int],
    seed: int,
    config: PipelineConfig,
) -> tuple[tuple[int, ...] | None, dict]:
    """Thread all pieces between the absorber's exit and entry pairs.

    Piece order and orientation are free, so a budgeted depth-first search
    explores them: parity-free chains (three host edges) first, then short
    connectors whose interiors consume ``fuel``.  Returns the cycle segment
    that follows the absorber traversal, or diagnostics on the deepest
    threading reached.
    """
    total = len(pieces)
    nodes = 0
    deepest = 0

    def probe(
        cur: tuple[int, int],
        to: tuple[int, int],
        consumed: frozenset[int],
        salt: int,
    ) -> tuple[int, ...] | None:
        nonlocal nodes
        nodes += 1
        if _direct_arc(g, cur, to):
            return ()
        pool = [v for v in fuel if v not in consumed]
        return _cascade_connect(
            g, cur, to, pool, set(consumed), seed * 7919 + salt,
            config.assembly_lengths,
        )

    def dfs(
        cur: tuple[int, int],
        remaining: tuple[int, ...],
        consumed: frozenset[int],
        acc: tuple[int, ...],
    ) -> tuple[tuple[int, ...], frozenset[int]] | None:
        nonlocal deepest
        deepest = max(deepest, total - len(remaining))
        if nodes > config.assembly_budget:
            return None
        if not remaining:
            interior = probe(cur, a.entry, consumed, 1)
            if interior is None:
                return None
            return acc + interior, consumed | set(interior)
        ranked = []
        for pi in remaining:
            piece = pieces[pi]
            for ori in (piece, tuple(reversed(piece))):
                ranked.append((not _direct_arc(g, cur, (ori[0], ori[1])), pi, ori))
        ranked.sort(key=lambda t: (t[0], t[1]))
        for _, pi, ori in ranked:
            if nodes > config.assembly_budget:
                return None
            interior = probe(
                cur, (ori[0], ori[1]), consumed, 101 * pi + 2 * len(acc)
            )
            if interior is None:
                continue
            out = dfs(
                (ori[-2], ori[-1]),
                tuple(j for j in remaining if j != pi),
                consumed | set(interior),
                acc + interior + ori,
            )
            if out is not None:
                return out
        return None

    result = dfs(a.exit, tuple(range(total)), frozenset(), ())
    if result is None:
        return None, {
            "threaded_pieces": deepest,
            "unthreaded_pieces": total - deepest,
            "probes": nodes,
            "reservoir": len(fuel),
        }
    suffix, consumed = result
    return suffix, {"consumed": set(consumed)}


def _attempt(
    g: Graph, config: PipelineConfig, restart: int
) -> Certificate | FailureReport:
    n = g.n
    seed0 = config.seed * 1_000_003 + restart * 7_919
    plan = _plan_partition(n, config)
    if plan is None:
        return FailureReport(
            "partition",
            {"n": n, "reason": "reservoir budgets do not fit any absorbee count"},
        )
    sizes = [
        plan["x"],
        plan["star"],
        plan["joint"],
        plan["joint"],
        plan["joint"],
        plan["w5"],
        plan["w6"],
        plan["w7"],
    ]
    part = random_partition(range(n), sizes, rng_for(seed0, 53))
    x_cls, w1, w2, w3, w4, w5, w6, w7 = part.classes

    records, fail = build_single_absorbers(g, x_cls, w1, w2, w3, w4)
    if fail is not None:
        return FailureReport(fail.stage, dict(fail.diagnostics, plan=plan))
    # Star-pool leftovers would only rejoin the covering territory; feeding
    # them to the backbone reservoir instead keeps its pool from starving.
    star_used = {v for r in records for v in (r.u1, r.u2, r.v1, r.v2)}
    w5_pool = sorted(
        (set(w1) | set(w2) | set(w3) | set(w4) | set(w5)) - star_used
    )
    acfg = AbsorberConfig(
        blocks=config.connector_length // 4,
        unit_retries=config.unit_retries,
        connect_retries=config.connect_retries,
        link_retries=config.link_retries,
        seed=seed0 + 1,
    )
    singles, fail = complete_absorbers(g, records, w5_pool, w6, acfg)
    if fail is not None:
        return FailureReport(fail.stage, dict(fail.diagnostics, plan=plan))
    taken = set()
    for single in singles:
        taken |= single.body()
    w7_pool = sorted(set(w7) | ((set(w5_pool) | set(w6)) - taken))
    absorber, fail = chain_absorbers(g, singles, w7_pool, acfg)
    if fail is not None:
        return FailureReport(fail.stage, dict(fail.diagnostics, plan=plan))
    mode = "exhaustive" if len(x_cls) <= 12 else "sampled"
    audit = verify_absorber(g, absorber, mode, samples=64, seed=seed0)
    if not audit.ok:
        raise AssertionError(f"constructed absorber failed verification: {audit}")

    body = absorber.body()
    u_prime = sorted(set(range(n)) - body)
    cover = cover_with_square_paths(
        g,
        u_prime,
        eps=config.cover_eps,
        seed=seed0 + 2,
        class_floor=config.class_floor,
        budget=config.cover_budget,
    )
    # Most stragglers splice straight into a covering path; only the rest
    # need an anchor absorbee each.
    paths = [list(p) for p in cover.paths]
    stragglers = [
        q for q in cover.leftover if not _insert_into_paths(g, paths, q)
    ]
    for path in paths:
        check = is_square_path(g, tuple(path))
        assert check.ok, f"splicing broke a covering path: {check.reason}"
    xs = sorted(x_cls)
    perm = rng_for(seed0, 59).permutation(len(xs))
    k1 = math.floor(config.eps * len(xs))
    x1 = sorted(xs[int(i)] for i in perm[:k1])
    if len(stragglers) > len(x1):
        return FailureReport(
            "covering",
            {
                "leftover": len(stragglers),
                "anchor_capacity": len(x1),
                "leftover_fraction": cover.leftover_fraction,
                "target_fraction": cover.target_fraction,
                "paths": len(paths),
            },
        )
    matching = match_leftover(g, stragglers, x1)
    if not matching.ok:
        return FailureReport(
            "leftover-matching",
            {
                "violating_leftover": list(matching.violator),
                "joint_neighborhood": list(matching.neighborhood),
                "anchors": len(x1),
            },
        )

    pieces: list[tuple[int, ...]] = [tuple(p) for p in paths]
    pieces.extend((q, xv) for q, xv in matching.pairs)
    # Every absorbee not sitting inside a piece is legal connector fuel: the
    # absorber hands over whatever the threading consumed.
    matched_anchors = {xv for _, xv in matching.pairs}
    fuel = sorted(set(xs) - matched_anchors)
    suffix, info = _assemble_cycle(g, absorber, pieces, fuel, seed0 + 3, config)
    if suffix is None:
        return FailureReport("connecting", dict(info, plan=plan))
    consumed_x = matched_anchors | info["consumed"]
    prime = absorb(absorber, consumed_x)
    cert = Certificate(tuple(prime) + suffix)
    check = verify_certificate(g, cert)
    if not check.ok:
        return FailureReport(
            "absorption",
            {
                "internal_error": True,
                "position": check.position,
                "distance": check.distance,
                "missing": check.missing,
            },
        )
    return cert


def find_square_ham(
    g: Graph,
    gamma_host: Graph | None = None,
    config: PipelineConfig = PipelineConfig(),
) -> Certificate | FailureReport:
    """Find the square of a Hamilton cycle, or report the failing stage.

    Small instances delegate to exhaustive search.  Larger ones run the
    partition / absorber / covering / matching / connecting / absorption
    pipeline, restarting with fresh randomness when a stage fails.  Every
    returned certificate has passed :func:`verify_certificate`.

    Args:
        g: Host graph.
        gamma_host: Optional ambient graph ``g`` must be a subgraph of.
        config: Pipeline tunables.

    Returns:
        A verified :class:`Certificate` or a :class:`FailureReport`.
    """
    if gamma_host is not None:
        ok, offending = g.is_subgraph_of(gamma_host)
        if not ok:
            raise InputError(
                f"graph is not a subgraph of the ambient host: edge {offending}"
            )
    if g.n < config.small_n_cutoff:
        res = brute_force_square_ham(g, config.brute_budget)
        if res.status == "found":
            assert res.certificate is not None
            return res.certificate
        return FailureReport(
            "partition",
            {
                "mode": "small-instance-delegation",
                "brute_status": res.status,
                "nodes": res.nodes,
            },
        )
    last: FailureReport | None = None
    for restart in range(max(1, config.restarts)):
        outcome = _attempt(g, config, restart)
        if isinstance(outcome, Certificate):
            return outcome
        last = outcome
        if outcome.stage == "partition":
            break
    assert last is not None
    return last
