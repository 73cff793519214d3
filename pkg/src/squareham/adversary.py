"""Triangle-resilience adversary: partition attacks and their accounting.

The attack removes every edge inside a random vertex class sized just past a
third of the graph, wiping out a calibrated fraction of the triangles at
each vertex while leaving none with two feet in the class.  This module
builds the attack, profiles per-vertex triangle retention, bounds disjoint
triangle packings, prunes triangle-poor edges, and runs seeded Monte Carlo
experiments over random host graphs.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graphcore import (
    Graph,
    InputError,
    edges_within,
    gnp_generate,
    rng_for,
    triangle_profile,
)


def _gamma_fraction(gamma) -> Fraction:
    """Interpret ``gamma`` as a decimal-precision rational in [0, 1/2)."""
    try:
        frac = Fraction(gamma).limit_denominator(10**9)
    except (TypeError, ValueError) as exc:
        raise InputError(f"gamma must be a number, got {gamma!r}") from exc
    if not 0 <= frac < Fraction(1, 2):
        raise InputError(f"gamma must lie in [0, 1/2), got {gamma}")
    return frac


def attack_class_size(n: int, gamma) -> int:
    """Size of the removed-edge class: ``ceil((1/3 + 2*gamma/3) * n)``."""
    frac = (Fraction(1, 3) + Fraction(2, 3) * _gamma_fraction(gamma)) * n
    return min(n, -(-frac.numerator // frac.denominator))


@dataclass(frozen=True)
class AttackResult:
    """A partition attack: ``attacked`` is the input minus all edges
    internal to ``v1``."""

    v1: tuple[int, ...]
    v2: tuple[int, ...]
    attacked: Graph
    removed_edge_count: int


def k3_attack(gamma_graph: Graph, gamma, seed: int) -> AttackResult:
    """Remove all edges inside a uniformly random class of the pinned size.

    Args:
        gamma_graph: Host graph to attack.
        gamma: Slack parameter in ``[0, 1/2)``; the class has
            ``ceil((1/3 + 2*gamma/3) * n)`` vertices.
        seed: Seeds the class choice.

    Returns:
        An :class:`AttackResult`.  The attacked graph never contains a
        triangle with two vertices in ``v1`` (checked on every call).

    Raises:
        InputError: If ``gamma`` is outside ``[0, 1/2)``.
    """
    n = gamma_graph.n
    size = attack_class_size(n, gamma)
    rng = rng_for(seed, 61)
    chosen = rng.choice(n, size=size, replace=False) if size else np.zeros(0, int)
    v1 = tuple(sorted(int(v) for v in chosen))
    v1_set = frozenset(v1)
    removed = [
        (u, v) for u, v in gamma_graph.edges() if u in v1_set and v in v1_set
    ]
    attacked = gamma_graph.remove_edges(removed)
    for u, v in attacked.edges():
        assert not (u in v1_set and v in v1_set), "attack left an internal edge"
    v2 = tuple(v for v in range(n) if v not in v1_set)
    return AttackResult(v1, v2, attacked, len(removed))


@dataclass(frozen=True)
class RetentionProfile:
    """Per-vertex triangle counts before/after an attack.

    Retained fractions treat triangle-free vertices as fully retained.
    When ``p_hint`` and ``gamma`` are supplied, after-counts are compared
    against the bracketing thresholds ``(4/9 -+ gamma) * C(n,2) * p^3``.
    """

    before: tuple[int, ...]
    after: tuple[int, ...]
    min_retained: float
    mean_retained: float
    threshold_low: float | None
    threshold_high: float | None
    below_low: int | None
    above_high: int | None


def triangle_retention_profile(
    before: Graph,
    after: Graph,
    p_hint: float | None = None,
    gamma=None,
) -> RetentionProfile:
    """Exact per-vertex triangle retention between two nested graphs.

    Args:
        before: Original graph.
        after: Spanning subgraph of ``before``.
        p_hint: Edge density used for the theory thresholds.
        gamma: Slack for the thresholds ``(4/9 -+ gamma) * C(n,2) * p^3``.

    Returns:
        A :class:`RetentionProfile`.

    Raises:
        InputError: If ``after`` is not a subgraph of ``before``.
    """
    ok, offending = after.is_subgraph_of(before)
    if not ok:
        raise InputError(f"after-graph has a new edge {offending}")
    t_before = triangle_profile(before)
    t_after = triangle_profile(after)
    assert (t_after <= t_before).all()
    with np.errstate(invalid="ignore", divide="ignore"):
        retained = np.where(t_before > 0, t_after / np.maximum(t_before, 1), 1.0)
    n = before.n
    threshold_low = threshold_high = None
    below = above = None
    if p_hint is not None and gamma is not None:
        gfrac = _gamma_fraction(gamma)
        scale = math.comb(n, 2) * p_hint**3
        threshold_low = float((Fraction(4, 9) - gfrac) * Fraction(scale))
        threshold_high = float((Fraction(4, 9) + gfrac) * Fraction(scale))
        below = int((t_after < threshold_low).sum())
        above = int((t_after > threshold_high).sum())
    return RetentionProfile(
        tuple(int(t) for t in t_before),
        tuple(int(t) for t in t_after),
        float(retained.min()) if n else 1.0,
        float(retained.mean()) if n else 1.0,
        threshold_low,
        threshold_high,
        below,
        above,
    )


@dataclass(frozen=True)
class PackingResult:
    """Maximum vertex-disjoint triangle packing, exact or bracketed.

    ``status`` is ``exact`` (``lower == upper == size``) or ``bracket``
    (budget exhausted).  ``structural_bound`` is present when a class
    ``v1`` was supplied: no triangle may have two vertices there, so at
    most ``floor(3|v2|/2) / 3`` triangles fit.
    """

    status: str
    size: int
    lower: int
    upper: int
    nodes: int
    structural_bound: int | None
    triangles: tuple[tuple[int, int, int], ...]


class _Budget(Exception):
    pass


def _all_triangles(g: Graph) -> list[tuple[int, int, int]]:
    tris = []
    for u, v in g.edges():
        for w in sorted(g.neighbors(u) & g.neighbors(v)):
            if w > v:
                tris.append((u, v, w))
    return sorted(tris)


def max_triangle_packing(
    g: Graph,
    v1: Iterable[int] | None = None,
    budget: int = 200_000,
) -> PackingResult:
    """Maximum number of vertex-disjoint triangles, by branch and bound.

    Branches on the smallest vertex still usable by some live triangle:
    either one of its triangles joins the packing, or the vertex is set
    aside.  A vertices-remaining/3 bound prunes; a greedy packing seeds the
    incumbent.  When the node budget runs out the result brackets the
    optimum instead of pinning it.

    Args:
        g: Host graph.
        v1: Optional vertex class that no packed triangle may meet twice;
            supplies the structural bound.
        budget: Search-node allowance.

    Returns:
        A :class:`PackingResult` with a witness packing.
    """
    tris = _all_triangles(g)
    tri_at: dict[int, list[int]] = {}
    for idx, t in enumerate(tris):
        for v in t:
            tri_at.setdefault(v, []).append(idx)
    greedy: list[int] = []
    taken: set[int] = set()
    for idx, t in enumerate(tris):
        if not taken.intersection(t):
            greedy.append(idx)
            taken.update(t)
    best = list(greedy)
    nodes = 0
    in_triangle = sorted(tri_at)

    def live_bound(covered: set[int]) -> int:
        return sum(1 for v in in_triangle if v not in covered) // 3

    def extend(chosen: list[int], covered: set[int]) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        if len(chosen) + live_bound(covered) <= len(best):
            return
        pivot = None
        for v in in_triangle:
            if v in covered:
                continue
            if any(
                not covered.intersection(tris[i]) for i in tri_at[v]
            ):
                pivot = v
                break
        if pivot is None:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        for i in tri_at[pivot]:
            t = tris[i]
            if covered.intersection(t):
                continue
            chosen.append(i)
            extend(chosen, covered | set(t))
            chosen.pop()
        extend(chosen, covered | {pivot})

    status = "exact"
    try:
        extend([], set())
    except _Budget:
        status = "bracket"
    size = len(best)
    upper = size if status == "exact" else min(len(in_triangle) // 3, len(tris))
    structural = None
    if v1 is not None:
        v1_set = frozenset(v1)
        v2_count = g.n - len(v1_set & set(range(g.n)))
        structural = (3 * v2_count // 2) // 3
        for i in best:
            assert (
                len(v1_set.intersection(tris[i])) <= 1
            ), "packed triangle meets the removed class twice"
    witness = tuple(tris[i] for i in sorted(best))
    return PackingResult(status, size, size, upper, nodes, structural, witness)


def prune_triangle_poor_edges(g: Graph, threshold: int) -> Graph:
    """Drop every edge lying on fewer than ``threshold`` triangles.

    Counts are taken on the input graph in a single pass; the operation is
    deliberately not iterated.

    Args:
        g: Host graph.
        threshold: Minimum triangle support an edge must have to survive.

    Returns:
        The pruned graph (the input itself when ``threshold`` is 0).
    """
    if threshold < 0:
        raise InputError(f"threshold must be nonnegative, got {threshold}")
    if threshold == 0 or g.edge_count == 0:
        return g
    a = g.matrix.astype(np.float64)
    paths2 = a @ a
    removed = [
        (u, v) for u, v in g.edges() if int(round(paths2[u, v])) < threshold
    ]
    return g.remove_edges(removed)


def complete_graph_v1_destroyed_fraction(n: int, gamma=0) -> Fraction:
    """Closed-form destroyed-triangle fraction at an attacked-class vertex
    of the complete graph.

    A class vertex keeps exactly the triangles whose other two corners
    avoid the class, so the destroyed fraction is
    ``1 - C(n - |v1|, 2) / C(n - 1, 2)``.
    """
    if n < 3:
        raise InputError(f"need at least 3 vertices, got {n}")
    size = attack_class_size(n, gamma)
    return 1 - Fraction(math.comb(n - size, 2), math.comb(n - 1, 2))


@dataclass(frozen=True)
class ExperimentChecks:
    """Per-seed measurement knobs for :func:`resilience_experiment`."""

    prune_eps: float = 0.05
    density_eps: float = 0.15
    density_vertices: int = 4
    density_subsets: int = 3
    packing_budget: int = 200_000
    packing_exact_max_n: int = 30
    retained_center: float = 4 / 9
    retained_band: float = 0.10
    destroyed_center: float = 5 / 9
    destroyed_band: float = 0.05


def _percentiles(values: np.ndarray) -> dict:
    if values.size == 0:
        return {}
    qs = (5, 25, 50, 75, 95)
    pct = np.percentile(values, qs)
    return {f"p{q}": float(x) for q, x in zip(qs, pct)}


def _class_aggregate(t_before, t_after, verts) -> float:
    idx = list(verts)
    denom = int(t_before[idx].sum())
    if denom == 0:
        return 1.0
    return float(t_after[idx].sum() / denom)


def _density_checks(
    graph: Graph, p: float, seed: int, checks: ExperimentChecks
) -> dict:
    """Sampled neighborhood edge-density tests.

    For sampled vertices ``v`` and subsets ``S`` of ``N(v)`` at or above the
    ``(2/3)np`` floor (including ``S = N(v)`` itself), checks
    ``e(S) <= (1 + eps) * C(|S|, 2) * p``.
    """
    n = graph.n
    rng = rng_for(seed, 67)
    floor = math.ceil((2 / 3) * n * p)
    passed = total = skipped = 0
    count = min(checks.density_vertices, n)
    verts = rng.choice(n, size=count, replace=False) if count else []
    for v in sorted(int(x) for x in verts):
        nbrs = sorted(graph.neighbors(v))
        subsets = [nbrs]
        for _ in range(checks.density_subsets):
            if len(nbrs) > floor:
                size = int(rng.integers(floor, len(nbrs) + 1))
                subsets.append(
                    sorted(int(i) for i in rng.choice(nbrs, size, replace=False))
                )
        for s in subsets:
            if len(s) < max(floor, 2):
                skipped += 1
                continue
            cap = (1 + checks.density_eps) * math.comb(len(s), 2) * p
            total += 1
            if edges_within(graph, s) <= cap:
                passed += 1
    return {"passed": passed, "total": total, "skipped": skipped}


def _experiment_one_seed(args) -> dict:
    n, p, gamma, seed, checks = args
    graph = gnp_generate(n, p, seed)
    attack = k3_attack(graph, gamma, seed)
    t_before = triangle_profile(graph)
    t_after = triangle_profile(attack.attacked)
    with np.errstate(invalid="ignore", divide="ignore"):
        retained = np.where(t_before > 0, t_after / np.maximum(t_before, 1), 1.0)
    destroyed = 1.0 - retained
    v1 = list(attack.v1)
    v2 = list(attack.v2)
    agg_v1 = _class_aggregate(t_before, t_after, v1)
    agg_v2 = _class_aggregate(t_before, t_after, v2)
    v1_destroyed = np.sort(destroyed[v1]) if v1 else np.zeros(0)
    prune_threshold = math.ceil(checks.prune_eps * n * p * p)
    pruned = prune_triangle_poor_edges(attack.attacked, prune_threshold)
    min_deg_after = (
        min(pruned.degree(v) for v in range(n)) if n else 0
    )
    record = {
        "seed": seed,
        "v1_size": len(v1),
        "removed_edges": attack.removed_edge_count,
        "min_retained": float(retained.min()) if n else 1.0,
        "mean_retained": float(retained.mean()) if n else 1.0,
        "class_retained_v1": agg_v1,
        "class_retained_v2": agg_v2,
        "min_class_retained": min(agg_v1, agg_v2),
        "v1_destroyed_median": float(np.median(v1_destroyed)) if v1 else 0.0,
        "destroyed_percentiles": _percentiles(destroyed),
        "prune_threshold": prune_threshold,
        "min_degree_after_prune": int(min_deg_after),
        "degree_reference": (2 / 3 + float(_gamma_fraction(gamma)) / 4) * n * p,
        "density": _density_checks(graph, p, seed, checks),
    }
    packing = {"structural_bound": (3 * len(v2) // 2) // 3}
    if n <= checks.packing_exact_max_n:
        res = max_triangle_packing(
            attack.attacked, v1=attack.v1, budget=checks.packing_budget
        )
        packing.update(
            status=res.status, size=res.size, lower=res.lower, upper=res.upper
        )
    record["packing"] = packing
    return record


def _summary(values: Sequence[float]) -> dict:
    if not values:
        return {}
    arr = np.asarray(values, dtype=np.float64)
    return {
        "mean": float(arr.mean()),
        "min": float(arr.min()),
        "max": float(arr.max()),
        "median": float(np.median(arr)),
    }


def resilience_experiment(
    n: int,
    p: float,
    gamma,
    seeds,
    checks: ExperimentChecks = ExperimentChecks(),
    jobs: int = 1,
) -> dict:
    """Seeded Monte Carlo sweep of the attack and its theory checkpoints.

    Args:
        n: Vertex count of each random host.
        p: Edge probability.
        gamma: Attack slack in ``[0, 1/2)``.
        seeds: Seed count (``int``) or explicit iterable of seeds.
        checks: Measurement knobs.
        jobs: Parallel workers across seeds (each seed single-threaded).

    Returns:
        A JSON-ready report ``{"params": ..., "per_seed": [...],
        "aggregates": ...}``.  Deterministic for fixed seeds and params.
    """
    _gamma_fraction(gamma)
    seed_list = list(range(seeds)) if isinstance(seeds, int) else [
        int(s) for s in seeds
    ]
    params = {
        "n": n,
        "p": p,
        "gamma": float(_gamma_fraction(gamma)),
        "seeds": seed_list,
        "checks": {
            "prune_eps": checks.prune_eps,
            "density_eps": checks.density_eps,
            "density_vertices": checks.density_vertices,
            "density_subsets": checks.density_subsets,
            "packing_budget": checks.packing_budget,
            "packing_exact_max_n": checks.packing_exact_max_n,
            "retained_center": checks.retained_center,
            "retained_band": checks.retained_band,
            "destroyed_center": checks.destroyed_center,
            "destroyed_band": checks.destroyed_band,
        },
    }
    tasks = [(n, p, gamma, s, checks) for s in seed_list]
    if jobs > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            per_seed = list(pool.map(_experiment_one_seed, tasks))
    else:
        per_seed = [_experiment_one_seed(t) for t in tasks]
    aggregates: dict = {}
    if per_seed:
        retained_vals = [r["min_class_retained"] for r in per_seed]
        destroyed_vals = [r["v1_destroyed_median"] for r in per_seed]
        within_ret = sum(
            1
            for x in retained_vals
            if abs(x - checks.retained_center) <= checks.retained_band
        )
        within_dst = sum(
            1
            for x in destroyed_vals
            if abs(x - checks.destroyed_center) <= checks.destroyed_band
        )
        density_totals = sum(r["density"]["total"] for r in per_seed)
        density_passed = sum(r["density"]["passed"] for r in per_seed)
        aggregates = {
            "min_class_retained": _summary(retained_vals),
            "v1_destroyed_median": _summary(destroyed_vals),
            "min_retained": _summary([r["min_retained"] for r in per_seed]),
            "min_degree_after_prune": _summary(
                [r["min_degree_after_prune"] for r in per_seed]
            ),
            "seeds_within_retained_band": within_ret,
            "seeds_within_destroyed_band": within_dst,
            "retained_band_fraction": within_ret / len(per_seed),
            "destroyed_band_fraction": within_dst / len(per_seed),
            "density_pass_fraction": (
                density_passed / density_totals if density_totals else 1.0
            ),
        }
    return {"params": params, "per_seed": per_seed, "aggregates": aggregates}


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, Mapping):
        for k in obj:
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, (list, tuple)):
        out[prefix] = " ".join(str(v) for v in obj)
    else:
        out[prefix] = obj


def experiment_report_to_csv(report: dict) -> str:
    """Flatten a resilience report to CSV, one row per seed.

    Params are repeated on every row under ``param.*`` columns; nested
    per-seed values become dotted column names.
    """
    params: dict = {}
    _flatten("param", report.get("params", {}), params)
    rows = []
    for rec in report.get("per_seed", []):
        row = dict(params)
        _flatten("", rec, row)
        rows.append(row)
    header: list[str] = []
    for row in rows:
        for key in row:
            if key not in header:
                header.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
