"""Absorbing structures: per-vertex units, completion, chaining, traversal.

An *absorber* for a set ``X`` is a structure whose body contains ``X`` and
which, for every subset ``X'`` of ``X``, carries a square path between the
same fixed ordered endpoint pairs spanning every body vertex except ``X'``.
It is assembled from one *unit* per absorbee — a five-vertex star core
threaded onto a backbone, with square-path junctions between backbone blocks
— and square-path links between consecutive units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .connector import ConnectionRequest, ConnectResult, connect_one
from .gadgets import (
    BACKBONE,
    Embedding,
    SlotToken,
    absorber_traversal,
    backbone_label,
    build_gadget,
    is_square_path,
    validate_embedding,
)
from .graphcore import Graph, InputError, rng_for
from .matching import BipartiteInstance, hall_saturating_matching


@dataclass(frozen=True)
class StarRecord:
    """Five-vertex core: the square path ``u1, u2, x, v1, v2`` in the host."""

    x: int
    u1: int
    u2: int
    v1: int
    v2: int

    def core_sequence(self) -> tuple[int, int, int, int, int]:
        return (self.u1, self.u2, self.x, self.v1, self.v2)


@dataclass(frozen=True)
class AbsorberConfig:
    """Construction knobs for absorber completion and chaining.

    ``blocks`` is the backbone block count per unit; junctions and links are
    tried at the direct length first, then at the fallback length through the
    auxiliary reservoir.
    """

    blocks: int = 4
    junction_length: int = 4
    junction_fallback_length: int = 8
    link_length: int = 4
    link_fallback_length: int = 8
    unit_retries: int = 8
    link_retries: int = 8
    connect_retries: int = 2
    seed: int = 0


@dataclass(frozen=True)
class AbsorberUnit:
    """One absorbee's structure: star core, backbone, junction interiors."""

    star: StarRecord
    backbone: Embedding
    junctions: tuple[tuple[int, ...], ...]

    @property
    def x(self) -> int:
        return self.star.x

    @property
    def blocks(self) -> int:
        return self.backbone.gadget.params[0]

    def slot(self, i: int, j: int) -> int:
        return self.backbone.vertices[backbone_label(i, j, self.blocks)]

    @property
    def entry(self) -> tuple[int, int]:
        return (self.slot(1, 1), self.slot(1, 2))

    @property
    def exit(self) -> tuple[int, int]:
        return (self.slot(self.blocks, 3), self.slot(self.blocks, 4))

    def vertex_set(self) -> frozenset[int]:
        verts = set(self.backbone.vertices)
        verts.add(self.x)
        for interior in self.junctions:
            verts.update(interior)
        return frozenset(verts)

    def traversal(self, mode: str) -> tuple[int, ...]:
        tokens = absorber_traversal(self.blocks, self.junctions, self.x, mode)
        out = []
        for tok in tokens:
            if isinstance(tok, SlotToken):
                out.append(self.slot(tok.block, tok.slot))
            else:
                out.append(tok)
        return tuple(out)


@dataclass(frozen=True)
class Absorber:
    """A chained family of units with one fixed entry and exit.

    ``links[i]`` is the interior of the square path joining unit ``i`` to
    unit ``i + 1`` (possibly empty).
    """

    units: tuple[AbsorberUnit, ...]
    links: tuple[tuple[int, ...], ...]

    @property
    def absorbees(self) -> tuple[int, ...]:
        return tuple(u.x for u in self.units)

    @property
    def entry(self) -> tuple[int, int]:
        return self.units[0].entry

    @property
    def exit(self) -> tuple[int, int]:
        return self.units[-1].exit

    def body(self) -> frozenset[int]:
        """Every vertex of the structure, absorbees included."""
        verts: set[int] = set()
        for u in self.units:
            verts |= u.vertex_set()
        for interior in self.links:
            verts.update(interior)
        return frozenset(verts)

    def interior_body(self) -> frozenset[int]:
        return self.body() - set(self.absorbees)


@dataclass(frozen=True)
class BuildFailure:
    """Why a construction stage could not finish (diagnostics are nonempty)."""

    stage: str
    diagnostics: dict


def build_single_absorbers(
    g: Graph,
    x_set: Iterable[int],
    w1: Sequence[int],
    w2: Sequence[int],
    w3: Sequence[int],
    w4: Sequence[int],
) -> tuple[tuple[StarRecord, ...] | None, BuildFailure | None]:
    """Assign each absorbee a disjoint five-vertex star core by Hall rounds.

    Four saturating matchings run in sequence: ``u1`` from ``w1`` adjacent to
    ``x``; ``u2`` from ``w2`` adjacent to ``x`` and ``u1``; ``v1`` from ``w3``
    adjacent to ``x`` and ``u2``; ``v2`` from ``w4`` adjacent to ``x`` and
    ``v1``.  A deficient round aborts with the violating absorbee set.
    """
    xs = tuple(sorted(set(x_set)))
    pools = [tuple(sorted(set(side))) for side in (w1, w2, w3, w4)]
    all_sides = [set(xs)] + [set(side) for side in pools]
    for i in range(len(all_sides)):
        for j in range(i + 1, len(all_sides)):
            if all_sides[i] & all_sides[j]:
                raise InputError("absorbee set and star classes must be disjoint")
    chosen: list[list[int]] = [[] for _ in xs]
    anchors = list(xs)
    for round_no, pool in enumerate(pools):
        index = {v: k for k, v in enumerate(pool)}
        rows = []
        for i, x in enumerate(xs):
            allowed = g.neighbors(x)
            if round_no > 0:
                allowed = allowed & g.neighbors(anchors[i])
            rows.append(tuple(sorted(index[v] for v in allowed if v in index)))
        res = hall_saturating_matching(BipartiteInstance(tuple(rows), len(pool)))
        if res.status != "matched":
            return None, BuildFailure(
                "absorber",
                {
                    "round": round_no + 1,
                    "violating_absorbees": [xs[i] for i in res.violator],
                    "joint_neighborhood": len(res.neighborhood),
                },
            )
        for i in range(len(xs)):
            v = pool[res.pairs[i]]
            chosen[i].append(v)
            anchors[i] = v
    records = tuple(
        StarRecord(x, c[0], c[1], c[2], c[3]) for x, c in zip(xs, chosen)
    )
    for rec in records:
        check = is_square_path(g, rec.core_sequence())
        if not check.ok:
            raise AssertionError(f"star core invalid for {rec}: {check.reason}")
    return records, None


def _connect_with_fallback(
    g: Graph,
    frm: tuple[int, int],
    to: tuple[int, int],
    direct_length: int,
    fallback_length: int,
    reservoir: Sequence[int],
    exclude: set[int],
    seed: int,
    retries: int,
) -> ConnectResult:
    """Shortest connection first, lengthening one vertex at a time.

    Sweeping every length between the direct and fallback targets keeps
    reservoir consumption minimal: most jobs close with zero or one interior
    vertex, so the reservoir survives many jobs.
    """
    last: ConnectResult | None = None
    for length in range(direct_length, fallback_length + 1):
        attempts = 1 if length - 4 <= 4 else max(1, retries)
        for attempt in range(attempts):
            req = ConnectionRequest(
                pairs=((frm, to),), w=tuple(reservoir), b=1, length=length
            )
            last = connect_one(g, req, exclude, seed * 31 + attempt)
            if last.ok:
                return last
    assert last is not None
    return last


def complete_absorbers(
    g: Graph,
    records: Sequence[StarRecord],
    w5: Sequence[int],
    w6: Sequence[int],
    config: AbsorberConfig,
) -> tuple[tuple[Absorber, ...] | None, BuildFailure | None]:
    """Thread each star core onto a backbone and wire its block junctions.

    The backbone of each unit is grown through ``w5`` (its first block being
    the star core), junction interiors through ``w6``.  A unit that cannot be
    wired retries with a fresh backbone cut up to ``config.unit_retries``
    times; reservoir vertices are retired as units succeed.  Each record
    yields a single-vertex absorber.
    """
    if config.blocks < 2:
        raise InputError(f"absorber units need at least 2 blocks, got {config.blocks}")
    singles: list[Absorber] = []
    used: set[int] = set()
    for uidx, rec in enumerate(records):
        unit = None
        last_diag: dict = {}
        for attempt in range(max(1, config.unit_retries)):
            base = config.seed * 100_003 + uidx * 1_009 + attempt * 17
            req = ConnectionRequest(
                pairs=(((rec.u2, rec.u1), (rec.v2, rec.v1)),),
                w=tuple(w5),
                b=2,
                length=4 * config.blocks,
            )
            res = connect_one(g, req, used, base)
            if not res.ok:
                last_diag = {"phase": "backbone", "connect": res.diagnostics}
                continue
            backbone = res.embedding
            taken = set(backbone.vertex_set())
            interiors: list[tuple[int, ...]] = []
            wired = True
            for i in range(1, config.blocks):
                lab = lambda a, c: backbone.vertices[  # noqa: E731
                    backbone_label(a, c, config.blocks)
                ]
                frm = (lab(i, 3), lab(i, 4))
                to = (lab(i + 1, 1), lab(i + 1, 2))
                jres = _connect_with_fallback(
                    g,
                    frm,
                    to,
                    config.junction_length,
                    config.junction_fallback_length,
                    w6,
                    used | taken | {rec.x},
                    base + 7 * i,
                    config.connect_retries,
                )
                if not jres.ok:
                    wired = False
                    last_diag = {
                        "phase": f"junction-{i}",
                        "connect": jres.diagnostics,
                    }
                    break
                interior = tuple(
                    v
                    for v in jres.embedding.vertices
                    if v not in (*frm, *to)
                )
                interiors.append(interior)
                taken |= set(interior)
            if not wired:
                continue
            unit = AbsorberUnit(rec, backbone, tuple(interiors))
            _audit_unit(g, unit)
            used |= set(unit.vertex_set())
            break
        if unit is None:
            return None, BuildFailure(
                "connecting",
                {
                    "absorbee": rec.x,
                    "attempts": max(1, config.unit_retries),
                    **last_diag,
                },
            )
        singles.append(Absorber((unit,), ()))
    return tuple(singles), None


def _audit_unit(g: Graph, unit: AbsorberUnit) -> None:
    for mode in ("include", "exclude"):
        seq = unit.traversal(mode)
        check = is_square_path(g, seq)
        if not check.ok:
            raise AssertionError(
                f"unit traversal ({mode}) for absorbee {unit.x} invalid: "
                f"{check.reason}"
            )
        want = set(unit.vertex_set())
        if mode == "exclude":
            want.discard(unit.x)
        if set(seq) != want:
            raise AssertionError(
                f"unit traversal ({mode}) does not span the unit"
            )
        if seq[:2] != unit.entry or seq[-2:] != unit.exit:
            raise AssertionError("unit traversal endpoints drifted")


def chain_absorbers(
    g: Graph,
    absorbers: Sequence[Absorber],
    w7: Sequence[int],
    config: AbsorberConfig,
) -> tuple[Absorber | None, BuildFailure | None]:
    """Join absorbers in order with square-path links into one absorber.

    Each link connects an absorber's exit pair to the next one's entry pair,
    directly when the three required host edges exist, otherwise through the
    ``w7`` reservoir.  A single absorber is returned unchanged.
    """
    if not absorbers:
        raise InputError("an absorber needs at least one unit")
    if len(absorbers) == 1:
        return absorbers[0], None
    body: set[int] = set()
    for a in absorbers:
        more = a.body()
        if body & more:
            raise InputError("absorbers to chain must be pairwise disjoint")
        body |= more
    units: list[AbsorberUnit] = []
    links: list[tuple[int, ...]] = []
    used: set[int] = set()
    for i, a in enumerate(absorbers):
        units.extend(a.units)
        links.extend(a.links)
        if i == len(absorbers) - 1:
            break
        frm = a.exit
        to = absorbers[i + 1].entry
        res = _connect_with_fallback(
            g,
            frm,
            to,
            config.link_length,
            config.link_fallback_length,
            w7,
            used | body,
            config.seed * 9_176 + i * 13,
            config.link_retries,
        )
        if not res.ok:
            return None, BuildFailure(
                "connecting",
                {
                    "link": (a.absorbees[-1], absorbers[i + 1].absorbees[0]),
                    "connect": res.diagnostics,
                },
            )
        interior = tuple(
            v for v in res.embedding.vertices if v not in (*frm, *to)
        )
        links.append(interior)
        used |= set(interior)
    absorber = Absorber(tuple(units), tuple(links))
    return absorber, None


def absorb(a: Absorber, x_prime: Iterable[int]) -> tuple[int, ...]:
    """The traversal that leaves out exactly the absorbees in ``x_prime``.

    Args:
        a: The absorber.
        x_prime: Absorbees to skip; must be a subset of ``a.absorbees``.

    Returns:
        A vertex sequence with the absorber's fixed entry and exit pairs
        whose vertex set is the whole body minus ``x_prime``.
    """
    skip = set(x_prime)
    unknown = skip - set(a.absorbees)
    if unknown:
        raise InputError(f"not absorbees of this structure: {sorted(unknown)}")
    out: list[int] = []
    for i, unit in enumerate(a.units):
        mode = "exclude" if unit.x in skip else "include"
        out.extend(unit.traversal(mode))
        if i < len(a.links):
            out.extend(a.links[i])
    return tuple(out)


@dataclass(frozen=True)
class AbsorberVerification:
    """Result of driving an absorber through subset traversals."""

    ok: bool
    mode: str
    subsets_checked: int
    failure: dict | None


def verify_absorber(
    g: Graph,
    a: Absorber,
    mode: str = "exhaustive",
    samples: int = 64,
    seed: int = 0,
) -> AbsorberVerification:
    """Drive the absorber over absorbee subsets and check every traversal.

    ``exhaustive`` tries all ``2^|X|`` subsets and requires ``|X| <= 20``;
    ``sampled`` tries ``samples`` random subsets plus the empty and full sets.
    Each traversal must be a square path in ``g`` with the fixed entry and
    exit pairs, spanning the body minus exactly the chosen subset.
    """
    absorbees = a.absorbees
    if mode == "exhaustive":
        if len(absorbees) > 20:
            raise InputError(
                f"exhaustive verification caps at 20 absorbees, got {len(absorbees)}"
            )
        subsets: Iterable[tuple[int, ...]] = (
            tuple(v for k, v in enumerate(absorbees) if mask >> k & 1)
            for mask in range(1 << len(absorbees))
        )
        total = 1 << len(absorbees)
    elif mode == "sampled":
        rng = rng_for(seed, 23)
        picks = [(), tuple(absorbees)]
        for _ in range(max(0, samples)):
            mask = rng.integers(0, 1 << len(absorbees))
            picks.append(tuple(v for k, v in enumerate(absorbees) if mask >> k & 1))
        subsets = picks
        total = len(picks)
    else:
        raise InputError(f"mode must be exhaustive or sampled, got {mode!r}")

    body = a.body()
    checked = 0
    for sub in subsets:
        seq = absorb(a, sub)
        check = is_square_path(g, seq)
        if not check.ok:
            return AbsorberVerification(
                False, mode, checked, {"subset": sub, "reason": check.reason}
            )
        if set(seq) != body - set(sub):
            return AbsorberVerification(
                False, mode, checked, {"subset": sub, "reason": "wrong span"}
            )
        if seq[:2] != a.entry or seq[-2:] != a.exit:
            return AbsorberVerification(
                False, mode, checked, {"subset": sub, "reason": "endpoints moved"}
            )
        checked += 1
    if checked != total:
        raise AssertionError("subset enumeration drifted")
    return AbsorberVerification(True, mode, checked, None)


# -- serialization ------------------------------------------------------------


def absorber_to_json_obj(a: Absorber) -> dict:
    """JSON-ready description of an absorber (round-trips via ``from``)."""
    return {
        "units": [
            {
                "x": u.star.x,
                "star": [u.star.u1, u.star.u2, u.star.v1, u.star.v2],
                "blocks": u.blocks,
                "backbone": list(u.backbone.vertices),
                "junctions": [list(j) for j in u.junctions],
            }
            for u in a.units
        ],
        "links": [list(l) for l in a.links],
    }


def absorber_from_json_obj(obj: Mapping) -> Absorber:
    try:
        units = []
        for entry in obj["units"]:
            star = StarRecord(
                int(entry["x"]),
                *(int(v) for v in entry["star"]),
            )
            blocks = int(entry["blocks"])
            backbone = Embedding(
                build_gadget(BACKBONE, blocks=blocks),
                tuple(int(v) for v in entry["backbone"]),
            )
            junctions = tuple(
                tuple(int(v) for v in j) for j in entry["junctions"]
            )
            units.append(AbsorberUnit(star, backbone, junctions))
        links = tuple(tuple(int(v) for v in l) for l in obj["links"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed absorber description: {exc}") from exc
    return Absorber(tuple(units), links)
