"""Gadget templates and their composition rules.

A *gadget* is a small labeled graph template together with two ordered
two-vertex ports.  Embedding a gadget into a host graph realizes a structure
that can be concatenated with others through its ports:

* ``square-path``: the square of a path on ``length`` labels; every pair of
  labels at distance at most two along the path is an edge.
* ``pseudo-path``: a square path whose odd-position back-edges skip ``b``
  positions instead of one.  With ``b == 1`` this is exactly the square path;
  with ``b == 2`` two of them can interleave into a backbone.
* ``backbone``: ``blocks`` four-vertex blocks wired so that the structure can
  be traversed by square paths in two ways — one visiting an attached special
  vertex, one avoiding it — with identical endpoints.

All labels are integers ``0..k-1``.  Ports are ordered pairs of labels; the
port orientation is what makes concatenation sound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, TypeVar

from .graphcore import Graph, InputError

SQUARE_PATH = "square-path"
PSEUDO_PATH = "pseudo-path"
BACKBONE = "backbone"

T = TypeVar("T")


class CompositionError(ValueError):
    """Raised when gadgets cannot be composed as requested."""


@dataclass(frozen=True)
class Gadget:
    """A labeled template graph with ordered entry and exit ports.

    Attributes:
        kind: One of ``square-path``, ``pseudo-path``, ``backbone``.
        labels: Number of labels; labels are ``0..labels-1``.
        edges: Sorted tuple of label pairs ``(i, j)`` with ``i < j``.
        port_from: Ordered entry port (pair of labels).
        port_to: Ordered exit port (pair of labels).
        params: Kind-specific parameters (see :func:`build_gadget`).
    """

    kind: str
    labels: int
    edges: tuple[tuple[int, int], ...]
    port_from: tuple[int, int]
    port_to: tuple[int, int]
    params: tuple[int, ...]

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)


def _norm(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def interleave_offset(k: int, b: int) -> int:
    """Back-edge target for the label at 1-indexed position ``k + 1``.

    Even positions always reach back one step; odd positions reach back ``b``
    steps.  With ``b == 1`` this is the plain square-path rule.
    """
    return k - 1 if k % 2 == 0 else k - b


def build_gadget(
    kind: str,
    *,
    length: int | None = None,
    b: int | None = None,
    blocks: int | None = None,
) -> Gadget:
    """Construct a gadget template.

    Args:
        kind: ``square-path`` (requires ``length >= 2``), ``pseudo-path``
            (requires ``length >= 2`` and ``b`` in ``{1, 2}``), or
            ``backbone`` (requires ``blocks >= 2``).

    Returns:
        The template with its canonical ports.

    Raises:
        InputError: On an unknown kind or out-of-range parameters.
    """
    if kind == SQUARE_PATH:
        if length is None or length < 2:
            raise InputError(f"square-path needs length >= 2, got {length}")
        edges = sorted(
            _norm(i, j)
            for i in range(length)
            for j in (i + 1, i + 2)
            if j < length
        )
        return Gadget(
            kind=SQUARE_PATH,
            labels=length,
            edges=tuple(edges),
            port_from=(0, 1),
            port_to=(length - 2, length - 1),
            params=(length,),
        )
    if kind == PSEUDO_PATH:
        if length is None or length < 2:
            raise InputError(f"pseudo-path needs length >= 2, got {length}")
        if b not in (1, 2):
            raise InputError(f"pseudo-path skip width must be 1 or 2, got {b}")
        # 1-indexed construction: {u1,u2}, then each new u_i hangs on u_{i-1}
        # and on u_{interleave_offset(i-1)}.
        pairs: set[tuple[int, int]] = {(0, 1)}
        for i in range(3, length + 1):
            pairs.add(_norm(i - 2, i - 1))
            back = interleave_offset(i - 1, b)
            if back < 1:
                raise InputError(
                    f"pseudo-path with b={b} undefined at length {length}"
                )
            pairs.add(_norm(back - 1, i - 1))
        return Gadget(
            kind=PSEUDO_PATH,
            labels=length,
            edges=tuple(sorted(pairs)),
            port_from=(0, 1),
            port_to=(length - 2, length - 1),
            params=(b, length),
        )
    if kind == BACKBONE:
        if blocks is None or blocks < 2:
            raise InputError(f"backbone needs blocks >= 2, got {blocks}")
        return _build_backbone(blocks)
    raise InputError(f"unknown gadget kind {kind!r}")


def backbone_label(i: int, j: int, blocks: int) -> int:
    """Label index of slot ``j`` (1..4) in block ``i`` (1..blocks)."""
    if not (1 <= i <= blocks and 1 <= j <= 4):
        raise InputError(f"block slot ({i}, {j}) out of range for {blocks} blocks")
    return (i - 1) * 4 + (j - 1)


def _quad_edges(a1: int, a2: int, b1: int, b2: int) -> list[tuple[int, int]]:
    """Edges of the square path on the four-label sequence (a1, a2, b1, b2)."""
    return [
        _norm(a1, a2),
        _norm(a2, b1),
        _norm(b1, b2),
        _norm(a1, b1),
        _norm(a2, b2),
    ]


def _build_backbone(blocks: int) -> Gadget:
    w = lambda i, j: backbone_label(i, j, blocks)  # noqa: E731
    pairs: set[tuple[int, int]] = set()
    # First block carries both ports as plain edges.
    pairs.add(_norm(w(1, 1), w(1, 2)))
    pairs.add(_norm(w(1, 3), w(1, 4)))
    # Every later block is internally a square path on its four slots.
    for i in range(2, blocks + 1):
        pairs.update(_quad_edges(w(i, 1), w(i, 2), w(i, 3), w(i, 4)))
    # Entry side of the first block hooks into the second block.
    pairs.update(_quad_edges(w(1, 1), w(1, 2), w(2, 2), w(2, 1)))
    # Exit halves hook two blocks ahead.
    for i in range(1, blocks - 1):
        pairs.update(_quad_edges(w(i, 4), w(i, 3), w(i + 2, 2), w(i + 2, 1)))
    # The final two blocks close off the far end.
    pairs.update(
        _quad_edges(w(blocks - 1, 4), w(blocks - 1, 3), w(blocks, 3), w(blocks, 4))
    )
    edges = tuple(sorted(pairs))
    if len(edges) != 8 * blocks - 3:
        raise AssertionError(
            f"backbone on {blocks} blocks built {len(edges)} edges, "
            f"expected {8 * blocks - 3}"
        )
    return Gadget(
        kind=BACKBONE,
        labels=4 * blocks,
        edges=edges,
        port_from=(w(1, 2), w(1, 1)),
        port_to=(w(1, 4), w(1, 3)),
        params=(blocks,),
    )


# -- embeddings --------------------------------------------------------------


@dataclass(frozen=True)
class Embedding:
    """An assignment of gadget labels to host-graph vertices.

    ``vertices[i]`` is the host vertex playing label ``i``.
    """

    gadget: Gadget
    vertices: tuple[int, ...]

    def image_of(self, label: int) -> int:
        return self.vertices[label]

    @property
    def port_from_image(self) -> tuple[int, int]:
        a, b = self.gadget.port_from
        return (self.vertices[a], self.vertices[b])

    @property
    def port_to_image(self) -> tuple[int, int]:
        a, b = self.gadget.port_to
        return (self.vertices[a], self.vertices[b])

    def edge_images(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            sorted(_norm(self.vertices[i], self.vertices[j]) for i, j in self.gadget.edges)
        )

    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of an embedding check; ``reason`` explains the first failure."""

    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_embedding(
    g: Graph,
    emb: Embedding,
    connect_from: tuple[int, int] | None = None,
    connect_to: tuple[int, int] | None = None,
) -> ValidationResult:
    """Check that an embedding realizes its gadget inside a host graph.

    Verifies the label count, injectivity, vertex range, presence of every
    template edge in the host, and — when given — exact ordered agreement of
    the port images with ``connect_from`` / ``connect_to``.
    """
    gad = emb.gadget
    if len(emb.vertices) != gad.labels:
        return ValidationResult(
            False,
            f"embedding has {len(emb.vertices)} vertices for {gad.labels} labels",
        )
    if len(set(emb.vertices)) != len(emb.vertices):
        return ValidationResult(False, "embedding is not injective")
    for v in emb.vertices:
        if not (0 <= v < g.n):
            return ValidationResult(False, f"vertex {v} outside host range")
    for i, j in gad.edges:
        u, v = emb.vertices[i], emb.vertices[j]
        if not g.has_edge(u, v):
            return ValidationResult(
                False,
                f"template edge ({i}, {j}) maps to missing host edge ({u}, {v})",
            )
    if connect_from is not None and emb.port_from_image != tuple(connect_from):
        return ValidationResult(
            False,
            f"entry port maps to {emb.port_from_image}, expected {tuple(connect_from)}",
        )
    if connect_to is not None and emb.port_to_image != tuple(connect_to):
        return ValidationResult(
            False,
            f"exit port maps to {emb.port_to_image}, expected {tuple(connect_to)}",
        )
    return ValidationResult(True, None)


# -- sequence helpers --------------------------------------------------------


def square_path_pairs(seq: Sequence[int]) -> tuple[tuple[int, int], ...]:
    """All pairs of sequence entries at positional distance one or two."""
    out = []
    for i in range(len(seq)):
        for j in (i + 1, i + 2):
            if j < len(seq):
                out.append(_norm(seq[i], seq[j]))
    return tuple(out)


def is_square_path(g: Graph, seq: Sequence[int]) -> ValidationResult:
    """Whether ``seq`` traces the square of a path in ``g``."""
    if len(set(seq)) != len(seq):
        return ValidationResult(False, "sequence repeats a vertex")
    for u, v in square_path_pairs(seq):
        if not g.has_edge(u, v):
            return ValidationResult(False, f"missing edge ({u}, {v})")
    return ValidationResult(True, None)


def is_square_cycle(g: Graph, order: Sequence[int]) -> ValidationResult:
    """Whether ``order`` traces the square of a cycle in ``g`` (cyclically)."""
    n = len(order)
    if len(set(order)) != n:
        return ValidationResult(False, "order repeats a vertex")
    for i in range(n):
        for d in (1, 2):
            u, v = order[i], order[(i + d) % n]
            if u == v:
                continue
            if not g.has_edge(u, v):
                return ValidationResult(False, f"missing edge ({u}, {v})")
    return ValidationResult(True, None)


def reverse_square_path(emb: Embedding) -> Embedding:
    """The same square path walked backwards (ports swap and reverse)."""
    if emb.gadget.kind != SQUARE_PATH:
        raise CompositionError("only square paths are reversible")
    return Embedding(emb.gadget, tuple(reversed(emb.vertices)))


# -- composition -------------------------------------------------------------


def join_square_paths(p1: Embedding, p2: Embedding) -> Embedding:
    """Concatenate two square paths that overlap in one ordered port pair.

    ``p1``'s exit port must equal ``p2``'s entry port (same ordered vertices),
    and the two paths must share exactly those two vertices.  The result walks
    ``p1`` and then the rest of ``p2``.
    """
    if p1.gadget.kind != SQUARE_PATH or p2.gadget.kind != SQUARE_PATH:
        raise CompositionError("join_square_paths expects two square paths")
    if p1.port_to_image != p2.port_from_image:
        raise CompositionError(
            f"exit port {p1.port_to_image} does not meet entry port "
            f"{p2.port_from_image}"
        )
    shared = p1.vertex_set() & p2.vertex_set()
    if shared != set(p1.port_to_image):
        raise CompositionError(
            f"paths share {sorted(shared)}, expected exactly the joint port"
        )
    merged = p1.vertices + p2.vertices[2:]
    return Embedding(build_gadget(SQUARE_PATH, length=len(merged)), merged)


def join_pseudo_paths_to_backbone(blue: Embedding, red: Embedding) -> Embedding:
    """Interleave two width-2 pseudo-paths sharing an ordered end pair.

    Requirements: both gadgets are pseudo-paths with ``b == 2``; the blue
    length is a multiple of four; blue and red lengths sum to ``2 (mod 4)``;
    the red path is at least two labels longer than the blue one; the two
    sequences end with the same ordered vertex pair and share exactly those
    two vertices.

    Returns:
        A backbone embedding on ``(len(blue) + len(red) - 2) / 4`` blocks.
        Its entry port is the reversed start pair of the blue path and its
        exit port is the reversed start pair of the red path.
    """
    for emb, name in ((blue, "blue"), (red, "red")):
        if emb.gadget.kind != PSEUDO_PATH or emb.gadget.params[0] != 2:
            raise CompositionError(f"{name} input must be a width-2 pseudo-path")
    l1, l2 = len(blue.vertices), len(red.vertices)
    if l1 % 4 != 0:
        raise CompositionError(f"blue length {l1} must be a multiple of 4")
    if (l1 + l2 - 2) % 4 != 0:
        raise CompositionError(
            f"lengths {l1} and {l2} do not tile a whole number of blocks"
        )
    if l2 < l1 + 2:
        raise CompositionError(
            f"red length {l2} must exceed blue length {l1} by at least 2"
        )
    if blue.vertices[-2:] != red.vertices[-2:]:
        raise CompositionError("paths must end with the same ordered pair")
    shared = blue.vertex_set() & red.vertex_set()
    if shared != set(blue.vertices[-2:]):
        raise CompositionError("paths must share exactly their final pair")

    k = l1 // 4
    blocks = (l1 + l2 - 2) // 4
    gadget = build_gadget(BACKBONE, blocks=blocks)
    assign: dict[int, int] = {}

    def put(i: int, j: int, vertex: int) -> None:
        lab = backbone_label(i, j, blocks)
        if lab in assign and assign[lab] != vertex:
            raise CompositionError(
                f"slot ({i}, {j}) assigned twice with different vertices"
            )
        assign[lab] = vertex

    # Blue walk: entry half of block 1, whole even blocks upward, then the
    # near half of block 2k.
    blue_slots: list[tuple[int, int]] = [(1, 2), (1, 1)]
    for j in range(2, 2 * k - 1, 2):
        blue_slots += [(j, 2), (j, 1), (j, 3), (j, 4)]
    blue_slots += [(2 * k, 2), (2 * k, 1)]
    # Red walk: exit half of block 1, odd blocks upward, the top block if it
    # is even-indexed, then even blocks downward until meeting the blue walk.
    red_slots: list[tuple[int, int]] = [(1, 3), (1, 4)]
    top_odd = blocks if blocks % 2 == 1 else blocks - 1
    for j in range(3, top_odd + 1, 2):
        red_slots += [(j, 2), (j, 1), (j, 3), (j, 4)]
    if blocks % 2 == 0:
        red_slots += [(blocks, 3), (blocks, 4), (blocks, 2), (blocks, 1)]
        start_even = blocks - 2
    else:
        start_even = blocks - 1
    for j in range(start_even, 2 * k - 1, -2):
        red_slots += [(j, 3), (j, 4), (j, 2), (j, 1)]

    if len(blue_slots) != l1 or len(red_slots) != l2:
        raise AssertionError("tiling walks do not match the path lengths")
    for (i, j), vertex in zip(blue_slots, blue.vertices):
        put(i, j, vertex)
    for (i, j), vertex in zip(red_slots, red.vertices):
        put(i, j, vertex)
    if len(assign) != 4 * blocks:
        raise AssertionError("tiling walks did not cover every slot")

    vertices = tuple(assign[lab] for lab in range(4 * blocks))
    emb = Embedding(gadget, vertices)
    # Every backbone edge must be realized by one of the two walks.
    walk_edges = set(square_path_pairs_pseudo(blue)) | set(
        square_path_pairs_pseudo(red)
    )
    for i, j in gadget.edges:
        e = _norm(vertices[i], vertices[j])
        if e not in walk_edges:
            raise CompositionError(
                f"backbone edge ({i}, {j}) not realized by either walk"
            )
    return emb


def square_path_pairs_pseudo(emb: Embedding) -> tuple[tuple[int, int], ...]:
    """Host-edge images of a pseudo-path embedding."""
    return emb.edge_images()


# -- absorber traversal ------------------------------------------------------


@dataclass(frozen=True)
class SlotToken:
    """Symbolic reference to backbone slot ``(block, slot)`` in a traversal."""

    block: int
    slot: int


def absorber_traversal(
    blocks: int,
    connector_interiors: Sequence[Sequence[T]],
    x: T,
    mode: str,
) -> tuple[object, ...]:
    """Symbolic traversal order of an absorber unit.

    An absorber unit consists of a backbone on ``blocks`` blocks, a special
    vertex ``x`` attached to the first block, and ``blocks - 1`` connector
    paths whose interiors are given.  The two traversal modes walk every
    backbone slot and every connector interior, starting at slot ``(1, 1),
    (1, 2)`` and ending at ``(blocks, 3), (blocks, 4)``:

    * ``include`` passes through ``x`` right after the entry pair;
    * ``exclude`` covers the same ground while avoiding ``x``.

    Args:
        blocks: Backbone block count (at least 2).
        connector_interiors: Interior element sequences of the connectors
            between consecutive blocks (may be empty sequences).
        x: The special element, inserted verbatim by ``include``.
        mode: ``include`` or ``exclude``.

    Returns:
        A tuple mixing :class:`SlotToken` entries with connector elements
        (and ``x`` for ``include``).
    """
    if blocks < 2:
        raise InputError(f"absorber traversal needs blocks >= 2, got {blocks}")
    if len(connector_interiors) != blocks - 1:
        raise InputError(
            f"expected {blocks - 1} connector interiors, got {len(connector_interiors)}"
        )
    if mode not in ("include", "exclude"):
        raise InputError(f"mode must be include or exclude, got {mode!r}")
    w = SlotToken
    out: list[object] = []
    if mode == "include":
        out += [w(1, 1), w(1, 2), x, w(1, 3), w(1, 4)]
        for i in range(2, blocks + 1):
            out += list(connector_interiors[i - 2])
            out += [w(i, 1), w(i, 2), w(i, 3), w(i, 4)]
    else:
        out += [w(1, 1), w(1, 2), w(2, 2), w(2, 1)]
        out += list(reversed(list(connector_interiors[0])))
        out += [w(1, 4), w(1, 3)]
        for i in range(3, blocks + 1):
            out += [w(i, 2), w(i, 1)]
            out += list(reversed(list(connector_interiors[i - 2])))
            out += [w(i - 1, 4), w(i - 1, 3)]
        out += [w(blocks, 3), w(blocks, 4)]
    return tuple(out)
