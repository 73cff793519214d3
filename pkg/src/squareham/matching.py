"""Matching engines with failure certificates.

Three engines, all certifying:

* :func:`hall_saturating_matching` — bipartite matching that saturates the
  left side, or a deficient left set ``A'`` with ``|N(A')| < |A'|``.
* :func:`star_matching` — vertex-disjoint stars with ``r`` leaves centered at
  every left vertex, or a left set ``A'`` with ``|N(A')| < r |A'|``.
* :func:`haxell_matching` — a system of pairwise disjoint ``(r-1)``-sets, one
  chosen per left vertex from its candidate lists, or a budgeted search for a
  blocking pair ``(A', B')`` with ``|B'| <= (2r-3)|A'|`` such that every
  candidate of every vertex in ``A'`` meets ``B'``.

Left and right vertices are dense integers.  All engines are deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graphcore import InputError

_INF = float("inf")


@dataclass(frozen=True)
class BipartiteInstance:
    """Bipartite adjacency: ``adjacency[a]`` lists the right neighbors of ``a``."""

    adjacency: tuple[tuple[int, ...], ...]
    right_count: int

    def __post_init__(self) -> None:
        for a, row in enumerate(self.adjacency):
            for b in row:
                if not (0 <= b < self.right_count):
                    raise InputError(
                        f"right vertex {b} of left {a} out of range "
                        f"({self.right_count} right vertices)"
                    )

    @property
    def left_count(self) -> int:
        return len(self.adjacency)


@dataclass(frozen=True)
class MatchingResult:
    """Either a left-saturating matching or a Hall-deficiency certificate.

    When ``status == "matched"``, ``pairs[a]`` is the partner of left ``a``.
    When ``status == "deficient"``, ``violator`` is a left set whose combined
    neighborhood ``neighborhood`` is strictly smaller than itself.
    """

    status: str
    pairs: tuple[int, ...] | None
    violator: tuple[int, ...] | None
    neighborhood: tuple[int, ...] | None


def _hopcroft_karp(inst: BipartiteInstance) -> tuple[list[int], list[int]]:
    """Maximum matching; returns (match_left, match_right) with -1 for free."""
    nl, nr = inst.left_count, inst.right_count
    match_l = [-1] * nl
    match_r = [-1] * nr
    adj = inst.adjacency
    dist = [0.0] * nl

    def bfs() -> bool:
        q: deque[int] = deque()
        for a in range(nl):
            if match_l[a] == -1:
                dist[a] = 0.0
                q.append(a)
            else:
                dist[a] = _INF
        reachable_free = False
        while q:
            a = q.popleft()
            for b in adj[a]:
                nxt = match_r[b]
                if nxt == -1:
                    reachable_free = True
                elif dist[nxt] == _INF:
                    dist[nxt] = dist[a] + 1
                    q.append(nxt)
        return reachable_free

    # Phase DFS with an explicit stack to stay safe on large inputs.
    def dfs_iter(root: int) -> bool:
        stack: list[tuple[int, int]] = [(root, 0)]
        path: list[tuple[int, int]] = []  # (left, right) tentative pairs
        while stack:
            a, idx = stack.pop()
            row = adj[a]
            advanced = False
            while idx < len(row):
                b = row[idx]
                idx += 1
                nxt = match_r[b]
                if nxt == -1:
                    # Augment along the tentative path plus this edge.
                    match_l[a] = b
                    match_r[b] = a
                    for la, rb in reversed(path):
                        match_l[la] = rb
                        match_r[rb] = la
                    return True
                if dist[nxt] == dist[a] + 1:
                    stack.append((a, idx))
                    path.append((a, b))
                    stack.append((nxt, 0))
                    advanced = True
                    break
            if not advanced:
                dist[a] = _INF
                if path:
                    path.pop()
        return False

    while bfs():
        for a in range(nl):
            if match_l[a] == -1:
                dfs_iter(a)
    return match_l, match_r


def _deficiency_certificate(
    inst: BipartiteInstance, match_l: list[int], match_r: list[int]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Alternating-reachability certificate from the free left vertices.

    The left vertices reachable by alternating paths from any unmatched left
    vertex form a set whose neighborhood consists exactly of their matched
    partners, hence is strictly smaller.
    """
    nl = inst.left_count
    seen_l = [False] * nl
    seen_r = [False] * inst.right_count
    q: deque[int] = deque()
    for a in range(nl):
        if match_l[a] == -1:
            seen_l[a] = True
            q.append(a)
    while q:
        a = q.popleft()
        for b in inst.adjacency[a]:
            if not seen_r[b]:
                seen_r[b] = True
                nxt = match_r[b]
                if nxt != -1 and not seen_l[nxt]:
                    seen_l[nxt] = True
                    q.append(nxt)
    violator = tuple(a for a in range(nl) if seen_l[a])
    neighborhood = tuple(b for b in range(inst.right_count) if seen_r[b])
    if len(neighborhood) >= len(violator):
        raise AssertionError("deficiency certificate failed its own audit")
    return violator, neighborhood


def hall_saturating_matching(inst: BipartiteInstance) -> MatchingResult:
    """Left-saturating bipartite matching or a deficient-set certificate.

    Returns:
        ``MatchingResult`` with ``status`` ``"matched"`` (and one partner per
        left vertex) or ``"deficient"`` (and a witness set with
        ``|N(A')| < |A'|``).
    """
    match_l, match_r = _hopcroft_karp(inst)
    if all(b != -1 for b in match_l):
        return MatchingResult("matched", tuple(match_l), None, None)
    violator, neighborhood = _deficiency_certificate(inst, match_l, match_r)
    return MatchingResult("deficient", None, violator, neighborhood)


@dataclass(frozen=True)
class StarMatchingResult:
    """Either disjoint ``r``-leaf stars for all left vertices or a witness.

    ``stars[a]`` lists the ``r`` leaves of left vertex ``a``.  A deficient
    instance yields a left set with ``|N(A')| < r |A'|``.
    """

    status: str
    r: int
    stars: tuple[tuple[int, ...], ...] | None
    violator: tuple[int, ...] | None
    neighborhood: tuple[int, ...] | None


def star_matching(inst: BipartiteInstance, r: int) -> StarMatchingResult:
    """Vertex-disjoint ``r``-leaf stars saturating the left side.

    Reduces to bipartite matching by cloning each left vertex ``r`` times.
    The alternating-reachability set of the clone instance is closed under
    sibling clones, so a deficiency projects back to an original-left set
    ``A'`` with ``|N(A')| < r |A'|``.
    """
    if r < 1:
        raise InputError(f"star size must be positive, got {r}")
    blown = BipartiteInstance(
        tuple(row for row in inst.adjacency for _ in range(r)), inst.right_count
    )
    match_l, match_r = _hopcroft_karp(blown)
    if all(b != -1 for b in match_l):
        stars = tuple(
            tuple(sorted(match_l[a * r : (a + 1) * r])) for a in range(inst.left_count)
        )
        return StarMatchingResult("matched", r, stars, None, None)
    clone_violator, neighborhood = _deficiency_certificate(blown, match_l, match_r)
    originals = sorted({c // r for c in clone_violator})
    # Sibling closure: every clone of a reachable original is reachable.
    if len(clone_violator) != r * len(originals):
        raise AssertionError("clone violator is not closed under siblings")
    if len(neighborhood) >= r * len(originals):
        raise AssertionError("star deficiency certificate failed its own audit")
    return StarMatchingResult(
        "deficient", r, None, tuple(originals), tuple(neighborhood)
    )


# -- set-system matching -----------------------------------------------------


@dataclass(frozen=True)
class SetSystemInstance:
    """Each left vertex owns candidate sets of ``r - 1`` right vertices.

    ``candidates[a]`` is a tuple of sorted ``(r-1)``-tuples.  A matching picks
    one candidate per left vertex with all chosen sets pairwise disjoint.
    """

    candidates: tuple[tuple[tuple[int, ...], ...], ...]
    right_count: int
    r: int

    def __post_init__(self) -> None:
        if self.r < 2:
            raise InputError(f"set size parameter must be at least 2, got {self.r}")
        for a, sets in enumerate(self.candidates):
            for s in sets:
                if len(s) != self.r - 1 or len(set(s)) != len(s):
                    raise InputError(
                        f"candidate {s} of left {a} is not a {self.r - 1}-set"
                    )
                for b in s:
                    if not (0 <= b < self.right_count):
                        raise InputError(
                            f"right vertex {b} of left {a} out of range"
                        )

    @property
    def left_count(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class SetSystemResult:
    """Three-valued outcome of the set-system matching search.

    ``status`` is ``"matched"`` (with the chosen set per left vertex),
    ``"blocked"`` (with a pair ``(A', B')``, ``|B'| <= (2r-3)|A'|``, such that
    every candidate of every ``A'`` vertex meets ``B'``), or ``"unknown"``
    when the node budget ran out first.
    """

    status: str
    assignment: tuple[tuple[int, ...], ...] | None
    witness: tuple[tuple[int, ...], tuple[int, ...]] | None
    nodes_used: int


def haxell_matching(inst: SetSystemInstance, budget: int) -> SetSystemResult:
    """Search for a disjoint system of candidate sets, or a blocking witness.

    A backtracking search (most-constrained vertex first) looks for the
    matching; if it exhausts, a bounded hitting-set search looks for a
    blocking pair over growing left sets.  Both searches draw from the same
    node ``budget``; when it runs out, the result is ``"unknown"``.
    """
    if budget < 1:
        raise InputError(f"budget must be positive, got {budget}")
    nodes = [0]

    def spend() -> bool:
        nodes[0] += 1
        return nodes[0] <= budget

    nl = inst.left_count
    chosen: list[tuple[int, ...] | None] = [None] * nl
    used: set[int] = set()

    def search() -> bool | None:
        """True found, False exhausted, None budget out."""
        if not spend():
            return None
        todo = [a for a in range(nl) if chosen[a] is None]
        if not todo:
            return True
        # Most-constrained first keeps the tree small.
        def options(a: int) -> list[tuple[int, ...]]:
            return [s for s in inst.candidates[a] if not used.intersection(s)]

        a = min(todo, key=lambda v: len(options(v)))
        for s in options(a):
            chosen[a] = s
            used.update(s)
            res = search()
            if res:
                return True
            used.difference_update(s)
            chosen[a] = None
            if res is None:
                return None
        return False

    found = search()
    if found:
        assignment = tuple(chosen[a] for a in range(nl))  # type: ignore[misc]
        return SetSystemResult("matched", assignment, None, nodes[0])
    if found is None:
        return SetSystemResult("unknown", None, None, nodes[0])

    # No matching exists; hunt for a blocking pair.  Try left subsets in
    # order of increasing size, and for each run a depth-bounded hitting-set
    # branch over uncovered candidate sets.
    from itertools import combinations

    cap = lambda a_size: (2 * inst.r - 3) * a_size  # noqa: E731

    def hit(a_set: tuple[int, ...], b_set: set[int], depth_left: int) -> set[int] | None:
        if not spend():
            raise _BudgetOut()
        for a in a_set:
            for s in inst.candidates[a]:
                if not b_set.intersection(s):
                    if depth_left == 0:
                        return None
                    for v in s:
                        b_set.add(v)
                        got = hit(a_set, b_set, depth_left - 1)
                        if got is not None:
                            return got
                        b_set.remove(v)
                    return None
        return set(b_set)

    try:
        for size in range(1, nl + 1):
            for a_set in combinations(range(nl), size):
                got = hit(a_set, set(), cap(size))
                if got is not None:
                    witness = (tuple(a_set), tuple(sorted(got)))
                    _audit_blocking(inst, witness)
                    return SetSystemResult("blocked", None, witness, nodes[0])
    except _BudgetOut:
        return SetSystemResult("unknown", None, None, nodes[0])
    # A left vertex with no candidates at all blocks trivially; reaching here
    # without a witness means the bounded hunt failed within its caps.
    return SetSystemResult("unknown", None, None, nodes[0])


class _BudgetOut(Exception):
    pass


def _audit_blocking(
    inst: SetSystemInstance, witness: tuple[tuple[int, ...], tuple[int, ...]]
) -> None:
    a_set, b_set = witness
    if len(b_set) > (2 * inst.r - 3) * len(a_set):
        raise AssertionError("blocking witness exceeds its size cap")
    bs = set(b_set)
    for a in a_set:
        for s in inst.candidates[a]:
            if not bs.intersection(s):
                raise AssertionError("blocking witness misses a candidate set")
