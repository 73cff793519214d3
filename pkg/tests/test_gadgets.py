import itertools

import pytest
from hypothesis import given
from hypothesis.strategies import integers, lists, permutations

from squareham import (
    Embedding,
    Graph,
    InputError,
    build_gadget,
    complete_graph,
    is_square_cycle,
    is_square_path,
    validate_embedding,
)
from squareham.gadgets import (
    absorber_traversal,
    backbone_label,
    interleave_offset,
    join_pseudo_paths_to_backbone,
    join_square_paths,
    reverse_square_path,
    square_path_pairs,
)


def square_path_edge_oracle(length: int) -> set[tuple[int, int]]:
    """All label pairs at distance one or two along a path."""
    return {
        (i, j)
        for i in range(length)
        for j in range(i + 1, min(i + 3, length))
    }


def pseudo_path_edge_oracle(length: int) -> set[tuple[int, int]]:
    """Width-two lacing: consecutive edges plus alternating back edges.

    Every label from the third on reaches back two steps at even positions
    and three steps at odd positions.
    """
    edges = {(i, i + 1) for i in range(length - 1)}
    for m in range(2, length):
        edges.add((m - 2, m) if m % 2 == 0 else (m - 3, m))
    return edges


@given(integers(min_value=2, max_value=40))
def test_square_path_edge_set_matches_distance_two_oracle(length: int) -> None:
    gadget = build_gadget("square-path", length=length)
    assert set(gadget.edges) == square_path_edge_oracle(length)
    assert len(gadget.edges) == 2 * length - 3
    assert gadget.port_from == (0, 1)
    assert gadget.port_to == (length - 2, length - 1)


@given(integers(min_value=2, max_value=40))
def test_width_one_pseudo_path_is_the_square_path(length: int) -> None:
    plain = build_gadget("square-path", length=length)
    pseudo = build_gadget("pseudo-path", length=length, b=1)
    assert set(pseudo.edges) == set(plain.edges)
    assert pseudo.port_from == plain.port_from
    assert pseudo.port_to == plain.port_to


@given(integers(min_value=2, max_value=40))
def test_width_two_pseudo_path_matches_lacing_oracle(length: int) -> None:
    gadget = build_gadget("pseudo-path", length=length, b=2)
    assert set(gadget.edges) == pseudo_path_edge_oracle(length)
    assert len(gadget.edges) == 2 * length - 3


@given(integers(min_value=2, max_value=8))
def test_backbone_edge_count_and_ports(blocks: int) -> None:
    gadget = build_gadget("backbone", blocks=blocks)
    assert gadget.labels == 4 * blocks
    assert len(gadget.edges) == 8 * blocks - 3
    assert gadget.port_from == (1, 0)
    assert gadget.port_to == (3, 2)


@given(integers(min_value=2, max_value=8))
def test_backbone_label_is_a_bijection(blocks: int) -> None:
    seen = {
        backbone_label(i, j, blocks)
        for i in range(1, blocks + 1)
        for j in range(1, 5)
    }
    assert seen == set(range(4 * blocks))


def test_build_gadget_rejects_bad_parameters() -> None:
    with pytest.raises(InputError):
        build_gadget("no-such-kind", length=4)
    with pytest.raises(InputError):
        build_gadget("square-path", length=1)
    with pytest.raises(InputError):
        build_gadget("pseudo-path", length=6, b=3)
    with pytest.raises(InputError):
        build_gadget("backbone", blocks=1)
    with pytest.raises(InputError):
        build_gadget("square-path")


@given(permutations(list(range(7))))
def test_any_order_is_a_square_path_of_a_complete_graph(order: list[int]) -> None:
    g = complete_graph(7)
    assert is_square_path(g, order)
    assert is_square_cycle(g, order)


def test_square_path_membership_on_a_sparse_witness() -> None:
    length = 6
    edges = sorted(square_path_edge_oracle(length))
    g = Graph(length, edges)
    assert is_square_path(g, range(length))
    assert is_square_path(g, range(length - 1, -1, -1))
    assert not is_square_path(g, [0, 2, 1, 3, 4, 5])
    assert not is_square_cycle(g, range(length))


def test_square_cycle_membership_on_its_exact_edge_set() -> None:
    n = 8
    edges = {
        tuple(sorted((i, (i + d) % n))) for i in range(n) for d in (1, 2)
    }
    g = Graph(n, sorted(edges))
    assert is_square_cycle(g, range(n))
    assert is_square_cycle(g, [(i + 3) % n for i in range(n)])
    assert not is_square_cycle(g, [0, 2, 1, 3, 4, 5, 6, 7])


@given(integers(min_value=3, max_value=10), integers(min_value=3, max_value=10))
def test_joining_square_paths_merges_at_the_shared_port(m: int, k: int) -> None:
    p1 = Embedding(build_gadget("square-path", length=m), tuple(range(m)))
    p2 = Embedding(
        build_gadget("square-path", length=k),
        tuple(range(m - 2, m + k - 2)),
    )
    joined = join_square_paths(p1, p2)
    assert joined.vertices == tuple(range(m + k - 2))
    assert joined.gadget.labels == m + k - 2
    g = complete_graph(m + k - 2)
    assert validate_embedding(g, joined).ok


def test_reverse_square_path_flips_the_embedding() -> None:
    emb = Embedding(build_gadget("square-path", length=5), (3, 1, 4, 0, 2))
    rev = reverse_square_path(emb)
    assert rev.vertices == (2, 0, 4, 1, 3)
    assert validate_embedding(complete_graph(5), rev).ok


@given(integers(min_value=4, max_value=12))
def test_square_path_pairs_lists_every_close_pair(length: int) -> None:
    seq = tuple(range(100, 100 + length))
    pairs = square_path_pairs(seq)
    expected = {
        (seq[i], seq[j]) for i, j in square_path_edge_oracle(length)
    }
    assert {tuple(sorted(p)) for p in pairs} == {
        tuple(sorted(p)) for p in expected
    }


def test_validate_embedding_accepts_exact_image_and_flags_gaps() -> None:
    gadget = build_gadget("square-path", length=5)
    host = Graph(5, sorted(square_path_edge_oracle(5)))
    good = validate_embedding(host, Embedding(gadget, (0, 1, 2, 3, 4)))
    assert good.ok
    bad = validate_embedding(host, Embedding(gadget, (0, 2, 1, 3, 4)))
    assert not bad.ok
    assert bad.reason
    dup = validate_embedding(host, Embedding(gadget, (0, 1, 2, 3, 0)))
    assert not dup.ok


def test_validate_embedding_checks_port_images() -> None:
    gadget = build_gadget("square-path", length=4)
    host = complete_graph(8)
    emb = Embedding(gadget, (2, 3, 4, 5))
    assert validate_embedding(host, emb, connect_from=(2, 3), connect_to=(4, 5)).ok
    wrong_entry = validate_embedding(host, emb, connect_from=(3, 2))
    assert not wrong_entry.ok and "entry port" in wrong_entry.reason
    wrong_exit = validate_embedding(host, emb, connect_to=(5, 4))
    assert not wrong_exit.ok and "exit port" in wrong_exit.reason


# -- absorber traversals ------------------------------------------------------


def synthetic_unit_host(blocks: int, connector_length: int):
    """A host carrying exactly one absorber unit's guaranteed edges.

    Vertices: star core ``u1, u2, x, v1, v2`` occupies the first block's
    slots plus the absorbee; remaining backbone slots and connector
    interiors get fresh vertices.  Returns the host graph, the backbone
    vertex assignment, the connector interiors, and the absorbee.
    """
    interiors_per = connector_length - 4
    backbone = build_gadget("backbone", blocks=blocks)
    x = 0
    u1, u2, v1, v2 = 1, 2, 3, 4
    verts = [0] * (4 * blocks)
    verts[0], verts[1], verts[2], verts[3] = u1, u2, v1, v2
    nxt = 5
    for label in range(4, 4 * blocks):
        verts[label] = nxt
        nxt += 1
    interiors = []
    for _ in range(blocks - 1):
        interiors.append(tuple(range(nxt, nxt + interiors_per)))
        nxt += interiors_per
    edges: set[tuple[int, int]] = set()
    core = (u1, u2, x, v1, v2)
    for i, j in square_path_edge_oracle(5):
        edges.add(tuple(sorted((core[i], core[j]))))
    for a, b in backbone.edges:
        edges.add(tuple(sorted((verts[a], verts[b]))))
    conn = build_gadget("pseudo-path", length=connector_length, b=1)
    for i in range(1, blocks):
        tail = (
            verts[backbone_label(i, 3, blocks)],
            verts[backbone_label(i, 4, blocks)],
        )
        head = (
            verts[backbone_label(i + 1, 1, blocks)],
            verts[backbone_label(i + 1, 2, blocks)],
        )
        image = tail + interiors[i - 1] + head
        for a, b in conn.edges:
            edges.add(tuple(sorted((image[a], image[b]))))
    host = Graph(nxt, sorted(edges))
    return host, tuple(verts), tuple(interiors), x


def resolve_traversal(tokens, verts, blocks: int) -> tuple[int, ...]:
    out = []
    for tok in tokens:
        if hasattr(tok, "block"):
            out.append(verts[backbone_label(tok.block, tok.slot, blocks)])
        else:
            out.append(tok)
    return tuple(out)


@pytest.mark.parametrize("blocks", [2, 3, 4])
@pytest.mark.parametrize("connector_length", [4, 8])
def test_both_traversals_are_square_paths_on_the_unit_edges(
    blocks: int, connector_length: int
) -> None:
    host, verts, interiors, x = synthetic_unit_host(blocks, connector_length)
    everything = set(verts) | {x} | {v for i in interiors for v in i}
    entry = (verts[0], verts[1])
    exit_ = (
        verts[backbone_label(blocks, 3, blocks)],
        verts[backbone_label(blocks, 4, blocks)],
    )
    for mode, covered in (
        ("include", everything),
        ("exclude", everything - {x}),
    ):
        walk = resolve_traversal(
            absorber_traversal(blocks, interiors, x, mode), verts, blocks
        )
        assert set(walk) == covered
        assert len(walk) == len(covered)
        assert is_square_path(host, walk)
        assert walk[:2] == entry
        assert walk[-2:] == exit_


def test_traversal_rejects_bad_arguments() -> None:
    with pytest.raises(InputError):
        absorber_traversal(1, (), 9, "include")
    with pytest.raises(InputError):
        absorber_traversal(3, ((),), 9, "include")
    with pytest.raises(InputError):
        absorber_traversal(2, ((),), 9, "sideways")


def test_joining_pseudo_paths_forms_a_backbone() -> None:
    blocks = 3
    blue_len, red_len = 4, 4 * blocks - 2
    shared = (100, 101)
    blue = Embedding(
        build_gadget("pseudo-path", length=blue_len, b=2),
        (0, 1) + shared,
    )
    red = Embedding(
        build_gadget("pseudo-path", length=red_len, b=2),
        tuple(range(2, red_len)) + shared,
    )
    joined = join_pseudo_paths_to_backbone(blue, red)
    assert joined.gadget.kind == "backbone"
    assert joined.gadget.params[0] == blocks
    assert len(joined.vertices) == 4 * blocks
    assert len(set(joined.vertices)) == 4 * blocks
    assert joined.port_from_image == (blue.vertices[0], blue.vertices[1])
    assert joined.port_to_image == (red.vertices[1], red.vertices[0])
