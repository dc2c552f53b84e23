from fractions import Fraction

import networkx as nx
import pytest

from models.tree_models import BadParam, BadVertexId, NotATree
from tree_core import (
    bfs_distances,
    build_from_edges,
    canonical_form,
    centers,
    degree_stats,
    diameter,
    from_networkx,
    oracle_wiener,
    parse_edge_list,
    path_tree,
    relabel,
    star_tree,
    subtree_sizes,
    to_dot,
    to_edge_list_text,
    to_networkx,
    wiener_edge_cut,
    wiener_oracle,
)


def test_build_sorts_adjacency_and_edges():
    tree = build_from_edges(4, [(2, 0), (0, 1), (3, 0)])
    assert tree.neighbors(0) == (1, 2, 3)
    assert tree.edges() == [(0, 1), (0, 2), (0, 3)]
    assert tree.leaves() == [1, 2, 3]
    assert tree.edge_count == 3
    assert len(tree) == 4


@pytest.mark.parametrize(
    "n, edges, error",
    [
        (3, [(0, 5), (0, 1)], BadVertexId),
        (3, [(-1, 0), (0, 1)], BadVertexId),
        (3, [(0, 0), (0, 1)], NotATree),
        (3, [(0, 1)], NotATree),
        (4, [(0, 1), (1, 2), (2, 0)], NotATree),
        (0, [(0, 1)], BadVertexId),
    ],
)
def test_build_rejects_invalid_edge_sets(n, edges, error):
    with pytest.raises(error):
        build_from_edges(n, edges)


def test_generation_tags_must_be_nondecreasing():
    with pytest.raises(BadParam):
        build_from_edges(3, [(0, 1), (1, 2)], [0, 1, 0])
    with pytest.raises(BadParam):
        build_from_edges(3, [(0, 1), (1, 2)], [0, 1])
    assert build_from_edges(3, [(0, 1), (1, 2)], [0, 0, 1]).max_generation == 1


def test_empty_and_single_vertex_trees():
    assert build_from_edges(0, []).n == 0
    single = build_from_edges(1, [])
    assert wiener_oracle(single) == 0
    assert diameter(single) == 0


def test_bfs_distances_on_path():
    row = bfs_distances(path_tree(5), 1)
    assert row.source == 1
    assert row.dist == [1, 0, 1, 2, 3]
    with pytest.raises(BadVertexId):
        bfs_distances(path_tree(5), 5)


@pytest.mark.parametrize("a, expected", [(2, 1), (3, 4), (4, 10), (5, 20), (10, 165)])
def test_path_wiener_oracle(a, expected):
    assert wiener_oracle(path_tree(a)) == expected
    assert wiener_edge_cut(path_tree(a)) == expected


def test_star_wiener():
    assert wiener_oracle(star_tree(3)) == 9
    assert wiener_oracle(star_tree(5)) == 5 + 2 * 10


@pytest.mark.parametrize("order", [4, 6, 8])
def test_oracles_agree_with_networkx(order):
    for graph in nx.nonisomorphic_trees(order):
        tree = from_networkx(graph)
        expected = wiener_oracle(tree)
        assert wiener_edge_cut(tree) == expected
        assert nx.wiener_index(graph) == expected


def test_oracle_wiener_switches_to_edge_cut():
    tree = path_tree(30)
    assert oracle_wiener(tree, 10) == oracle_wiener(tree, 100) == (30 ** 3 - 30) // 6


def test_subtree_sizes_rooted_at_end_of_path():
    sizes, parents, order = subtree_sizes(path_tree(3), 0)
    assert sizes == [3, 2, 1]
    assert parents == [-1, 0, 1]
    assert order == [0, 1, 2]


def test_diameter_and_centers():
    assert diameter(path_tree(5)) == 4
    assert centers(path_tree(5)) == [2]
    assert centers(path_tree(4)) == [1, 2]
    assert diameter(star_tree(4)) == 2
    assert centers(star_tree(4)) == [0]


def test_degree_stats_average_is_two_minus_two_over_n():
    degrees, average = degree_stats(star_tree(3))
    assert degrees == [3, 1, 1, 1]
    assert average == Fraction(3, 2)
    _, average = degree_stats(path_tree(10))
    assert average == Fraction(18, 10)


def test_canonical_form_is_label_invariant():
    tree = build_from_edges(6, [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)])
    shuffled = relabel(tree, [5, 3, 0, 1, 4, 2])
    assert canonical_form(tree) == canonical_form(shuffled)
    assert canonical_form(path_tree(6)) != canonical_form(tree)
    assert nx.is_isomorphic(to_networkx(tree), to_networkx(shuffled))


def test_relabel_requires_a_permutation():
    with pytest.raises(BadParam):
        relabel(path_tree(3), [0, 0, 1])


def test_edge_list_text_round_trip():
    tree = path_tree(3)
    text = to_edge_list_text(tree, "family=tgraph t=0")
    assert text == "# family=tgraph t=0\n3 2\n0 1\n1 2\n"
    assert parse_edge_list(text) == tree


def test_parse_edge_list_rejects_bad_header():
    with pytest.raises(NotATree):
        parse_edge_list("3 3\n0 1\n1 2\n")
    with pytest.raises(NotATree):
        parse_edge_list("")
    with pytest.raises(NotATree):
        parse_edge_list("three two\n")


def test_dot_lists_generations_and_edges():
    tree = build_from_edges(3, [(0, 1), (1, 2)], [0, 0, 1])
    dot = to_dot(tree, name="T", header_comment="hello")
    assert dot.splitlines()[0] == "// hello"
    assert "graph T {" in dot
    assert "  2 [gen=1];" in dot
    assert "  1 -- 2;" in dot
    assert dot.endswith("}\n")


def test_networkx_round_trip_relabels_sorted_nodes():
    graph = nx.Graph([("b", "a"), ("b", "c")])
    tree = from_networkx(graph)
    assert tree.edges() == [(0, 1), (1, 2)]
    assert sorted(to_networkx(tree).edges()) == [(0, 1), (1, 2)]
