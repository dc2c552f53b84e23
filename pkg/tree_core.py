"""
Exact tree representation, traversal and the brute-force Wiener-index oracle.

Every other module anchors on the values computed here: ``wiener_oracle`` is the
oracle of record for the audit, ``wiener_edge_cut`` is the linear-time
cross-check used once trees get large.
"""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from models.tree_models import BadParam, BadVertexId, NotATree

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


class Tree:
    """Immutable tree on vertices 0..n-1 with per-vertex sorted adjacency.

    ``generation_tags[v]`` is the growth step at which ``v`` appeared. Old vertices
    keep their ids across growth, so tags are nondecreasing in the vertex id.
    """

    __slots__ = ("n", "adjacency", "generation_tags")

    def __init__(self, n: int, adjacency: Tuple[Tuple[int, ...], ...], generation_tags: Tuple[int, ...]):
        self.n = n
        self.adjacency = adjacency
        self.generation_tags = generation_tags

    def neighbors(self, u: int) -> Tuple[int, ...]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def edges(self) -> List[Edge]:
        """Edges as (smaller id, larger id), sorted."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def leaves(self) -> List[int]:
        return [u for u in range(self.n) if len(self.adjacency[u]) == 1]

    @property
    def edge_count(self) -> int:
        return max(self.n - 1, 0)

    @property
    def max_generation(self) -> int:
        return self.generation_tags[-1] if self.n else 0

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return (
            self.n == other.n
            and self.adjacency == other.adjacency
            and self.generation_tags == other.generation_tags
        )

    def __hash__(self) -> int:
        return hash((self.n, self.adjacency))

    def __repr__(self) -> str:
        return f"Tree(n={self.n}, generations={self.max_generation})"


@dataclass(frozen=True)
class DistanceRow:
    source: int
    dist: List[int]


def build_from_edges(n: int, edges: Iterable[Edge], generation_tags: Optional[Sequence[int]] = None) -> Tree:
    """Validate an edge list and return the tree it describes.

    Raises BadVertexId for ids outside [0, n) and NotATree for a wrong edge
    count, a self-loop, a cycle or a disconnected edge set.
    """
    if n < 0:
        raise BadParam(f"vertex count must be nonnegative, got {n}")
    edge_list = [(int(u), int(v)) for u, v in edges]
    for u, v in edge_list:
        if not (0 <= u < n and 0 <= v < n):
            raise BadVertexId(f"edge ({u}, {v}) references a vertex outside [0, {n})")
        if u == v:
            raise NotATree(f"self-loop at vertex {u}")
    if n == 0:
        if edge_list:
            raise NotATree("empty vertex set with edges")
        return Tree(0, (), ())
    if len(edge_list) != n - 1:
        raise NotATree(f"{len(edge_list)} edges for {n} vertices; a tree needs {n - 1}")

    adj: List[List[int]] = [[] for _ in range(n)]
    for u, v in edge_list:
        adj[u].append(v)
        adj[v].append(u)

    seen = [False] * n
    seen[0] = True
    reached = 1
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                reached += 1
                queue.append(v)
    if reached != n:
        raise NotATree(f"edge set reaches {reached} of {n} vertices (cycle or disconnected)")

    if generation_tags is None:
        tags: Tuple[int, ...] = (0,) * n
    else:
        tags = tuple(int(g) for g in generation_tags)
        if len(tags) != n:
            raise BadParam(f"{len(tags)} generation tags for {n} vertices")
        if any(tags[i] > tags[i + 1] for i in range(n - 1)):
            raise BadParam("generation tags must be nondecreasing in vertex id")

    return Tree(n, tuple(tuple(sorted(a)) for a in adj), tags)


def check_vertex(tree: Tree, u: int) -> None:
    if not 0 <= u < tree.n:
        raise BadVertexId(f"vertex {u} outside [0, {tree.n})")


def _bfs(tree: Tree, source: int) -> Tuple[List[int], List[int], List[int]]:
    """Distances, parents and visit order from ``source``."""
    dist = [-1] * tree.n
    parent = [-1] * tree.n
    dist[source] = 0
    order = [source]
    adjacency = tree.adjacency
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        du = dist[u] + 1
        for v in adjacency[u]:
            if dist[v] < 0:
                dist[v] = du
                parent[v] = u
                order.append(v)
    return dist, parent, order


def bfs_distances(tree: Tree, source: int) -> DistanceRow:
    check_vertex(tree, source)
    dist, _, _ = _bfs(tree, source)
    return DistanceRow(source=source, dist=dist)


def wiener_oracle(tree: Tree) -> int:
    """Sum of distances over unordered pairs: one BFS per vertex, ordered total halved."""
    if tree.n < 1:
        raise BadParam("wiener_oracle needs at least one vertex")
    total = 0
    for u in range(tree.n):
        dist, _, _ = _bfs(tree, u)
        total += sum(dist)
    return total // 2


def wiener_edge_cut(tree: Tree) -> int:
    """Wiener index as the sum over edges of s * (n - s), s the size of one side."""
    if tree.n < 1:
        raise BadParam("wiener_edge_cut needs at least one vertex")
    _, parent, order = _bfs(tree, 0)
    size = [1] * tree.n
    total = 0
    for v in reversed(order):
        p = parent[v]
        if p >= 0:
            size[p] += size[v]
            total += size[v] * (tree.n - size[v])
    return total


def subtree_sizes(tree: Tree, root: int) -> Tuple[List[int], List[int], List[int]]:
    """(sizes, parents, BFS order) of the tree rooted at ``root``."""
    check_vertex(tree, root)
    _, parent, order = _bfs(tree, root)
    size = [1] * tree.n
    for v in reversed(order):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    return size, parent, order


def oracle_wiener(tree: Tree, bfs_max_vertices: int) -> int:
    """BFS oracle for small trees, edge-cut oracle above ``bfs_max_vertices``."""
    if tree.n <= bfs_max_vertices:
        return wiener_oracle(tree)
    return wiener_edge_cut(tree)


def _farthest(tree: Tree, source: int) -> Tuple[int, List[int], List[int]]:
    dist, parent, order = _bfs(tree, source)
    far = order[-1]
    return far, dist, parent


def diameter(tree: Tree) -> int:
    if tree.n < 1:
        raise BadParam("diameter needs at least one vertex")
    a, _, _ = _farthest(tree, 0)
    b, dist, _ = _farthest(tree, a)
    return dist[b]


def centers(tree: Tree) -> List[int]:
    """One or two central vertices, taken from the middle of a longest path."""
    if tree.n < 1:
        raise BadParam("centers needs at least one vertex")
    a, _, _ = _farthest(tree, 0)
    b, dist, parent = _farthest(tree, a)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    d = dist[b]
    if d % 2 == 0:
        return [path[d // 2]]
    return sorted((path[d // 2], path[d // 2 + 1]))


def degree_stats(tree: Tree) -> Tuple[List[int], Fraction]:
    if tree.n < 1:
        raise BadParam("degree_stats needs at least one vertex")
    degrees = [len(a) for a in tree.adjacency]
    return degrees, Fraction(sum(degrees), tree.n)


def canonical_form(tree: Tree) -> str:
    """Isomorphism-invariant string: smallest AHU encoding over the tree's centres."""
    if tree.n == 0:
        return ""
    best: Optional[str] = None
    for root in centers(tree):
        _, parent, order = _bfs(tree, root)
        labels: Dict[int, str] = {}
        children: List[List[str]] = [[] for _ in range(tree.n)]
        for v in reversed(order):
            label = "(" + "".join(sorted(children[v])) + ")"
            labels[v] = label
            if parent[v] >= 0:
                children[parent[v]].append(label)
        encoding = labels[root]
        if best is None or encoding < best:
            best = encoding
    return best or ""


# --- Named trees ------------------------------------------------------------

def path_tree(a: int) -> Tree:
    if a < 1:
        raise BadParam(f"path needs at least one vertex, got {a}")
    return build_from_edges(a, [(i, i + 1) for i in range(a - 1)])


def star_tree(leaves: int) -> Tree:
    """K_{1,leaves} with the centre at vertex 0."""
    if leaves < 1:
        raise BadParam(f"star needs at least one leaf, got {leaves}")
    return build_from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def relabel(tree: Tree, permutation: Sequence[int]) -> Tree:
    """Tree with vertex ``v`` renamed ``permutation[v]``; generation tags are dropped."""
    if sorted(permutation) != list(range(tree.n)):
        raise BadParam("relabel needs a permutation of the vertex ids")
    return build_from_edges(tree.n, [(permutation[u], permutation[v]) for u, v in tree.edges()])


# --- Interchange ------------------------------------------------------------

def to_edge_list_text(tree: Tree, header_comment: Optional[str] = None) -> str:
    """``n m`` then one ``u v`` line per edge; an optional ``#`` comment line leads."""
    edges = tree.edges()
    lines: List[str] = []
    if header_comment:
        lines.append(f"# {header_comment}")
    lines.append(f"{tree.n} {len(edges)}")
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Tree:
    rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise NotATree("empty edge-list text")
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        edges = [(int(r[0]), int(r[1])) for r in rows[1:]]
    except (IndexError, ValueError):
        raise NotATree("malformed edge-list text") from None
    if len(edges) != m:
        raise NotATree(f"header announces {m} edges, found {len(edges)}")
    return build_from_edges(n, edges)


def to_dot(tree: Tree, name: str = "T", header_comment: Optional[str] = None) -> str:
    lines: List[str] = []
    if header_comment:
        lines.append(f"// {header_comment}")
    lines.append(f"graph {name} {{")
    for v in range(tree.n):
        lines.append(f"  {v} [gen={tree.generation_tags[v]}];")
    for u, v in tree.edges():
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_networkx(tree: Tree) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(tree.n))
    g.add_edges_from(tree.edges())
    return g


def from_networkx(graph: nx.Graph) -> Tree:
    """Relabels nodes 0..n-1 in sorted node order."""
    nodes = sorted(graph.nodes())
    index = {node: i for i, node in enumerate(nodes)}
    return build_from_edges(len(nodes), [(index[u], index[v]) for u, v in graph.edges()])


__all__ = [
    "Tree",
    "DistanceRow",
    "build_from_edges",
    "bfs_distances",
    "wiener_oracle",
    "wiener_edge_cut",
    "oracle_wiener",
    "subtree_sizes",
    "check_vertex",
    "diameter",
    "centers",
    "degree_stats",
    "canonical_form",
    "path_tree",
    "star_tree",
    "relabel",
    "to_edge_list_text",
    "parse_edge_list",
    "to_dot",
    "to_networkx",
    "from_networkx",
]
