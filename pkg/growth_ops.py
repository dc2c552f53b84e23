"""
Edge operations (subdivision, star-fractal) and vertex-growth algorithms
(Cayley, exponential) with their predicted vertex and edge counts.

Labeling is deterministic: old vertices keep their ids, new vertices are
numbered after them, edge by edge in (min id, max id) order, in path order
from the smaller endpoint, and pendant leaves directly after their star centre.
"""
from __future__ import annotations

import logging
from collections import Counter
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import Config
from models.tree_models import (
    BadParam,
    CountSource,
    Family,
    GrowthCounts,
    ModelSpec,
    ResourceCapExceeded,
    SeedKind,
    SeedViolation,
)
from tree_core import Edge, Tree, build_from_edges, path_tree

logger = logging.getLogger(__name__)


def _next_tag(tree: Tree) -> int:
    return tree.max_generation + 1 if tree.n else 0


def subdivide(tree: Tree, m: int) -> Tree:
    """Replace every edge uv by a path u, y1, ..., ym, v."""
    if m < 1:
        raise BadParam(f"subdivision order m must be >= 1, got {m}")
    tag = _next_tag(tree)
    next_id = tree.n
    edges: List[Edge] = []
    for u, v in tree.edges():
        prev = u
        for _ in range(m):
            edges.append((prev, next_id))
            prev = next_id
            next_id += 1
        edges.append((prev, v))
    tags = list(tree.generation_tags) + [tag] * (next_id - tree.n)
    return build_from_edges(next_id, edges, tags)


def star_fractal(tree: Tree, w: int, m: int) -> Tree:
    """Subdivide every edge by w star centres, each carrying m pendant leaves."""
    if w < 1 or m < 1:
        raise BadParam(f"star_fractal needs w >= 1 and m >= 1, got w={w}, m={m}")
    tag = _next_tag(tree)
    next_id = tree.n
    edges: List[Edge] = []
    for u, v in tree.edges():
        prev = u
        for _ in range(w):
            centre = next_id
            next_id += 1
            edges.append((prev, centre))
            for _ in range(m):
                edges.append((centre, next_id))
                next_id += 1
            prev = centre
        edges.append((prev, v))
    tags = list(tree.generation_tags) + [tag] * (next_id - tree.n)
    return build_from_edges(next_id, edges, tags)


def check_cayley_seed(seed: Tree, n: int) -> None:
    if seed.n < 2:
        raise SeedViolation("a Cayley seed needs at least two vertices")
    bad = [u for u in range(seed.n) if seed.degree(u) not in (1, n)]
    if bad:
        raise SeedViolation(f"internal vertices {bad[:5]} have degree != {n}")


def _attach_children(tree: Tree, parents: List[int], per_parent: int) -> Tree:
    tag = _next_tag(tree)
    next_id = tree.n
    edges = tree.edges()
    for p in parents:
        for _ in range(per_parent):
            edges.append((p, next_id))
            next_id += 1
    tags = list(tree.generation_tags) + [tag] * (next_id - tree.n)
    return build_from_edges(next_id, edges, tags)


def grow_cayley(n: int, t: int, seed: Optional[Tree] = None) -> Tree:
    """Cayley tree C(t, n). With no explicit seed the star K_{1,n} is step 1."""
    if n < 3:
        raise BadParam(f"Cayley coordination number must be >= 3, got {n}")
    if seed is None:
        if t < 1:
            raise BadParam("the star-seeded Cayley tree starts at t=1")
        tree = build_from_edges(n + 1, [(0, i) for i in range(1, n + 1)], [0] + [1] * n)
        steps = t - 1
    else:
        if t < 0:
            raise BadParam(f"steps must be >= 0, got {t}")
        check_cayley_seed(seed, n)
        tree = seed
        steps = t
    for _ in range(steps):
        tree = _attach_children(tree, tree.leaves(), n - 1)
    return tree


def grow_exponential(seed: Tree, m: int, t: int) -> Tree:
    """Every existing vertex gains m pendant children per step."""
    if m < 1:
        raise BadParam(f"children per vertex m must be >= 1, got {m}")
    if t < 0:
        raise BadParam(f"steps must be >= 0, got {t}")
    tree = seed
    for _ in range(t):
        tree = _attach_children(tree, list(range(tree.n)), m)
    return tree


def resolve_seed(spec: ModelSpec) -> Optional[Tree]:
    """The seed tree, or None for the symbolic Cayley star."""
    if spec.seed.kind == SeedKind.STAR:
        return None
    if spec.seed.kind == SeedKind.EDGE:
        return path_tree(2)
    order = spec.seed.order or 0
    return build_from_edges(order, list(spec.seed.edges))


def edge_growth_factor(spec: ModelSpec, source: CountSource = CountSource.CORRECTED) -> int:
    """Per-step edge multiplier of an edge-operation family."""
    if spec.family == Family.FIRST_ORDER_SUBDIVISION:
        return 2
    if spec.family == Family.SUBDIVISION:
        return spec.m + 1
    if spec.family == Family.STAR_FRACTAL_1M:
        return spec.m + 2
    if spec.family == Family.TGRAPH:
        return 3
    if spec.family == Family.STAR_FRACTAL:
        if source == CountSource.AS_PRINTED:
            return (spec.w + 1) * spec.m + 1
        return spec.w * (spec.m + 1) + 1
    raise BadParam(f"{spec.family.value} is not an edge-operation family")


def _seed_order(spec: ModelSpec) -> int:
    if spec.seed.kind == SeedKind.EDGE:
        return 2
    if spec.seed.kind == SeedKind.STAR:
        return spec.n + 1
    return spec.seed.order or 0


def _cayley_explicit_leaves(spec: ModelSpec) -> int:
    degrees: Counter = Counter()
    for u, v in spec.seed.edges:
        degrees[u] += 1
        degrees[v] += 1
    return sum(1 for d in degrees.values() if d == 1)


def predicted_counts(spec: ModelSpec) -> Dict[CountSource, GrowthCounts]:
    """Closed-form |V_t|, |E_t| for every step up to spec.t, printed and corrected."""
    out: Dict[CountSource, GrowthCounts] = {}
    for source in (CountSource.AS_PRINTED, CountSource.CORRECTED):
        vertices: List[int] = []
        edges: List[int] = []
        start = 0
        if spec.family == Family.CAYLEY:
            n = spec.n
            if spec.seed.kind == SeedKind.STAR:
                start = 1
                for step in range(1, spec.t + 1):
                    v = (n * (n - 1) ** step - 2) // (n - 2)
                    vertices.append(v)
                    edges.append(v - 1)
            else:
                v0 = spec.seed.order or 0
                l0 = _cayley_explicit_leaves(spec)
                for step in range(spec.t + 1):
                    v = v0 + l0 * sum((n - 1) ** i for i in range(1, step + 1))
                    vertices.append(v)
                    edges.append(v - 1)
        elif spec.family == Family.EXPONENTIAL:
            v0 = _seed_order(spec)
            for step in range(spec.t + 1):
                v = (spec.m + 1) ** step * v0
                vertices.append(v)
                edges.append(v - 1)
        else:
            v0 = _seed_order(spec)
            e0 = v0 - 1
            g = edge_growth_factor(spec, source)
            for step in range(spec.t + 1):
                vertices.append(v0 + (g ** step - 1) * e0)
                edges.append(g ** step * e0)
        out[source] = GrowthCounts(source=source, start_step=start, vertices=vertices, edges=edges)
    return out


def apply_step(spec: ModelSpec, tree: Tree) -> Tree:
    """One step of an edge-operation family applied to ``tree``."""
    if spec.family == Family.FIRST_ORDER_SUBDIVISION:
        return subdivide(tree, 1)
    if spec.family == Family.SUBDIVISION:
        return subdivide(tree, spec.m)
    if spec.family == Family.STAR_FRACTAL_1M:
        return star_fractal(tree, 1, spec.m)
    if spec.family == Family.STAR_FRACTAL:
        return star_fractal(tree, spec.w, spec.m)
    if spec.family == Family.TGRAPH:
        return star_fractal(tree, 1, 1)
    raise BadParam(f"{spec.family.value} is not an edge-operation family")


def grow(spec: ModelSpec, max_vertices: Optional[int] = None) -> Tree:
    """Apply the family's one-step operation spec.t times."""
    cap = Config.MAX_VERTICES if max_vertices is None else max_vertices
    final_v = predicted_counts(spec)[CountSource.CORRECTED].vertices[-1]
    if final_v > cap:
        raise ResourceCapExceeded(f"{spec.serialize()} would have {final_v} vertices (cap {cap})")

    seed = resolve_seed(spec)
    if spec.family == Family.CAYLEY:
        return grow_cayley(spec.n, spec.t, seed)
    assert seed is not None
    if spec.family == Family.EXPONENTIAL:
        return grow_exponential(seed, spec.m, spec.t)

    tree = seed
    for step in range(spec.t):
        tree = apply_step(spec, tree)
        logger.debug(f"{spec.family.value} step {step + 1}: {tree.n} vertices")
    return tree


# --- Degree distribution ----------------------------------------------------

def cumulative_degree_distribution(tree: Tree) -> List[Tuple[int, float]]:
    """(k, fraction of vertices with degree >= k) over the realized degrees."""
    if tree.n < 1:
        raise BadParam("degree distribution needs at least one vertex")
    counts = Counter(tree.degree(u) for u in range(tree.n))
    out: List[Tuple[int, float]] = []
    remaining = tree.n
    for k in sorted(counts):
        out.append((k, remaining / tree.n))
        remaining -= counts[k]
    return out


def fit_exponential_tail(distribution: List[Tuple[int, float]]) -> Tuple[float, float]:
    """(C, alpha) with ln P_cum ~ ln C - alpha k; C is raised until C e^{-alpha k} bounds every point."""
    if len(distribution) < 2:
        raise BadParam("need at least two degrees to fit a tail")
    ks = np.array([k for k, _ in distribution], dtype=float)
    ps = np.array([p for _, p in distribution], dtype=float)
    slope, _ = np.polyfit(ks, np.log(ps), 1)
    alpha = float(-slope)
    prefactor = float(np.max(ps * np.exp(alpha * ks)))
    return prefactor, alpha


__all__ = [
    "subdivide",
    "star_fractal",
    "grow_cayley",
    "grow_exponential",
    "check_cayley_seed",
    "resolve_seed",
    "edge_growth_factor",
    "predicted_counts",
    "apply_step",
    "grow",
    "cumulative_degree_distribution",
    "fit_exponential_tail",
]
