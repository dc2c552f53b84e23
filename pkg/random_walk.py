"""
Unbiased random walks on trees: exact first-passage times, a Monte-Carlo
estimator and the Wiener-index shortcut for the mean first-passage time.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import repeat
from typing import List, Optional, Tuple

import numpy as np

from config import Config
from models.tree_models import (
    BadParam,
    IsolatedVertex,
    McEstimate,
    MfptReport,
    SolveFailure,
    WalkConfig,
)
from tree_core import Tree, check_vertex, oracle_wiener, subtree_sizes

logger = logging.getLogger(__name__)


def walk_step(tree: Tree, u: int, rng: np.random.Generator) -> int:
    """One step of the unbiased walk: a uniformly chosen neighbour of ``u``."""
    check_vertex(tree, u)
    neighbors = tree.adjacency[u]
    if not neighbors:
        raise IsolatedVertex(f"vertex {u} has no neighbours")
    return neighbors[int(rng.integers(len(neighbors)))]


def _require_walkable(tree: Tree) -> None:
    if tree.n < 2:
        raise IsolatedVertex("random walks need at least two vertices")


def fpt_exact(tree: Tree, target: int) -> List[Fraction]:
    """Mean first-passage time to ``target`` from every vertex.

    Rooted at the target, leaving a subtree of size s through its top edge takes
    2s - 1 steps on average, so F(u) sums 2s - 1 along the path to the target.
    One sweep collects subtree sizes, a second accumulates down from the root.
    """
    _require_walkable(tree)
    size, parent, order = subtree_sizes(tree, target)
    hit = [0] * tree.n
    for v in order[1:]:
        hit[v] = hit[parent[v]] + 2 * size[v] - 1
    return [Fraction(h) for h in hit]


def fpt_dense(tree: Tree, target: int) -> List[Fraction]:
    """Same values by Gauss-Jordan elimination of F(u) = 1 + mean F(neighbour)."""
    _require_walkable(tree)
    check_vertex(tree, target)
    if tree.n > Config.DENSE_SOLVE_MAX_VERTICES:
        raise BadParam(f"dense solve limited to {Config.DENSE_SOLVE_MAX_VERTICES} vertices")
    unknowns = [u for u in range(tree.n) if u != target]
    index = {u: i for i, u in enumerate(unknowns)}
    k = len(unknowns)
    rows: List[List[Fraction]] = []
    for u in unknowns:
        row = [Fraction(0)] * (k + 1)
        row[index[u]] = Fraction(tree.degree(u))
        for v in tree.adjacency[u]:
            if v != target:
                row[index[v]] -= 1
        row[k] = Fraction(tree.degree(u))
        rows.append(row)

    for col in range(k):
        pivot = next((r for r in range(col, k) if rows[r][col] != 0), None)
        if pivot is None:
            raise SolveFailure(f"singular first-passage system at column {col}")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        lead = rows[col][col]
        rows[col] = [x / lead for x in rows[col]]
        for r in range(k):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]

    out = [Fraction(0)] * tree.n
    for u in unknowns:
        out[u] = rows[index[u]][k]
    return out


def exact_mfpt(tree: Tree) -> Fraction:
    """Average of F(u -> v) over the n(n - 1) ordered pairs."""
    _require_walkable(tree)
    total = sum((sum(fpt_exact(tree, v)) for v in range(tree.n)), Fraction(0))
    return total / (tree.n * (tree.n - 1))


def _trial_chunks(trials: int) -> List[int]:
    size = Config.MC_CHUNK_TRIALS
    chunks = [size] * (trials // size)
    if trials % size:
        chunks.append(trials % size)
    return chunks


def _run_chunk(tree: Tree, count: int, seed: np.random.SeedSequence, max_steps: int) -> Tuple[np.ndarray, int]:
    rng = np.random.Generator(np.random.Philox(seed))
    n = tree.n
    adjacency = tree.adjacency
    times = np.empty(count, dtype=np.int64)
    completed = 0
    truncated = 0
    buffer = rng.random(4096)
    pos = 0
    for _ in range(count):
        source = int(rng.integers(n))
        target = int(rng.integers(n - 1))
        if target >= source:
            target += 1
        u = source
        steps = 0
        while u != target and steps < max_steps:
            if pos == len(buffer):
                buffer = rng.random(4096)
                pos = 0
            nbrs = adjacency[u]
            u = nbrs[int(buffer[pos] * len(nbrs))]
            pos += 1
            steps += 1
        if u == target:
            times[completed] = steps
            completed += 1
        else:
            truncated += 1
    return times[:completed], truncated


def mc_mfpt(tree: Tree, cfg: WalkConfig) -> McEstimate:
    """Monte-Carlo MFPT over uniformly drawn ordered pairs.

    Trials are split into fixed-size chunks, each with its own Philox substream
    spawned from ``cfg.rng_seed``, so results do not depend on ``cfg.threads``.
    With ``threads > 1`` the chunks run in worker processes.
    Trials that reach ``max_steps`` are counted in ``truncated`` and left out of
    the estimate.
    """
    _require_walkable(tree)
    max_steps = cfg.max_steps or Config.MC_MAX_STEPS_FACTOR * tree.n * tree.n
    chunks = _trial_chunks(cfg.trials)
    seeds = np.random.SeedSequence(cfg.rng_seed).spawn(len(chunks))

    if cfg.threads > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_run_chunk, repeat(tree), chunks, seeds, repeat(max_steps)))
    else:
        results = [_run_chunk(tree, count, seed, max_steps) for count, seed in zip(chunks, seeds)]

    times = np.concatenate([r[0] for r in results])
    truncated = sum(r[1] for r in results)
    if truncated:
        logger.warning(f"{truncated} of {cfg.trials} walks hit max_steps={max_steps}")
    if times.size == 0:
        return McEstimate(estimate=float("nan"), stderr=float("nan"), trials=0, truncated=truncated)
    estimate = float(np.mean(times))
    stderr = float(np.std(times, ddof=1) / np.sqrt(times.size)) if times.size > 1 else 0.0
    return McEstimate(estimate=estimate, stderr=stderr, trials=int(times.size), truncated=truncated)


def mfpt(tree: Tree, cfg: Optional[WalkConfig] = None, exact: Optional[bool] = None) -> MfptReport:
    """MFPT report: exact solve (small trees), 2S/|V|, the printed S/|V| and an optional MC estimate."""
    _require_walkable(tree)
    if exact is None:
        exact = tree.n <= Config.EXACT_SOLVE_MAX_VERTICES
    wiener = oracle_wiener(tree, Config.EXACT_SOLVE_MAX_VERTICES)
    from_wiener = Fraction(2 * wiener, tree.n)
    printed = Fraction(wiener, tree.n)
    exact_value = exact_mfpt(tree) if exact else None
    reference = exact_value if exact_value is not None else from_wiener
    report = MfptReport(
        n=tree.n,
        wiener=Fraction(wiener),
        exact=exact_value,
        from_wiener_2S_over_V=from_wiener,
        printed_S_over_V=printed,
        lemma_factor=reference / printed,
        mc=mc_mfpt(tree, cfg) if cfg is not None else None,
    )
    if exact_value is not None and exact_value != from_wiener:
        logger.error(f"exact MFPT {exact_value} differs from 2S/|V| = {from_wiener}")
    return report


__all__ = [
    "walk_step",
    "fpt_exact",
    "fpt_dense",
    "exact_mfpt",
    "mc_mfpt",
    "mfpt",
]
