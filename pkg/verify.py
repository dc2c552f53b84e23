"""
Formula audit harness.

Sweeps a parameter grid, evaluates every canonical and as-printed formula from
``closed_forms`` and compares it with brute-force oracles on generated trees:
``oracle_wiener`` for Wiener indices, the constructed tree's order for growth
counts, ``exact_mfpt`` for mean first-passage times.

Mismatches are results, not failures. Growth or evaluation errors are logged
and recorded with verdict Undefined; the sweep always runs to the end.
Records are post-sorted by (formula id, params), so the ledger does not depend
on the number of worker processes.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import repeat
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

import networkx as nx
import numpy as np

import closed_forms as cf
from config import Config
from growth_ops import apply_step, check_cayley_seed, grow_cayley, grow_exponential, predicted_counts, star_fractal, subdivide
from models.tree_models import (
    AuditGrid,
    AuditRecord,
    BadParam,
    CountSource,
    Family,
    FormulaId,
    FormulaName,
    LedgerRow,
    LedgerSummary,
    ModelSpec,
    SeedSpec,
    Tier,
    TreeAuditError,
    Verdict,
)
from random_walk import exact_mfpt
from tree_core import Edge, Tree, build_from_edges, canonical_form, from_networkx, oracle_wiener, path_tree, wiener_oracle
from utils.helpers import fixed_width_table, format_rate

logger = logging.getLogger(__name__)

Number = Union[int, Fraction]

_COUNT_NAME: Dict[Family, FormulaName] = {
    Family.FIRST_ORDER_SUBDIVISION: FormulaName.EQ4_SUB1_COUNTS,
    Family.SUBDIVISION: FormulaName.EQ5_SUBM_COUNTS,
    Family.STAR_FRACTAL_1M: FormulaName.EQ6_STAR1M_COUNTS,
    Family.STAR_FRACTAL: FormulaName.EQ7_STARWM_COUNTS,
    Family.CAYLEY: FormulaName.EQ33_CAYLEY_COUNTS,
    Family.EXPONENTIAL: FormulaName.EQ48_EXP_COUNTS,
}

_TIER_OF_SOURCE = {CountSource.CORRECTED: Tier.CANONICAL, CountSource.AS_PRINTED: Tier.AS_PRINTED}


# --- Seeds ------------------------------------------------------------------

@dataclass(frozen=True)
class SeedEntry:
    """A seed tree of the audit catalogue; index 0 is the single edge"""
    index: int
    order: int
    edges: Tuple[Edge, ...]
    random: bool = False

    def tree(self) -> Tree:
        return build_from_edges(self.order, self.edges)

    def seed_spec(self) -> SeedSpec:
        if self.index == 0:
            return SeedSpec()
        return SeedSpec.from_edges(list(self.edges))


def enumerate_seeds(max_order: int) -> List[Tree]:
    """Every non-isomorphic tree with 2..max_order vertices."""
    out: List[Tree] = []
    seen = set()
    for order in range(2, max_order + 1):
        for graph in nx.nonisomorphic_trees(order):
            tree = from_networkx(graph)
            form = canonical_form(tree)
            if form not in seen:
                seen.add(form)
                out.append(tree)
    return out


def random_seeds(count: int, max_order: int, rng_seed: int, exclude: Optional[set] = None) -> List[Tree]:
    """Up to ``count`` pairwise non-isomorphic random trees decoded from Prüfer sequences."""
    rng = np.random.default_rng(rng_seed)
    seen = set(exclude or ())
    out: List[Tree] = []
    attempts = 0
    while len(out) < count and attempts < 50 * max(count, 1):
        attempts += 1
        order = int(rng.integers(3, max_order + 1))
        sequence = [int(x) for x in rng.integers(0, order, size=order - 2)]
        tree = from_networkx(nx.from_prufer_sequence(sequence))
        form = canonical_form(tree)
        if form in seen:
            continue
        seen.add(form)
        out.append(tree)
    if len(out) < count:
        logger.warning(f"only {len(out)} of {count} distinct random seeds up to order {max_order}")
    return out


def seed_catalogue(grid: AuditGrid) -> List[SeedEntry]:
    max_order = max(
        grid.one_step_max_order,
        grid.multi_step_max_order,
        grid.cayley_seed_max_order,
        grid.exp_seed_max_order,
        grid.mfpt_max_order,
    )
    enumerated = enumerate_seeds(max_order)
    catalogue = [SeedEntry(index=0, order=2, edges=((0, 1),))]
    for tree in enumerated:
        if tree.n > 2:
            catalogue.append(SeedEntry(index=len(catalogue), order=tree.n, edges=tuple(tree.edges())))
    # random seeds only feed the multi-step and exponential items
    covered = max(grid.multi_step_max_order, grid.exp_seed_max_order)
    known = {canonical_form(t) for t in enumerated if t.n <= covered}
    for tree in random_seeds(grid.random_seed_count, grid.random_seed_max_order, grid.random_seed, known):
        catalogue.append(SeedEntry(index=len(catalogue), order=tree.n, edges=tuple(tree.edges()), random=True))
    logger.info(f"seed catalogue: {len(catalogue)} trees ({grid.random_seed_count} random requested)")
    return catalogue


# --- Records ----------------------------------------------------------------

def compare(formula: FormulaId, params: Dict[str, int], oracle: Number, value: Optional[Number]) -> AuditRecord:
    if value is None:
        return AuditRecord(formula=formula, params=params, oracle_value=Fraction(oracle), verdict=Verdict.UNDEFINED)
    oracle_f = Fraction(oracle)
    value_f = Fraction(value)
    diff = abs(value_f - oracle_f)
    return AuditRecord(
        formula=formula,
        params=params,
        oracle_value=oracle_f,
        formula_value=value_f,
        verdict=Verdict.MATCH if diff == 0 else Verdict.MISMATCH,
        abs_diff=diff,
    )


def _evaluate(formula: FormulaId, params: Dict[str, int], oracle: Number, thunk: Callable[[], Optional[Number]]) -> AuditRecord:
    try:
        value = thunk()
    except (TreeAuditError, ArithmeticError, ValueError) as e:
        logger.error(f"{formula.key} failed at {params}: {e}")
        value = None
    return compare(formula, params, oracle, value)


def _count_records(name: FormulaName, spec: ModelSpec, step: int, tree: Tree, params: Dict[str, int]) -> List[AuditRecord]:
    out: List[AuditRecord] = []
    for source, counts in predicted_counts(spec).items():
        vertices, edges = counts.at(step)
        tier = _TIER_OF_SOURCE[source]
        out.append(compare(cf.fid(name, tier, "vertices"), params, tree.n, vertices))
        out.append(compare(cf.fid(name, tier, "edges"), params, tree.edge_count, edges))
    return out


def _family_params(spec: ModelSpec) -> Dict[str, int]:
    if spec.family == Family.STAR_FRACTAL:
        return {"w": spec.w, "m": spec.m}
    if spec.family in (Family.SUBDIVISION, Family.STAR_FRACTAL_1M, Family.EXPONENTIAL):
        return {"m": spec.m}
    return {}


# --- Work items -------------------------------------------------------------

def _audit_path(grid: AuditGrid, a: int) -> List[AuditRecord]:
    oracle = wiener_oracle(path_tree(a))
    params = {"a": a}
    return [
        _evaluate(cf.fid(FormulaName.LEMMA1_PATH), params, oracle, lambda: cf.path_wiener(a)),
        _evaluate(cf.fid(FormulaName.LEMMA1_PATH, Tier.AS_PRINTED), params, oracle, lambda: cf.path_wiener_double_sum(a)),
    ]


def _audit_one_step(grid: AuditGrid, entry: SeedEntry) -> List[AuditRecord]:
    """Lemma 2, Theorem 1, Lemma 3 and Theorem 2 against one application of the operation."""
    seed = entry.tree()
    s, n = oracle_wiener(seed, grid.bfs_max_vertices), seed.n
    base = {"seed": entry.index, "n": n, "S": s}
    out: List[AuditRecord] = []

    oracle = oracle_wiener(subdivide(seed, 1), grid.bfs_max_vertices)
    out.append(_evaluate(cf.fid(FormulaName.LEMMA2_SUB1), base, oracle, lambda: cf.lemma2(s, n)))
    out.append(_evaluate(cf.fid(FormulaName.LEMMA2_SUB1, Tier.AS_PRINTED), base, oracle, lambda: cf.lemma2(s, n)))
    out.append(_evaluate(
        cf.fid(FormulaName.LEMMA2_SUB1, Tier.AS_PRINTED, "cases"), base, oracle, lambda: sum(cf.lemma2_cases(s, n))
    ))

    for m in grid.m_values:
        params = dict(base, m=m)
        oracle = oracle_wiener(subdivide(seed, m), grid.bfs_max_vertices)
        out.append(_evaluate(cf.fid(FormulaName.THM1_SUBM), params, oracle, lambda: sum(cf.subdivision_cases(s, n, m))))
        out.append(_evaluate(cf.fid(FormulaName.THM1_SUBM, Tier.AS_PRINTED), params, oracle, lambda: cf.eq15(s, n, m)))
        out.append(_evaluate(
            cf.fid(FormulaName.THM1_SUBM, Tier.AS_PRINTED, "cases"),
            params,
            oracle,
            lambda: sum(cf.subdivision_cases(s, n, m, printed=True)),
        ))

        oracle = oracle_wiener(star_fractal(seed, 1, m), grid.bfs_max_vertices)
        out.append(_evaluate(cf.fid(FormulaName.LEMMA3_STAR1M), params, oracle, lambda: sum(cf.star_fractal_cases(s, n, 1, m))))
        out.append(_evaluate(cf.fid(FormulaName.LEMMA3_STAR1M, Tier.AS_PRINTED), params, oracle, lambda: cf.lemma3(s, n, m)))

        for w in grid.w_values:
            params_w = dict(params, w=w)
            oracle = oracle_wiener(star_fractal(seed, w, m), grid.bfs_max_vertices)
            out.append(_evaluate(cf.fid(FormulaName.THM2_EQ22), params_w, oracle, lambda: cf.eq22(s, n, w, m, printed=False)))
            out.append(_evaluate(cf.fid(FormulaName.THM2_EQ22, Tier.AS_PRINTED), params_w, oracle, lambda: cf.eq22(s, n, w, m)))
            out.append(_evaluate(cf.fid(FormulaName.THM2_EQ29), params_w, oracle, lambda: sum(cf.star_fractal_cases(s, n, w, m))))
            out.append(_evaluate(cf.fid(FormulaName.THM2_EQ29, Tier.AS_PRINTED), params_w, oracle, lambda: cf.eq29(s, n, w, m)))
            out.append(_evaluate(
                cf.fid(FormulaName.THM2_EQ29, Tier.AS_PRINTED, "cases"),
                params_w,
                oracle,
                lambda: sum(cf.star_fractal_cases(s, n, w, m, printed=True)),
            ))
    return out


def _last_step_within(spec: ModelSpec, cap: int, start: int = 0) -> int:
    """Largest step whose corrected vertex count stays within ``cap``; start - 1 if none."""
    counts = predicted_counts(spec)[CountSource.CORRECTED]
    last = start - 1
    for i, v in enumerate(counts.vertices):
        if v > cap:
            break
        last = counts.start_step + i
    return last


def _audit_edge_family(grid: AuditGrid, family: Family, w: int, m: int, entry: SeedEntry) -> List[AuditRecord]:
    """Multi-step closed forms and growth counts of one edge-operation family on one seed."""
    t_max = grid.tgraph_t_max if family == Family.TGRAPH else grid.t_max
    spec = ModelSpec(family=family, w=w, m=m, seed=entry.seed_spec(), t=t_max)
    last = _last_step_within(spec, grid.size_cap)
    if last < 0:
        return []
    spec = spec.with_steps(last)

    tree = entry.tree()
    trees = [tree]
    for _ in range(last):
        tree = apply_step(spec, tree)
        trees.append(tree)
    oracles = [oracle_wiener(t, grid.bfs_max_vertices) for t in trees]

    out: List[AuditRecord] = []
    try:
        results = cf.iterate_wiener(spec, oracles[0], trees[0].n)
    except (TreeAuditError, ArithmeticError) as e:
        logger.error(f"{spec.serialize()}: closed forms failed: {e}")
        results = []
    for result in results:
        params = dict(result.params, seed=entry.index)
        out.append(compare(result.formula, params, oracles[params["t"]], result.value))

    if family in _COUNT_NAME:
        for step, grown in enumerate(trees):
            params = dict(_family_params(spec), seed=entry.index, n=trees[0].n, t=step)
            out.extend(_count_records(_COUNT_NAME[family], spec, step, grown, params))
    return out


def _audit_cayley_star(grid: AuditGrid, n: int) -> List[AuditRecord]:
    out: List[AuditRecord] = []
    last = _last_step_within(ModelSpec(family=Family.CAYLEY, n=n, t=grid.cayley_t_max), grid.size_cap, start=1)
    s, s1, s2, leaves, _ = cf.cayley_star_state(n)
    for t in range(1, last + 1):
        tree = grow_cayley(n, t)
        oracle = oracle_wiener(tree, grid.bfs_max_vertices)
        params = {"n": n, "t": t}
        out.append(_evaluate(cf.fid(FormulaName.EQ45_CAYLEY), params, oracle, lambda: cf.cayley_parts(n, t).wiener))
        out.append(_evaluate(cf.fid(FormulaName.EQ45_CAYLEY, Tier.AS_PRINTED), params, oracle, lambda: cf.eq45(n, t)))
        out.append(_evaluate(cf.fid(FormulaName.EQ47_CAYLEYGEN), params, oracle, lambda: cf.cayley_general_wiener(None, n, t)))
        out.append(_evaluate(
            cf.fid(FormulaName.EQ47_CAYLEYGEN, Tier.AS_PRINTED), params, oracle, lambda: cf.eq47(s, s1, s2, leaves, n - 1, t - 1)
        ))
        out.extend(_count_records(FormulaName.EQ33_CAYLEY_COUNTS, ModelSpec(family=Family.CAYLEY, n=n, t=t), t, tree, params))
    return out


def _audit_cayley_seed(grid: AuditGrid, n: int, entry: SeedEntry) -> List[AuditRecord]:
    seed = entry.tree()
    spec = ModelSpec(family=Family.CAYLEY, n=n, seed=SeedSpec.from_edges(list(entry.edges)), t=grid.cayley_t_max)
    last = _last_step_within(spec, grid.size_cap)
    s0 = oracle_wiener(seed, grid.bfs_max_vertices)
    s1, s2, leaves = cf.seed_leaf_sums(seed)
    out: List[AuditRecord] = []
    tree = seed
    for t in range(last + 1):
        if t > 0:
            tree = grow_cayley(n, 1, tree)
        oracle = oracle_wiener(tree, grid.bfs_max_vertices)
        params = {"n": n, "t": t, "seed": entry.index, "S": s0}
        out.append(_evaluate(cf.fid(FormulaName.EQ47_CAYLEYGEN), params, oracle, lambda: cf.cayley_general_wiener(seed, n, t, s0)))
        out.append(_evaluate(
            cf.fid(FormulaName.EQ47_CAYLEYGEN, Tier.AS_PRINTED), params, oracle, lambda: cf.eq47(s0, s1, s2, leaves, n - 1, t)
        ))
        out.extend(_count_records(FormulaName.EQ33_CAYLEY_COUNTS, spec.with_steps(t), t, tree, params))
    return out


def _audit_exponential(grid: AuditGrid, m: int, entry: SeedEntry) -> List[AuditRecord]:
    seed = entry.tree()
    spec = ModelSpec(family=Family.EXPONENTIAL, m=m, seed=entry.seed_spec(), t=grid.exp_t_max)
    last = _last_step_within(spec, grid.size_cap)
    s0, v0 = oracle_wiener(seed, grid.bfs_max_vertices), seed.n
    out: List[AuditRecord] = []
    tree = seed
    for t in range(last + 1):
        if t > 0:
            tree = grow_exponential(tree, m, 1)
        oracle = oracle_wiener(tree, grid.bfs_max_vertices)
        params = {"m": m, "t": t, "seed": entry.index, "n": v0, "S": s0}
        out.append(_evaluate(cf.fid(FormulaName.EQ49_EXPONENTIAL), params, oracle, lambda: cf.exponential_wiener(s0, v0, m, t)))
        out.append(_evaluate(cf.fid(FormulaName.EQ49_EXPONENTIAL, Tier.AS_PRINTED), params, oracle, lambda: cf.eq49(s0, v0, m, t)))
        if entry.index == 0:
            edge_params = {"m": m, "t": t}
            out.append(_evaluate(cf.fid(FormulaName.EQ50_EXPEDGE), edge_params, oracle, lambda: cf.exponential_wiener(1, 2, m, t)))
            out.append(_evaluate(cf.fid(FormulaName.EQ50_EXPEDGE, Tier.AS_PRINTED), edge_params, oracle, lambda: cf.eq50(m, t)))
        out.extend(_count_records(FormulaName.EQ48_EXP_COUNTS, spec.with_steps(t), t, tree, params))
    return out


def _audit_mfpt(grid: AuditGrid, entry: SeedEntry) -> List[AuditRecord]:
    tree = entry.tree()
    s = wiener_oracle(tree)
    oracle = exact_mfpt(tree)
    params = {"seed": entry.index, "n": tree.n, "S": s}
    return [
        compare(cf.fid(FormulaName.EQ51_MFPT_LEMMA), params, oracle, Fraction(2 * s, tree.n)),
        compare(cf.fid(FormulaName.EQ51_MFPT_LEMMA, Tier.AS_PRINTED), params, oracle, Fraction(s, tree.n)),
    ]


_HANDLERS: Dict[str, Callable[..., List[AuditRecord]]] = {
    "path": _audit_path,
    "one_step": _audit_one_step,
    "edge_family": _audit_edge_family,
    "cayley_star": _audit_cayley_star,
    "cayley_seed": _audit_cayley_seed,
    "exponential": _audit_exponential,
    "mfpt": _audit_mfpt,
}

WorkItem = Tuple[str, tuple]


def work_items(grid: AuditGrid, catalogue: Optional[List[SeedEntry]] = None) -> List[WorkItem]:
    """Independent units of the sweep, in a fixed order."""
    seeds = catalogue if catalogue is not None else seed_catalogue(grid)
    named = [e for e in seeds if not e.random]
    items: List[WorkItem] = [("path", (a,)) for a in range(2, grid.path_max + 1)]
    items += [("one_step", (e,)) for e in named if e.order <= grid.one_step_max_order]

    multi = [e for e in seeds if e.random or e.order <= grid.multi_step_max_order]
    for e in multi:
        items.append(("edge_family", (Family.FIRST_ORDER_SUBDIVISION, 1, 1, e)))
        for m in grid.m_values:
            items.append(("edge_family", (Family.SUBDIVISION, 1, m, e)))
            items.append(("edge_family", (Family.STAR_FRACTAL_1M, 1, m, e)))
            for w in grid.w_values:
                items.append(("edge_family", (Family.STAR_FRACTAL, w, m, e)))
    if seeds:
        items.append(("edge_family", (Family.TGRAPH, 1, 1, seeds[0])))

    for n in grid.cayley_n_values:
        items.append(("cayley_star", (n,)))
        for e in named:
            if e.order > grid.cayley_seed_max_order:
                continue
            try:
                check_cayley_seed(e.tree(), n)
            except TreeAuditError:
                continue
            items.append(("cayley_seed", (n, e)))

    exp_seeds = [e for e in seeds if e.random or e.order <= grid.exp_seed_max_order]
    for m in grid.exp_m_values:
        items += [("exponential", (m, e)) for e in exp_seeds]

    items += [("mfpt", (e,)) for e in named if e.order <= grid.mfpt_max_order]
    return items


_ITEM_FORMULA: Dict[str, FormulaName] = {
    "path": FormulaName.LEMMA1_PATH,
    "one_step": FormulaName.LEMMA2_SUB1,
    "cayley_star": FormulaName.EQ45_CAYLEY,
    "cayley_seed": FormulaName.EQ47_CAYLEYGEN,
    "exponential": FormulaName.EQ49_EXPONENTIAL,
    "mfpt": FormulaName.EQ51_MFPT_LEMMA,
}


def _aborted(kind: str, args: tuple) -> AuditRecord:
    """Undefined placeholder for a work item whose tree could not be built."""
    params: Dict[str, int] = {}
    if kind == "edge_family":
        family, w, m, entry = args
        name = cf.CANONICAL_NAME[family]
        params = {"w": w, "m": m, "seed": entry.index}
    else:
        name = _ITEM_FORMULA[kind]
        for value in args:
            if isinstance(value, SeedEntry):
                params["seed"] = value.index
            elif kind == "path":
                params["a"] = value
            else:
                params["n" if kind.startswith("cayley") else "m"] = value
    params["aborted"] = 1
    return AuditRecord(formula=cf.fid(name), params=params, verdict=Verdict.UNDEFINED)


def run_item(item: WorkItem, grid: AuditGrid) -> List[AuditRecord]:
    kind, args = item
    try:
        return _HANDLERS[kind](grid, *args)
    except (TreeAuditError, ArithmeticError) as e:
        logger.error(f"work item {kind} aborted: {e}")
        return [_aborted(kind, args)]


def audit(grid: AuditGrid, catalogue: Optional[List[SeedEntry]] = None) -> List[AuditRecord]:
    """One AuditRecord per (formula, grid point), sorted by formula id then params."""
    items = work_items(grid, catalogue)
    if not items:
        raise BadParam("audit grid is empty")
    logger.info(f"auditing {len(items)} work items with {grid.threads} worker(s)")
    records: List[AuditRecord] = []
    if grid.threads > 1:
        with ProcessPoolExecutor(max_workers=grid.threads) as pool:
            for i, batch in enumerate(pool.map(run_item, items, repeat(grid), chunksize=8), start=1):
                records.extend(batch)
                if i % Config.AUDIT_PROGRESS_EVERY == 0:
                    logger.info(f"audit progress: {i}/{len(items)} items")
    else:
        for i, item in enumerate(items, start=1):
            records.extend(run_item(item, grid))
            if i % Config.AUDIT_PROGRESS_EVERY == 0:
                logger.info(f"audit progress: {i}/{len(items)} items")
    records.sort(key=lambda r: r.sort_key())
    logger.info(f"audit finished: {len(records)} records")
    return records


# --- Ledger -----------------------------------------------------------------

def ledger(records: Iterable[AuditRecord], registry: Optional[List[FormulaId]] = None) -> LedgerSummary:
    """Per-formula totals, pass rate and first failing point; canonical_ok when no canonical mismatch."""
    grouped: Dict[Tuple[str, str, str], List[AuditRecord]] = {}
    ids: Dict[Tuple[str, str, str], FormulaId] = {}
    for formula in registry if registry is not None else cf.REGISTRY:
        grouped.setdefault(formula.sort_key(), [])
        ids[formula.sort_key()] = formula
    for record in sorted(records, key=lambda r: r.sort_key()):
        key = record.formula.sort_key()
        grouped.setdefault(key, []).append(record)
        ids[key] = record.formula

    rows: List[LedgerRow] = []
    for key in sorted(grouped):
        group = grouped[key]
        matches = sum(1 for r in group if r.verdict == Verdict.MATCH)
        mismatches = sum(1 for r in group if r.verdict == Verdict.MISMATCH)
        decided = matches + mismatches
        first = next((r for r in group if r.verdict == Verdict.MISMATCH), None)
        rows.append(LedgerRow(
            formula=ids[key],
            total=len(group),
            matches=matches,
            mismatches=mismatches,
            undefined=len(group) - decided,
            pass_rate=matches / decided if decided else None,
            first_failure=dict(sorted(first.params.items())) if first else None,
        ))
    canonical_ok = all(r.mismatches == 0 for r in rows if r.formula.tier == Tier.CANONICAL)
    return LedgerSummary(rows=rows, canonical_ok=canonical_ok)


def ledger_text(summary: LedgerSummary) -> str:
    """Fixed-width table, one row per formula id"""
    rows = []
    for r in summary.rows:
        failure = " ".join(f"{k}={v}" for k, v in r.first_failure.items()) if r.first_failure else "-"
        rows.append([r.formula.key, r.total, r.matches, r.mismatches, r.undefined, format_rate(r.pass_rate), failure])
    table = fixed_width_table(["formula", "total", "match", "mismatch", "undefined", "pass_rate", "first_failure"], rows)
    status = "canonical: all pass" if summary.canonical_ok else "canonical: FAILURES"
    return table + status + "\n"


__all__ = [
    "SeedEntry",
    "enumerate_seeds",
    "random_seeds",
    "seed_catalogue",
    "compare",
    "work_items",
    "run_item",
    "audit",
    "ledger",
    "ledger_text",
]
