"""
Dimension and scaling analytics: fractal / walk / spectral dimensions,
persistence, growth ratios, dimension-equality solutions and scaling fits.
"""
from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from closed_forms import wiener_sequence
from config import Config
from growth_ops import edge_growth_factor, predicted_counts
from models.tree_models import (
    EDGE_FAMILIES,
    BadParam,
    CountSource,
    DeltaVReport,
    DimensionKind,
    DimensionTriple,
    DimSolution,
    Family,
    InsufficientPoints,
    MeanDistancePoint,
    ModelSpec,
    Persistence,
    ScalingFit,
    SeedKind,
)
from tree_core import Tree, oracle_wiener

logger = logging.getLogger(__name__)

FRACTAL_FAMILIES = frozenset({Family.TGRAPH, Family.STAR_FRACTAL_1M, Family.STAR_FRACTAL})


def _ln(value: Fraction) -> float:
    # math.log accepts arbitrarily large ints
    return math.log(value.numerator) - math.log(value.denominator)


def _length_factor(spec: ModelSpec) -> int:
    """Per-step growth of distances (and of the diameter) for edge-operation families."""
    if spec.family == Family.SUBDIVISION:
        return spec.m + 1
    if spec.family == Family.STAR_FRACTAL:
        return spec.w + 1
    return 2


def _wiener_factor(spec: ModelSpec) -> int:
    """Leading per-step factor of S for edge-operation families."""
    g = edge_growth_factor(spec)
    return _length_factor(spec) * g * g


def model_dimensions(spec: ModelSpec) -> DimensionTriple:
    if spec.family in FRACTAL_FAMILIES:
        d_f = math.log(edge_growth_factor(spec)) / math.log(_length_factor(spec))
        d_w = 1.0 + d_f
        return DimensionTriple(kind=DimensionKind.FRACTAL, d_f=d_f, d_w=d_w, d_spectral=2.0 * d_f / d_w)
    if spec.family in (Family.CAYLEY, Family.EXPONENTIAL):
        return DimensionTriple(kind=DimensionKind.INFINITE)
    return DimensionTriple(kind=DimensionKind.NOT_FRACTAL)


def persistence(spec: ModelSpec) -> Persistence:
    dims = model_dimensions(spec)
    if dims.kind != DimensionKind.FRACTAL or dims.d_spectral is None:
        return Persistence.NOT_APPLICABLE
    return Persistence.PERSISTENT if dims.d_spectral < 2 else Persistence.NOT_PERSISTENT


def _vertex_growth(spec: ModelSpec) -> int:
    if spec.family == Family.CAYLEY:
        return spec.n - 1
    if spec.family == Family.EXPONENTIAL:
        return spec.m + 1
    return edge_growth_factor(spec)


def _printed_delta_v(spec: ModelSpec) -> Optional[Fraction]:
    printed = {
        Family.FIRST_ORDER_SUBDIVISION: 1,
        Family.SUBDIVISION: spec.m,
        Family.STAR_FRACTAL_1M: spec.m + 1,
        Family.STAR_FRACTAL: spec.w * (spec.m + 1),
        Family.TGRAPH: 3,
        Family.CAYLEY: spec.n - 2,
        Family.EXPONENTIAL: spec.m,
    }
    value = printed.get(spec.family)
    return None if value is None else Fraction(value)


def delta_v(spec: ModelSpec, empirical_t: Optional[int] = None) -> DeltaVReport:
    """Limit of (|V_t| - |V_{t-1}|) / |V_{t-1}|, plus its value at a finite step."""
    t = empirical_t if empirical_t is not None else (spec.t if spec.t > 0 else 8)
    if spec.family == Family.CAYLEY and spec.seed.kind == SeedKind.STAR:
        t = max(t, 2)
    t = max(t, 1)
    counts = predicted_counts(spec.with_steps(t))[CountSource.CORRECTED]
    v_now, _ = counts.at(t)
    v_prev, _ = counts.at(t - 1)
    return DeltaVReport(
        limit=Fraction(_vertex_growth(spec) - 1),
        empirical=Fraction(v_now - v_prev, v_prev),
        empirical_t=t,
        printed=_printed_delta_v(spec),
    )


def _is_power(value: int, base: int) -> Optional[int]:
    """k with base**k == value, if any (k >= 1)."""
    if base < 2 or value < base:
        return None
    k, p = 0, 1
    while p < value:
        p *= base
        k += 1
    return k if p == value else None


def equivalent_m(w: int, n: int) -> Optional[int]:
    """m = 2^{log_{w+1}[w(n+1)+1]} - 2 when the logarithm is an exact integer."""
    k = _is_power(w * (n + 1) + 1, w + 1)
    return None if k is None else 2 ** k - 2


def dim_equality_scan(w_max: int, m_max: int, n_max: int) -> List[DimSolution]:
    """Integer (w, n, m) with ln(m+2)/ln2 = ln[w(n+1)+1]/ln(w+1), decided with exact powers.

    Either m + 2 = 2^k and w(n+1)+1 = (w+1)^k, or w + 1 = 2^j and w(n+1)+1 = (m+2)^j.
    """
    if min(w_max, m_max, n_max) < 1:
        raise BadParam("scan bounds must be >= 1")
    out: List[DimSolution] = []
    for w in range(1, w_max + 1):
        j = _is_power(w + 1, 2)
        for n in range(1, n_max + 1):
            x = w * (n + 1) + 1
            k_x = _is_power(x, w + 1)
            for m in range(1, m_max + 1):
                rules = []
                k = _is_power(m + 2, 2)
                if k is not None and k_x == k:
                    rules.append("m+2=2^k")
                if j is not None and (m + 2) ** j == x:
                    rules.append("w+1=2^j")
                if rules:
                    out.append(DimSolution(w=w, n=n, m=m, d_f=math.log(m + 2) / math.log(2), rule=",".join(rules)))
    logger.debug(f"dimension scan w<={w_max} m<={m_max} n<={n_max}: {len(out)} solutions")
    return out


def _printed_exponent(spec: ModelSpec) -> Optional[float]:
    if spec.family in (Family.FIRST_ORDER_SUBDIVISION, Family.SUBDIVISION):
        return 2.0
    if spec.family == Family.STAR_FRACTAL_1M:
        return math.log(2 * (spec.m + 2)) / math.log(2)
    if spec.family == Family.STAR_FRACTAL:
        w, m = spec.w, spec.m
        return math.log((w + 1) * (m * (w + 1) + 1)) / math.log(w + 1)
    if spec.family == Family.TGRAPH:
        return math.log(6) / math.log(2)
    if spec.family == Family.CAYLEY:
        return (spec.n / (spec.n - 2)) ** 2
    if spec.family == Family.EXPONENTIAL:
        return 4 * spec.m / (spec.m + 1)
    return None


def _linear_fit(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    residual = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(residual ** 2)) / ss_tot
    return float(slope), min(max(r_squared, 0.0), 1.0)


def scaling_fit(spec: ModelSpec, t_values: Sequence[int]) -> ScalingFit:
    """Fit the MFPT (= 2S/|V| from the closed forms) against the model size.

    Power-law families regress ln MFPT on ln |V|; Cayley and exponential trees
    regress MFPT/|V| on t.
    """
    steps = sorted(set(int(t) for t in t_values))
    if len(steps) < 3:
        raise InsufficientPoints(f"scaling fit needs at least 3 distinct steps, got {len(steps)}")
    if steps[0] < 0:
        raise BadParam("steps must be >= 0")
    if spec.family == Family.CAYLEY and spec.seed.kind == SeedKind.STAR and steps[0] < 1:
        raise BadParam("the star-seeded Cayley tree starts at t=1")

    sequence = {step: (v, s) for step, v, s in wiener_sequence(spec.with_steps(steps[-1]))}
    points: List[Tuple[float, float]] = []

    if spec.family in EDGE_FAMILIES:
        for t in steps:
            v, s = sequence[t]
            points.append((math.log(v), _ln(Fraction(2 * s, v))))
        exponent, r_squared = _linear_fit([p[0] for p in points], [p[1] for p in points])
        g_v = edge_growth_factor(spec)
        ratio = _wiener_factor(spec) / g_v
        return ScalingFit(
            exponent=exponent,
            r_squared=r_squared,
            analytic_exponent=math.log(ratio) / math.log(g_v),
            printed_exponent=_printed_exponent(spec),
            diameter_exponent=math.log(ratio) / math.log(_length_factor(spec)),
            regression="loglog",
            points=points,
        )

    for t in steps:
        v, s = sequence[t]
        points.append((float(t), float(Fraction(2 * s, v * v))))
    exponent, r_squared = _linear_fit([p[0] for p in points], [p[1] for p in points])
    analytic = _log_family_slope(spec)
    return ScalingFit(
        exponent=exponent,
        r_squared=r_squared,
        analytic_exponent=analytic,
        printed_exponent=_printed_exponent(spec),
        diameter_exponent=None,
        regression="linear_t",
        points=points,
    )


def _log_family_slope(spec: ModelSpec) -> float:
    """Per-step growth of the mean distance (and of MFPT/|V|) for Cayley and exponential trees."""
    return 2.0 if spec.family == Family.CAYLEY else 2 * spec.m / (spec.m + 1)


def avg_distance(tree: Tree) -> Fraction:
    if tree.n < 2:
        raise BadParam("average distance needs at least two vertices")
    s = oracle_wiener(tree, Config.EXACT_SOLVE_MAX_VERTICES)
    return Fraction(2 * s, tree.n * (tree.n - 1))


def mean_distance_series(spec: ModelSpec, t_values: Sequence[int]) -> List[MeanDistancePoint]:
    """Mean distance against ln|V| for the logarithmic families.

    The ratio tends to (per-step mean-distance growth) / ln g_V: 2 / ln(n-1) for
    Cayley trees, 2m / ((m+1) ln(m+1)) for exponential trees.
    """
    if spec.family not in (Family.CAYLEY, Family.EXPONENTIAL):
        raise BadParam(f"mean-distance series is defined for cayley and exponential, not {spec.family.value}")
    steps = sorted(set(int(t) for t in t_values))
    if not steps:
        return []
    sequence = {step: (v, s) for step, v, s in wiener_sequence(spec.with_steps(steps[-1]))}
    limit = _log_family_slope(spec) / math.log(_vertex_growth(spec))
    out: List[MeanDistancePoint] = []
    for t in steps:
        if t not in sequence:
            raise BadParam(f"step {t} is outside the model's range")
        v, s = sequence[t]
        mean = float(Fraction(2 * s, v * (v - 1)))
        out.append(MeanDistancePoint(t=t, vertices=v, mean_distance=mean, ratio_to_log_v=mean / math.log(v), limit=limit))
    return out


__all__ = [
    "FRACTAL_FAMILIES",
    "model_dimensions",
    "persistence",
    "delta_v",
    "equivalent_m",
    "dim_equality_scan",
    "scaling_fit",
    "avg_distance",
    "mean_distance_series",
]
