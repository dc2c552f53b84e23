"""
Exact closed-form Wiener indices for subdivision, star-fractal, T-graph,
Cayley and exponential trees.

Two tiers are kept side by side:

* canonical: one-step recursions that agree with the oracle on every tree,
  iterated t times with the updated (S, n);
* as printed: the published multi-step closed forms, evaluated verbatim so the
  audit can compare them against the oracle.

All arithmetic is int / Fraction. Nothing here touches floating point.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from growth_ops import check_cayley_seed, resolve_seed
from models.tree_models import (
    BadParam,
    CayleyParts,
    Family,
    FormulaDivergence,
    FormulaId,
    FormulaName,
    FormulaResult,
    ModelSpec,
    SeedKind,
    Tier,
)
from tree_core import Tree, bfs_distances, wiener_oracle

logger = logging.getLogger(__name__)


def fid(name: FormulaName, tier: Tier = Tier.CANONICAL, variant: Optional[str] = None) -> FormulaId:
    return FormulaId(name=name, tier=tier, variant=variant)


# Every formula the audit ledger must cover
REGISTRY: List[FormulaId] = [
    fid(FormulaName.LEMMA1_PATH), fid(FormulaName.LEMMA1_PATH, Tier.AS_PRINTED),
    fid(FormulaName.LEMMA2_SUB1), fid(FormulaName.LEMMA2_SUB1, Tier.AS_PRINTED),
    fid(FormulaName.LEMMA2_SUB1, Tier.AS_PRINTED, "cases"),
    fid(FormulaName.COR1_SUB1_T), fid(FormulaName.COR1_SUB1_T, Tier.AS_PRINTED),
    fid(FormulaName.COR2_EDGESUB1_T), fid(FormulaName.COR2_EDGESUB1_T, Tier.AS_PRINTED),
    fid(FormulaName.THM1_SUBM), fid(FormulaName.THM1_SUBM, Tier.AS_PRINTED),
    fid(FormulaName.THM1_SUBM, Tier.AS_PRINTED, "cases"),
    fid(FormulaName.COR3_SUBM_T),
    fid(FormulaName.COR3_SUBM_T, Tier.AS_PRINTED, "2n-1"),
    fid(FormulaName.COR3_SUBM_T, Tier.AS_PRINTED, "2m-1"),
    fid(FormulaName.LEMMA3_STAR1M), fid(FormulaName.LEMMA3_STAR1M, Tier.AS_PRINTED),
    fid(FormulaName.COR4_STAR1M_T), fid(FormulaName.COR4_STAR1M_T, Tier.AS_PRINTED),
    fid(FormulaName.THM2_EQ22), fid(FormulaName.THM2_EQ22, Tier.AS_PRINTED),
    fid(FormulaName.THM2_EQ29), fid(FormulaName.THM2_EQ29, Tier.AS_PRINTED),
    fid(FormulaName.THM2_EQ29, Tier.AS_PRINTED, "cases"),
    fid(FormulaName.COR5_STARWM_T), fid(FormulaName.COR5_STARWM_T, Tier.AS_PRINTED),
    fid(FormulaName.EQ31_TGRAPH), fid(FormulaName.EQ31_TGRAPH, Tier.AS_PRINTED),
    fid(FormulaName.EQ45_CAYLEY), fid(FormulaName.EQ45_CAYLEY, Tier.AS_PRINTED),
    fid(FormulaName.EQ47_CAYLEYGEN), fid(FormulaName.EQ47_CAYLEYGEN, Tier.AS_PRINTED),
    fid(FormulaName.EQ49_EXPONENTIAL), fid(FormulaName.EQ49_EXPONENTIAL, Tier.AS_PRINTED),
    fid(FormulaName.EQ50_EXPEDGE), fid(FormulaName.EQ50_EXPEDGE, Tier.AS_PRINTED),
] + [
    fid(name, tier, quantity)
    for name in (
        FormulaName.EQ4_SUB1_COUNTS,
        FormulaName.EQ5_SUBM_COUNTS,
        FormulaName.EQ6_STAR1M_COUNTS,
        FormulaName.EQ7_STARWM_COUNTS,
        FormulaName.EQ33_CAYLEY_COUNTS,
        FormulaName.EQ48_EXP_COUNTS,
    )
    for tier in (Tier.CANONICAL, Tier.AS_PRINTED)
    for quantity in ("vertices", "edges")
] + [
    fid(FormulaName.EQ51_MFPT_LEMMA), fid(FormulaName.EQ51_MFPT_LEMMA, Tier.AS_PRINTED),
]


def _power_sum(m: int, p: int) -> int:
    return sum(i ** p for i in range(1, m + 1))


def _as_int(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise ArithmeticError(f"{what} evaluated to non-integer {value}")
    return value.numerator


def _check_positive(**params: int) -> None:
    for key, value in params.items():
        if value < 1:
            raise BadParam(f"{key} must be >= 1, got {value}")


# --- Paths ------------------------------------------------------------------

def path_wiener(a: int) -> int:
    """Wiener index of the path on ``a`` vertices, (a^3 - a) / 6."""
    if a < 2:
        raise BadParam(f"path order must be >= 2, got {a}")
    return (a ** 3 - a) // 6


def path_wiener_double_sum(a: int) -> int:
    if a < 2:
        raise BadParam(f"path order must be >= 2, got {a}")
    return sum(sum(range(1, a - i + 1)) for i in range(1, a))


# --- m-th order subdivision -------------------------------------------------

def lemma2(s: int, n: int) -> int:
    return 8 * s - 2 * n * (n - 1)


def lemma2_cases(s: int, n: int) -> Tuple[int, int, int]:
    """Old-old, new-new and old-new pair sums after one first-order subdivision."""
    old = 2 * s
    new = old - n * (n - 1)
    crossing = 2 * new + n * (n - 1)
    return old, new, crossing


def eq15(s: int, n: int, m: int) -> Fraction:
    _check_positive(m=m)
    return (
        (m + 1) ** 3 * Fraction(s)
        - Fraction(2 * n * n * _power_sum(m, 3), m)
        + 2 * n * _power_sum(m, 2)
        - Fraction(m + 1, 2 * m - 1) * _power_sum(m - 1, 2)
    )


def subdivision_cases(s: int, n: int, m: int, printed: bool = False) -> Tuple[int, int, int]:
    """Pair sums of the m-th order subdivision: old-old, new-new, old-new.

    ``printed=True`` uses the published crossing-pair multiplier 2n instead of 2m.
    """
    _check_positive(m=m)
    old = (m + 1) * s
    inner = sum(sum(range(1, m - i + 1)) for i in range(1, m))
    new = m * m * old + (n - 1) * inner - n * (n - 1) * (m + 1) * m * m // 2
    factor = 2 * n if printed else 2 * m
    crossing = factor * old - n * (n - 1) * _power_sum(m, 1)
    return old, new, crossing


def step_subdivision(s: int, n: int, m: int) -> Tuple[int, int]:
    """One m-th order subdivision step: (S', n')."""
    _check_positive(m=m)
    if n < 1:
        raise BadParam(f"seed order must be >= 1, got {n}")
    return _as_int(eq15(s, n, m), "subdivision step"), n + m * (n - 1)


def eq13(s: int, n: int, t: int) -> Fraction:
    return (
        8 ** t * Fraction(s)
        - Fraction(2 ** (3 * t) - 2 ** t, 3) * (n - 1)
        + (Fraction(2) ** (2 * t - 1) - Fraction(2) ** (3 * t - 1)) * (n - 1) ** 2
    )


def eq14(t: int) -> Fraction:
    q = Fraction(2) ** t
    return (q + 1) * q * (Fraction(2) ** (t - 1) + 1) / 3


def eq19(s: int, n: int, m: int, t: int, denominator: str = "2n-1") -> Fraction:
    """Published t-step m-th subdivision form; ``denominator`` picks the 2n-1 or 2m-1 reading."""
    _check_positive(m=m)
    if denominator not in ("2n-1", "2m-1"):
        raise BadParam(f"unknown denominator variant {denominator!r}")
    q = Fraction(m + 1)
    c3 = _power_sum(m, 3)
    c2 = _power_sum(m, 2)
    c2_low = _power_sum(m - 1, 2)
    js = range(t)
    den = 2 * n - 1 if denominator == "2n-1" else 2 * m - 1
    return (
        q ** (3 * t) * s
        - Fraction(2 * (n - 1) ** 2 * c3, m) * sum(q ** (2 * (t - 1) + j) for j in js)
        - Fraction(4 * (n - 1) * c3, m) * sum(q ** (2 * (t + j) - 1) for j in js)
        - Fraction(2 * c3, m) * sum(q ** (3 * j) for j in js)
        + 2 * (n - 1) * c2 * sum(q ** (t + 2 * j - 1) for j in js)
        - q / den * c2_low * sum(q ** (3 * j) for j in js)
        + 2 * c2 * sum(q ** (3 * j) for j in js)
    )


# --- (w, m)-star-fractal ----------------------------------------------------

def lemma3(s: int, n: int, m: int) -> int:
    _check_positive(m=m)
    return 2 * (m + 2) ** 2 * s - (m + 2) * (n - 1) * (m + n)


def eq21(s: int, n: int, m: int, t: int) -> Fraction:
    r = Fraction(m + 2)
    return (
        2 ** t * r ** (2 * t) * s
        - (2 ** t - 1) * r ** (2 * t - 1) * (n * n - 2 * n - 1)
        - Fraction((m + 1) * (n - 1), 2) * (2 ** (t + 1) * r ** (2 * t) - 2 * r ** t) / (2 * m + 3)
    )


def thm2_psi(w: int, m: int, printed: bool = False) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """Coefficients of S' = psi1 S - psi2 n^2 + psi3 n - psi4.

    The published psi3 ends in ``+2``; the value that agrees with the oracle ends in ``-2``.
    """
    _check_positive(w=w, m=m)
    r = m + 1
    psi1 = Fraction((w + 1) * (w * r + 1) ** 2)
    psi2 = Fraction(w, 2) * (r * r * w * w - (m - 2) * r * w - (m - 1))
    constant = m * m + 11 * m + (2 if printed else -2)
    psi3 = Fraction(w, 6) * (4 * r * r * w * w - 3 * r * (3 * m - 2) * w - constant)
    psi4 = Fraction(w, 6) * (r * r * w * w - 6 * m * r * w - (m * m + 8 * m + 1))
    return psi1, psi2, psi3, psi4


def eq22(s: int, n: int, w: int, m: int, printed: bool = True) -> Fraction:
    psi1, psi2, psi3, psi4 = thm2_psi(w, m, printed=printed)
    return psi1 * s - psi2 * n * n + psi3 * n - psi4


def eq29(s: int, n: int, w: int, m: int) -> Fraction:
    """The published grouped form of the seven case sums, verbatim."""
    _check_positive(w=w, m=m)
    F = Fraction
    return (
        ((w + 1) ** 3 + w * m * (w + 1) * (w * m + 2 * w + 2)) * F(s)
        - (F(w * (w + 1) ** 2, 2) + F(w * m * (w - 1) * (w * m + 1), 2) + m * w ** 3) * n * n
        + (F(w * (w + 1) * (2 * w + 1), 3) + F(w * (4 * w * w - 9 * w - 7) * m * m, 6)) * n
        + (w * m * (m - 1) + F(w * m * (w - 1) * (8 * w + 5), 2)) * n
        - (F((w - 7) * w * (w + 1) * m * m, 6) + F(w * m * (w * w - 3 * w - 1), 3))
        - (w * m * (m - 1) + F((w - 1) * w * (w + 1), 6))
    )


def star_fractal_cases(s: int, n: int, w: int, m: int, printed: bool = False) -> Tuple[int, ...]:
    """The seven pair-class sums of one (w, m)-star-fractal step.

    Order: old-old, centre-centre, same-star leaves, old-centre, old-leaf,
    leaf-leaf across stars, centre-leaf. ``printed=True`` reproduces the
    published old-centre multiplier (2n) and the centre-leaf reference to the
    same-star leaf sum.
    """
    _check_positive(w=w, m=m)
    c1 = (w + 1) * s
    inner = sum(sum(range(1, w - i + 1)) for i in range(1, w))
    c2 = w * w * c1 + (n - 1) * inner - n * (n - 1) * (w + 1) * w * w // 2
    c3 = w * m * (m - 1) * (n - 1)
    c4 = (2 * n if printed else 2 * w) * c1 - n * (n - 1) * _power_sum(w, 1)
    c5 = m * c4 + w * m * n * (n - 1)
    big_w = w * (n - 1)
    c6 = m * m * c2 + sum(2 * m * m * (big_w - i) for i in range(1, big_w))
    c7 = 2 * m * (c3 if printed else c2) + m * big_w ** 2
    return c1, c2, c3, c4, c5, c6, c7


def step_star_fractal(s: int, n: int, w: int, m: int) -> Tuple[int, int]:
    """One (w, m)-star-fractal step: (S', n')."""
    _check_positive(w=w, m=m)
    if n < 1:
        raise BadParam(f"seed order must be >= 1, got {n}")
    return sum(star_fractal_cases(s, n, w, m)), n + w * (m + 1) * (n - 1)


def eq30(s: int, n: int, w: int, m: int, t: int) -> Optional[Fraction]:
    """Published t-step star-fractal form; None where its vertex term divides by mw - 1 = 0."""
    mw = m * w
    if mw == 1:
        return None
    psi1, psi2, psi3, psi4 = thm2_psi(w, m, printed=True)
    shift = Fraction(mw, mw - 1)
    total = psi1 ** t * s
    for i in range(t):
        v = Fraction(mw) ** (t - 1 - i) * (n - shift) + shift
        total += psi1 ** i * (-psi4 - psi2 * v * v + psi3 * v)
    return total


# --- T-graph ----------------------------------------------------------------

def eq31(t: int) -> Fraction:
    three = Fraction(3)
    return three ** t + Fraction(2 ** (t + 2) + 5, 5) * three ** (2 * t - 1) - three ** (t + 1) / 5


def tgraph_wiener(t: int) -> Fraction:
    """T-graph Wiener index by the published closed form."""
    if t < 0:
        raise BadParam(f"steps must be >= 0, got {t}")
    return eq31(t)


# --- Iteration over edge-operation families ---------------------------------

def _one_step(family: Family, s: int, n: int, w: int, m: int) -> Tuple[int, int]:
    if family == Family.FIRST_ORDER_SUBDIVISION:
        return lemma2(s, n), 2 * n - 1
    if family == Family.SUBDIVISION:
        return step_subdivision(s, n, m)
    if family == Family.STAR_FRACTAL_1M:
        return lemma3(s, n, m), n + (m + 1) * (n - 1)
    if family == Family.TGRAPH:
        return step_star_fractal(s, n, 1, 1)
    if family == Family.STAR_FRACTAL:
        return step_star_fractal(s, n, w, m)
    raise BadParam(f"{family.value} is not an edge-operation family")


CANONICAL_NAME: Dict[Family, FormulaName] = {
    Family.FIRST_ORDER_SUBDIVISION: FormulaName.COR1_SUB1_T,
    Family.SUBDIVISION: FormulaName.COR3_SUBM_T,
    Family.STAR_FRACTAL_1M: FormulaName.COR4_STAR1M_T,
    Family.STAR_FRACTAL: FormulaName.COR5_STARWM_T,
    Family.TGRAPH: FormulaName.EQ31_TGRAPH,
}


def canonical_sequence(spec: ModelSpec, s0: int, n0: int) -> List[Tuple[int, int]]:
    """[(S_i, n_i)] for i = 0..spec.t by iterating the verified one-step result."""
    out = [(s0, n0)]
    s, n = s0, n0
    for _ in range(spec.t):
        s, n = _one_step(spec.family, s, n, spec.w, spec.m)
        out.append((s, n))
    return out


def as_printed_multistep(spec: ModelSpec, s0: int, n0: int, t: int) -> List[FormulaResult]:
    """Published t-step forms matching the family, evaluated at step t."""
    F = spec.family
    params = {"S": s0, "n": n0, "t": t}
    out: List[FormulaResult] = []
    if F == Family.FIRST_ORDER_SUBDIVISION:
        out.append(FormulaResult(formula=fid(FormulaName.COR1_SUB1_T, Tier.AS_PRINTED), params=params, value=eq13(s0, n0, t)))
        if spec.seed.kind == SeedKind.EDGE:
            out.append(FormulaResult(formula=fid(FormulaName.COR2_EDGESUB1_T, Tier.AS_PRINTED), params={"t": t}, value=eq14(t)))
    elif F == Family.SUBDIVISION:
        p = dict(params, m=spec.m)
        for variant in ("2n-1", "2m-1"):
            out.append(FormulaResult(
                formula=fid(FormulaName.COR3_SUBM_T, Tier.AS_PRINTED, variant),
                params=p,
                value=eq19(s0, n0, spec.m, t, variant),
            ))
    elif F == Family.STAR_FRACTAL_1M:
        out.append(FormulaResult(
            formula=fid(FormulaName.COR4_STAR1M_T, Tier.AS_PRINTED),
            params=dict(params, m=spec.m),
            value=eq21(s0, n0, spec.m, t),
        ))
    elif F == Family.STAR_FRACTAL:
        out.append(FormulaResult(
            formula=fid(FormulaName.COR5_STARWM_T, Tier.AS_PRINTED),
            params=dict(params, w=spec.w, m=spec.m),
            value=eq30(s0, n0, spec.w, spec.m, t),
        ))
    elif F == Family.TGRAPH:
        out.append(FormulaResult(formula=fid(FormulaName.EQ31_TGRAPH, Tier.AS_PRINTED), params={"t": t}, value=eq31(t)))
    return out


def iterate_wiener(spec: ModelSpec, s0: Optional[int] = None, n0: Optional[int] = None) -> List[FormulaResult]:
    """Canonical value for each step 0..spec.t, each followed by the published forms at that step."""
    if spec.family not in CANONICAL_NAME:
        raise BadParam(f"iterate_wiener covers edge-operation families, not {spec.family.value}")
    if s0 is None or n0 is None:
        seed = resolve_seed(spec)
        assert seed is not None
        s0, n0 = wiener_oracle(seed), seed.n
    name = CANONICAL_NAME[spec.family]
    results: List[FormulaResult] = []
    for step, (s, _) in enumerate(canonical_sequence(spec, s0, n0)):
        params = {"S": s0, "n": n0, "t": step}
        if spec.family in (Family.SUBDIVISION, Family.STAR_FRACTAL_1M, Family.STAR_FRACTAL):
            params["m"] = spec.m
        if spec.family == Family.STAR_FRACTAL:
            params["w"] = spec.w
        results.append(FormulaResult(formula=fid(name), params=params, value=Fraction(s)))
        if spec.family == Family.FIRST_ORDER_SUBDIVISION and spec.seed.kind == SeedKind.EDGE:
            results.append(FormulaResult(formula=fid(FormulaName.COR2_EDGESUB1_T), params={"t": step}, value=Fraction(s)))
        results.extend(as_printed_multistep(spec, s0, n0, step))
    return results


# --- Cayley trees -----------------------------------------------------------

def _check_cayley(n: int, t: int) -> None:
    if n < 3:
        raise BadParam(f"Cayley coordination number must be >= 3, got {n}")
    if t < 1:
        raise BadParam(f"Cayley steps must be >= 1, got {t}")


def cayley_vertices(n: int, t: int) -> int:
    _check_cayley(n, t)
    return (n * (n - 1) ** t - 2) // (n - 2)


def ingredient_order(n: int, t: int) -> int:
    """Vertices of one rooted ingredient A_t."""
    _check_cayley(n, t)
    return ((n - 1) ** t + n - 3) // (n - 2)


def cayley_parts(n: int, t: int) -> CayleyParts:
    """Intermediates by the self-similar recursion from theta = gamma = 1, omega12 = 2 at t = 1."""
    _check_cayley(n, t)
    theta, omega12, gamma = 1, 2, 1
    for step in range(2, t + 1):
        a = ingredient_order(n, step)
        prev_omega = omega12
        theta = (n - 1) * theta + a - 1
        gamma = (n - 1) * gamma + (n - 1) * (n - 2) // 2 * prev_omega + theta
        omega12 = 2 * (a - 1) * theta
    wiener = n * gamma + n * (n - 1) // 2 * omega12
    return CayleyParts(
        n=n,
        t=t,
        ingredient_order=ingredient_order(n, t),
        theta=Fraction(theta),
        omega12=Fraction(omega12),
        gamma=Fraction(gamma),
        wiener=Fraction(wiener),
        vertices=cayley_vertices(n, t),
    )


def cayley_parts_closed(n: int, t: int) -> CayleyParts:
    """Intermediates by the published closed forms."""
    _check_cayley(n, t)
    q = Fraction(n - 1)
    d = Fraction(n - 2)
    theta = (((n - 2) * t - 1) * q ** t + 1) / d ** 2
    omega12 = 2 / d ** 3 * (((n - 2) * t - 1) * q ** (2 * t) - ((n - 2) * t - 2) * q ** t - 1)
    gamma = (
        q ** (t - 1)
        + ((t - 1) * q ** (t + 1) - q ** (t - 1) + 1) / d ** 2
        + (((n - 2) * t - n) * q ** (2 * t) + 2 * q ** (t + 1)) / d ** 3
    )
    return CayleyParts(
        n=n,
        t=t,
        ingredient_order=ingredient_order(n, t),
        theta=theta,
        omega12=omega12,
        gamma=gamma,
        wiener=eq45(n, t),
        vertices=cayley_vertices(n, t),
    )


def eq45(n: int, t: int) -> Fraction:
    _check_cayley(n, t)
    q = Fraction(n - 1)
    d = Fraction(n - 2)
    return (
        n * q ** (t - 1)
        + (n * (t - 1) * q ** (t + 1) - n * q ** (t - 1) + n) / d ** 2
        + (n * ((n - 2) * t - n) * q ** (2 * t) + 2 * n * q ** (t + 1)) / d ** 3
        + Fraction(n * (n - 1)) / d ** 3 * (((n - 2) * t - 1) * q ** (2 * t) - ((n - 2) * t - 2) * q ** t - 1)
    )


def cayley_wiener(n: int, t: int) -> int:
    """Wiener index of C(t, n) from the recursion, cross-checked against the closed form."""
    parts = cayley_parts(n, t)
    closed = eq45(n, t)
    if closed != parts.wiener:
        raise FormulaDivergence(f"Cayley recursion {parts.wiener} and closed form {closed} disagree at n={n}, t={t}")
    return _as_int(parts.wiener, "Cayley recursion")


def seed_leaf_sums(tree: Tree) -> Tuple[int, int, int]:
    """(leaf-to-internal distance sum, leaf-pair distance sum, leaf count)."""
    leaves = tree.leaves()
    is_leaf = [False] * tree.n
    for u in leaves:
        is_leaf[u] = True
    s1 = 0
    s2_ordered = 0
    for u in leaves:
        dist = bfs_distances(tree, u).dist
        for v in range(tree.n):
            if is_leaf[v]:
                s2_ordered += dist[v]
            else:
                s1 += dist[v]
    return s1, s2_ordered // 2, len(leaves)


def cayley_star_state(n: int) -> Tuple[int, int, int, int, int]:
    """(S, S1, S2, leaves, vertices) of the star K_{1,n}."""
    return n * n, n, n * (n - 1), n, n + 1


def cayley_general_sequence(s: int, s1: int, s2: int, leaves: int, vertices: int, psi: int, t: int) -> List[int]:
    """Wiener index after 0..t leaf-growth steps, each leaf gaining ``psi`` children per step."""
    out = [s]
    for _ in range(t):
        s1, s2 = psi * (s1 + 2 * s2) + psi * leaves * vertices, psi * psi * s2 + psi * psi * leaves * leaves - psi * leaves
        s = s + s1 + s2
        vertices += psi * leaves
        leaves *= psi
        out.append(s)
    return out


def cayley_general_wiener(seed: Optional[Tree], n: int, t: int, s0: Optional[int] = None) -> int:
    """Wiener index after t leaf-growth steps from ``seed`` (None: the star, counted as step 1)."""
    if n < 3:
        raise BadParam(f"Cayley coordination number must be >= 3, got {n}")
    if seed is None:
        _check_cayley(n, t)
        state = cayley_star_state(n)
        steps = t - 1
    else:
        if t < 0:
            raise BadParam(f"steps must be >= 0, got {t}")
        check_cayley_seed(seed, n)
        s1, s2, leaves = seed_leaf_sums(seed)
        state = (wiener_oracle(seed) if s0 is None else s0, s1, s2, leaves, seed.n)
        steps = t
    return cayley_general_sequence(*state, psi=n - 1, t=steps)[-1]


def eq47(s: int, s1: int, s2: int, leaves: int, psi: int, t: int) -> Fraction:
    """The published expanded sum, with |dV_j| = psi^j * leaves."""
    def dv(j: int) -> int:
        return psi ** j * leaves

    def bracket(i: int) -> int:
        return (
            psi ** (2 * i) * s2
            + sum(psi ** (2 * j + 2) * dv(i - 1 - j) ** 2 for j in range(i))
            - sum(psi ** (2 * j + 1) * dv(i - 1 - j) for j in range(i))
        )

    total = s
    for i in range(1, t + 1):
        total += psi ** i * s1 + sum(2 * psi ** (i - j) * dv(j) for j in range(i))
        total += bracket(i)
    for l in range(1, t + 1):
        total += sum(psi ** (l - i) * bracket(i) for i in range(l))
    return Fraction(total)


# --- Exponential trees ------------------------------------------------------

def exponential_step(s: int, v: int, m: int) -> Tuple[int, int]:
    """Every vertex gains m leaves: (S', |V'|)."""
    _check_positive(m=m)
    return (m + 1) ** 2 * s + m * (m + 1) * v * v - m * v, (m + 1) * v


def exponential_wiener(s0: int, v0: int, m: int, t: int) -> int:
    _check_positive(m=m)
    if t < 0:
        raise BadParam(f"steps must be >= 0, got {t}")
    s, v = s0, v0
    for _ in range(t):
        s, v = exponential_step(s, v, m)
    return s


def eq49(s0: int, v0: int, m: int, t: int) -> Fraction:
    _check_positive(m=m)
    q = m + 1

    def order(j: int) -> int:
        return q ** j * v0

    return Fraction(
        q ** (2 * t) * s0
        + m * q * sum(q ** (2 * i) * order(t - i - 1) ** 2 for i in range(t))
        - m * sum(q ** (2 * i) * order(t - i - 1) for i in range(t))
    )


def eq50(m: int, t: int) -> Fraction:
    _check_positive(m=m)
    q = Fraction(m + 1)
    return q ** (t - 1) * (2 + (4 * m * t + m - 1) * q ** t)


# --- Any family -------------------------------------------------------------

def wiener_sequence(spec: ModelSpec) -> List[Tuple[int, int, int]]:
    """[(step, |V|, S)] from the canonical closed forms, without building the tree."""
    seed = resolve_seed(spec)
    if spec.family == Family.CAYLEY:
        psi = spec.n - 1
        if seed is None:
            s, s1, s2, leaves, v = cayley_star_state(spec.n)
            start = 1
        else:
            s1, s2, leaves = seed_leaf_sums(seed)
            s, v = wiener_oracle(seed), seed.n
            start = 0
        out = []
        for step, value in enumerate(cayley_general_sequence(s, s1, s2, leaves, v, psi, spec.t - start)):
            out.append((start + step, v, value))
            v += psi * leaves
            leaves *= psi
        return out
    assert seed is not None
    s0, n0 = wiener_oracle(seed), seed.n
    if spec.family == Family.EXPONENTIAL:
        out = []
        s, v = s0, n0
        for step in range(spec.t + 1):
            out.append((step, v, s))
            s, v = exponential_step(s, v, spec.m)
        return out
    return [(i, n, s) for i, (s, n) in enumerate(canonical_sequence(spec, s0, n0))]


__all__ = [
    "REGISTRY",
    "fid",
    "path_wiener",
    "path_wiener_double_sum",
    "lemma2",
    "lemma2_cases",
    "eq13",
    "eq14",
    "eq15",
    "subdivision_cases",
    "step_subdivision",
    "eq19",
    "lemma3",
    "eq21",
    "thm2_psi",
    "eq22",
    "eq29",
    "star_fractal_cases",
    "step_star_fractal",
    "eq30",
    "eq31",
    "tgraph_wiener",
    "CANONICAL_NAME",
    "canonical_sequence",
    "as_printed_multistep",
    "iterate_wiener",
    "cayley_vertices",
    "ingredient_order",
    "cayley_parts",
    "cayley_parts_closed",
    "eq45",
    "cayley_wiener",
    "seed_leaf_sums",
    "cayley_star_state",
    "cayley_general_sequence",
    "cayley_general_wiener",
    "eq47",
    "exponential_step",
    "exponential_wiener",
    "eq49",
    "eq50",
    "wiener_sequence",
]
