"""
Data models for treelike growth, closed-form evaluation, random walks and audits
"""
from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Optional, Tuple

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    model_validator,
)


# --- Errors -----------------------------------------------------------------

class TreeAuditError(Exception):
    """Base class for all domain errors"""


class NotATree(TreeAuditError):
    """Edge list has the wrong size, a cycle, or is disconnected"""


class BadVertexId(TreeAuditError):
    """Vertex id outside [0, n)"""


class BadParam(TreeAuditError, ValueError):
    """Parameter outside its documented range"""


class SeedViolation(TreeAuditError):
    """Seed tree does not satisfy the family's structural precondition"""


class IsolatedVertex(TreeAuditError):
    """Random walk started on a vertex without neighbours"""


class SolveFailure(TreeAuditError):
    """Exact first-passage system could not be solved"""


class FormulaDivergence(TreeAuditError):
    """Two exact derivations of the same quantity disagree"""


class InsufficientPoints(TreeAuditError):
    """Scaling fit requested with fewer than three points"""


class ResourceCapExceeded(TreeAuditError):
    """Requested model would exceed the configured vertex cap"""


# --- Exact values -----------------------------------------------------------

def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise ValueError(f"cannot interpret {value!r} as an exact ratio")


ExactRatio = Annotated[
    Fraction,
    BeforeValidator(_to_fraction),
    PlainSerializer(lambda v: str(v), return_type=str),
]


# --- Growth models ----------------------------------------------------------

class Family(str, Enum):
    """Treelike model families"""
    FIRST_ORDER_SUBDIVISION = "first_order_subdivision"
    SUBDIVISION = "subdivision"
    STAR_FRACTAL_1M = "star_fractal_1m"
    STAR_FRACTAL = "star_fractal"
    TGRAPH = "tgraph"
    CAYLEY = "cayley"
    EXPONENTIAL = "exponential"


# Families grown by an edge operation (subdivision / star-fractal)
EDGE_FAMILIES = frozenset({
    Family.FIRST_ORDER_SUBDIVISION,
    Family.SUBDIVISION,
    Family.STAR_FRACTAL_1M,
    Family.STAR_FRACTAL,
    Family.TGRAPH,
})


class SeedKind(str, Enum):
    EDGE = "edge"
    STAR = "star"
    EXPLICIT = "explicit"


class SeedSpec(BaseModel):
    """Seed tree description: symbolic single edge / star, or an explicit edge list"""
    model_config = ConfigDict(frozen=True)

    kind: SeedKind = SeedKind.EDGE
    edges: Tuple[Tuple[int, int], ...] = ()

    @model_validator(mode="after")
    def _check_edges(self) -> "SeedSpec":
        if self.kind == SeedKind.EXPLICIT and not self.edges:
            raise ValueError("explicit seed needs at least one edge")
        if self.kind != SeedKind.EXPLICIT and self.edges:
            raise ValueError(f"{self.kind.value} seed takes no edge list")
        return self

    @property
    def order(self) -> Optional[int]:
        if self.kind == SeedKind.EXPLICIT:
            return 1 + max(max(u, v) for u, v in self.edges)
        if self.kind == SeedKind.EDGE:
            return 2
        return None

    def token(self) -> str:
        if self.kind == SeedKind.EXPLICIT:
            return ",".join(f"{u}-{v}" for u, v in self.edges)
        return self.kind.value

    @classmethod
    def parse(cls, token: str) -> "SeedSpec":
        token = token.strip().lower()
        if token in ("edge", "single_edge"):
            return cls(kind=SeedKind.EDGE)
        if token == "star":
            return cls(kind=SeedKind.STAR)
        edges: List[Tuple[int, int]] = []
        for part in token.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                u, v = part.split("-")
                edges.append((int(u), int(v)))
            except ValueError:
                raise ValueError(f"bad seed edge {part!r}; expected 'u-v'") from None
        return cls(kind=SeedKind.EXPLICIT, edges=tuple(edges))

    @classmethod
    def from_edges(cls, edges: List[Tuple[int, int]]) -> "SeedSpec":
        if not edges:
            raise ValueError("explicit seed needs at least one edge")
        return cls(kind=SeedKind.EXPLICIT, edges=tuple((int(u), int(v)) for u, v in edges))


# keys emitted by ModelSpec.serialize, per family, in order
_SPEC_KEYS: Dict[Family, Tuple[str, ...]] = {
    Family.FIRST_ORDER_SUBDIVISION: ("seed", "t"),
    Family.SUBDIVISION: ("m", "seed", "t"),
    Family.STAR_FRACTAL_1M: ("m", "seed", "t"),
    Family.STAR_FRACTAL: ("w", "m", "seed", "t"),
    Family.TGRAPH: ("t",),
    Family.CAYLEY: ("n", "seed", "t"),
    Family.EXPONENTIAL: ("m", "seed", "t"),
}


class ModelSpec(BaseModel):
    """Which family, its integer parameters, the seed and the number of steps"""
    model_config = ConfigDict(frozen=True)

    family: Family
    m: int = Field(default=1, ge=1)
    w: int = Field(default=1, ge=1)
    n: int = Field(default=3, ge=3)
    seed: SeedSpec = Field(default_factory=SeedSpec)
    t: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _normalize(self) -> "ModelSpec":
        # frozen model: normalise through object.__setattr__
        if self.family == Family.TGRAPH:
            if self.w != 1 or self.m != 1 or self.seed.kind != SeedKind.EDGE:
                raise ValueError("tgraph is the (1,1)-star-fractal on a single edge; w, m and seed are fixed")
        if self.family == Family.FIRST_ORDER_SUBDIVISION and self.m != 1:
            raise ValueError("first_order_subdivision has m=1 by definition")
        if self.family == Family.STAR_FRACTAL_1M and self.w != 1:
            raise ValueError("star_fractal_1m has w=1 by definition")
        if self.seed.kind == SeedKind.STAR and self.family != Family.CAYLEY:
            raise ValueError("the symbolic star seed is only defined for the cayley family")
        if self.family == Family.CAYLEY and self.seed.kind == SeedKind.EDGE:
            object.__setattr__(self, "seed", SeedSpec(kind=SeedKind.STAR))
        if self.family == Family.CAYLEY and self.seed.kind == SeedKind.STAR and self.t < 1:
            raise ValueError("cayley with the star seed needs t >= 1 (step 1 is the star)")
        return self

    def with_steps(self, t: int) -> "ModelSpec":
        return self.model_copy(update={"t": t})

    def serialize(self) -> str:
        """Flat key-value form, e.g. ``family=star_fractal w=2 m=3 seed=edge t=4``"""
        parts = [f"family={self.family.value}"]
        for key in _SPEC_KEYS[self.family]:
            value = self.seed.token() if key == "seed" else getattr(self, key)
            parts.append(f"{key}={value}")
        return " ".join(parts)

    @classmethod
    def parse(cls, text: str) -> "ModelSpec":
        return cls(**parse_key_values(text))


def parse_key_values(text: str) -> Dict[str, Any]:
    """Parse ``key=value`` tokens (whitespace or newlines, ``#`` comments) into ModelSpec kwargs."""
    fields: Dict[str, Any] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        for token in line.split():
            if "=" not in token:
                raise ValueError(f"expected key=value, got {token!r}")
            key, value = token.split("=", 1)
            key = key.strip().lower()
            if key == "family":
                fields["family"] = Family(value.strip().lower())
            elif key == "seed":
                fields["seed"] = SeedSpec.parse(value)
            elif key in ("m", "w", "n", "t"):
                fields[key] = int(value)
            else:
                raise ValueError(f"unknown key {key!r}")
    return fields


class CountSource(str, Enum):
    AS_PRINTED = "as_printed"
    CORRECTED = "corrected"


class GrowthCounts(BaseModel):
    """Per-step predicted vertex and edge counts; row i is step start_step + i"""
    source: CountSource
    start_step: int = 0
    vertices: List[int] = Field(default_factory=list)
    edges: List[int] = Field(default_factory=list)

    def at(self, step: int) -> Tuple[int, int]:
        i = step - self.start_step
        if i < 0 or i >= len(self.vertices):
            raise IndexError(f"step {step} outside predicted range")
        return self.vertices[i], self.edges[i]


# --- Closed forms -----------------------------------------------------------

class FormulaName(str, Enum):
    LEMMA1_PATH = "Lemma1_Path"
    LEMMA2_SUB1 = "Lemma2_Sub1"
    COR1_SUB1_T = "Cor1_Sub1_t"
    COR2_EDGESUB1_T = "Cor2_EdgeSub1_t"
    THM1_SUBM = "Thm1_SubM"
    COR3_SUBM_T = "Cor3_SubM_t"
    LEMMA3_STAR1M = "Lemma3_Star1m"
    COR4_STAR1M_T = "Cor4_Star1m_t"
    THM2_EQ22 = "Thm2_Eq22"
    THM2_EQ29 = "Thm2_Eq29"
    COR5_STARWM_T = "Cor5_StarWm_t"
    EQ31_TGRAPH = "Eq31_TGraph"
    EQ45_CAYLEY = "Eq45_Cayley"
    EQ47_CAYLEYGEN = "Eq47_CayleyGen"
    EQ49_EXPONENTIAL = "Eq49_Exponential"
    EQ50_EXPEDGE = "Eq50_ExpEdge"
    # growth counts and the MFPT lemma
    EQ4_SUB1_COUNTS = "Eq4_Sub1Counts"
    EQ5_SUBM_COUNTS = "Eq5_SubMCounts"
    EQ6_STAR1M_COUNTS = "Eq6_Star1mCounts"
    EQ7_STARWM_COUNTS = "Eq7_StarWmCounts"
    EQ33_CAYLEY_COUNTS = "Eq33_CayleyCounts"
    EQ48_EXP_COUNTS = "Eq48_ExpCounts"
    EQ51_MFPT_LEMMA = "Eq51_MfptLemma"


class Tier(str, Enum):
    CANONICAL = "canonical"
    AS_PRINTED = "as_printed"


class FormulaId(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: FormulaName
    tier: Tier
    variant: Optional[str] = None

    @property
    def key(self) -> str:
        base = f"{self.name.value}/{self.tier.value}"
        return f"{base}/{self.variant}" if self.variant else base

    def sort_key(self) -> Tuple[str, str, str]:
        return (self.name.value, self.tier.value, self.variant or "")


class FormulaResult(BaseModel):
    """One closed-form evaluation; value None means the formula is undefined at this point"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    formula: FormulaId
    params: Dict[str, int] = Field(default_factory=dict)
    value: Optional[ExactRatio] = None

    @property
    def defined(self) -> bool:
        return self.value is not None


class CayleyParts(BaseModel):
    """Intermediates of the self-similar Cayley-tree decomposition"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int
    t: int
    ingredient_order: int
    theta: ExactRatio
    omega12: ExactRatio
    gamma: ExactRatio
    wiener: ExactRatio
    vertices: int


# --- Random walks -----------------------------------------------------------

class WalkConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    trials: int = Field(default=10_000, ge=1)
    max_steps: Optional[int] = Field(default=None, ge=1)
    threads: int = Field(default=1, ge=1)


class McEstimate(BaseModel):
    estimate: float
    stderr: float
    trials: int
    truncated: int = 0


class MfptReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int
    wiener: ExactRatio
    exact: Optional[ExactRatio] = None
    from_wiener_2S_over_V: ExactRatio
    printed_S_over_V: ExactRatio
    lemma_factor: ExactRatio
    mc: Optional[McEstimate] = None


# --- Analysis ---------------------------------------------------------------

class DimensionKind(str, Enum):
    FRACTAL = "fractal"
    INFINITE = "infinite"
    NOT_FRACTAL = "not_fractal"


class DimensionTriple(BaseModel):
    kind: DimensionKind
    d_f: Optional[float] = None
    d_w: Optional[float] = None
    d_spectral: Optional[float] = None

    @model_validator(mode="after")
    def _positive(self) -> "DimensionTriple":
        if self.kind == DimensionKind.FRACTAL:
            if self.d_f is None or self.d_w is None or self.d_f <= 0 or self.d_w <= 0:
                raise ValueError("finite dimensions must be positive")
        return self


class Persistence(str, Enum):
    PERSISTENT = "persistent"
    NOT_PERSISTENT = "not_persistent"
    NOT_APPLICABLE = "not_applicable"


class DeltaVReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    limit: ExactRatio
    empirical: ExactRatio
    empirical_t: int
    printed: Optional[ExactRatio] = None

    @property
    def agrees_with_printed(self) -> Optional[bool]:
        return None if self.printed is None else self.printed == self.limit


class DimSolution(BaseModel):
    w: int
    n: int
    m: int
    d_f: float
    rule: str


class ScalingFit(BaseModel):
    exponent: float
    r_squared: float = Field(ge=0.0, le=1.0)
    analytic_exponent: float
    printed_exponent: Optional[float] = None
    diameter_exponent: Optional[float] = None
    regression: str = "loglog"
    points: List[Tuple[float, float]] = Field(default_factory=list)


class MeanDistancePoint(BaseModel):
    t: int
    vertices: int
    mean_distance: float
    ratio_to_log_v: float
    limit: float


# --- Verification -----------------------------------------------------------

class Verdict(str, Enum):
    MATCH = "match"
    MISMATCH = "mismatch"
    UNDEFINED = "undefined"


class AuditRecord(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    formula: FormulaId
    params: Dict[str, int]
    oracle_value: Optional[ExactRatio] = None
    formula_value: Optional[ExactRatio] = None
    verdict: Verdict
    abs_diff: Optional[ExactRatio] = None

    @model_validator(mode="after")
    def _verdict_consistent(self) -> "AuditRecord":
        if self.verdict == Verdict.UNDEFINED:
            if self.formula_value is not None or self.abs_diff is not None:
                raise ValueError("undefined records carry no value")
        elif self.oracle_value is None or self.formula_value is None:
            raise ValueError("decided records carry both values")
        elif (self.verdict == Verdict.MATCH) != (self.abs_diff == 0):
            raise ValueError("verdict must be match exactly when abs_diff is zero")
        return self

    def sort_key(self) -> Tuple[Tuple[str, str, str], Tuple[Tuple[str, int], ...]]:
        return (self.formula.sort_key(), tuple(sorted(self.params.items())))


class AuditGrid(BaseModel):
    """Parameter grid for the formula audit"""
    one_step_max_order: int = Field(default=12, ge=2)
    multi_step_max_order: int = Field(default=7, ge=2)
    m_values: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    w_values: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    t_max: int = Field(default=3, ge=0)
    tgraph_t_max: int = Field(default=6, ge=0)
    path_max: int = Field(default=40, ge=2)
    cayley_n_values: List[int] = Field(default_factory=lambda: [3, 4, 5, 6])
    cayley_t_max: int = Field(default=4, ge=1)
    cayley_seed_max_order: int = Field(default=12, ge=2)
    exp_m_values: List[int] = Field(default_factory=lambda: [1, 2, 3, 4])
    exp_t_max: int = Field(default=3, ge=0)
    exp_seed_max_order: int = Field(default=8, ge=2)
    random_seed_count: int = Field(default=20, ge=0)
    random_seed_max_order: int = Field(default=10, ge=2)
    random_seed: int = Field(default=2024, ge=0)
    mfpt_max_order: int = Field(default=9, ge=2)
    size_cap: int = Field(default=20_000, ge=2)
    bfs_max_vertices: int = Field(default=64, ge=0)
    threads: int = Field(default=1, ge=1)

    @classmethod
    def quick(cls) -> "AuditGrid":
        """Small grid that still touches every formula"""
        return cls(
            one_step_max_order=5,
            multi_step_max_order=4,
            m_values=[1, 2],
            w_values=[1, 2],
            t_max=2,
            tgraph_t_max=3,
            path_max=8,
            cayley_n_values=[3, 4],
            cayley_t_max=3,
            cayley_seed_max_order=6,
            exp_m_values=[1, 2],
            exp_t_max=2,
            exp_seed_max_order=4,
            random_seed_count=3,
            random_seed_max_order=6,
            mfpt_max_order=5,
            size_cap=2_000,
        )


class LedgerRow(BaseModel):
    formula: FormulaId
    total: int
    matches: int
    mismatches: int
    undefined: int
    pass_rate: Optional[float] = None
    first_failure: Optional[Dict[str, int]] = None


class LedgerSummary(BaseModel):
    rows: List[LedgerRow] = Field(default_factory=list)
    canonical_ok: bool = True

    def row(self, name: FormulaName, tier: Tier, variant: Optional[str] = None) -> LedgerRow:
        for r in self.rows:
            if r.formula.name == name and r.formula.tier == tier and r.formula.variant == variant:
                return r
        raise KeyError(f"{name.value}/{tier.value}/{variant}")


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    DOT = "dot"
    TEXT = "text"
    EDGES = "edges"


class CliConfig(BaseModel):
    """Parsed invocation; every field comes from flags or the --config file"""
    command: str
    format: OutputFormat = OutputFormat.TEXT
    output: Optional[str] = None
    threads: int = Field(default=1, ge=1)
    verbose: bool = False
    spec: Optional[ModelSpec] = None


# --- Reports ----------------------------------------------------------------

class GrowReport(BaseModel):
    spec: str
    vertices: int
    edges: int
    predicted: Dict[str, GrowthCounts]
    diameter: int
    average_degree: ExactRatio
    degree_tail: Optional[Tuple[float, float]] = None
    edge_list: List[Tuple[int, int]] = Field(default_factory=list)
    generation_tags: List[int] = Field(default_factory=list)


class WienerReport(BaseModel):
    """Canonical value, the oracle when affordable, and every matching formula checked inline"""
    spec: str
    vertices: int
    canonical: ExactRatio
    oracle: Optional[ExactRatio] = None
    formulas: List[AuditRecord] = Field(default_factory=list)
    cayley_parts: Optional[CayleyParts] = None


class ScaleReport(BaseModel):
    spec: str
    fit: ScalingFit
    dimensions: DimensionTriple
    persistence: Persistence
    delta_v: DeltaVReport
    mean_distance: List[MeanDistancePoint] = Field(default_factory=list)
