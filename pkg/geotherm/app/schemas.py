"""
Pydantic schemas: tolerances, sweeps, singularity records, reports and the
validated run configuration.
"""

import math
import sys
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

QUANTITIES = ("T", "Phi_e", "L", "C_Q", "R_gtd", "R_w", "R_rupp", "f")

# Column names used in CSV output, in quantity order
COLUMN_NAMES = {
    "T": "T",
    "Phi_e": "Phi",
    "L": "L",
    "C_Q": "CQ",
    "R_gtd": "R_gtd",
    "R_w": "R_w",
    "R_rupp": "R_rupp",
    "f": "f",
}

QUANTITY_ALIASES = {**{column: name for name, column in COLUMN_NAMES.items()}, **{q: q for q in QUANTITIES}}

# Relative tolerance of Brent refinement, machine precision by default
ROOT_RTOL = 4 * sys.float_info.epsilon

CURVATURE_SOURCES = {"gtd": "R_gtd", "weinhold": "R_w", "ruppeiner": "R_rupp"}

Source = Literal["C_Q", "R_gtd", "R_w", "R_rupp"]
Kind = Literal["phase_transition", "metric_degeneracy", "unclassified"]


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    match: float = Field(1e-6, gt=0, description="Relative distance for C_Q / R coincidence")
    f_zero: float = Field(1e-8, gt=0, description="|f| relative to the sweep maximum")
    pole_guard: float = Field(1e-9, gt=0, description="Relative factor magnitude flagged as a pole")
    growth_threshold: float = Field(0.5, ge=0)
    growth_offsets: Tuple[float, float] = (1e-3, 1e-5)
    dominance_offset: float = Field(1e-4, gt=0, lt=0.5)
    dominance: float = Field(1e3, gt=0)
    root: float = Field(ROOT_RTOL, gt=0, lt=1e-6, description="Relative tolerance of pole refinement")
    oracle_step: float = Field(1e-4, gt=0, lt=0.5)
    oracle_rel: float = Field(1e-4, gt=0)
    derivative_rel: float = Field(1e-6, gt=0)
    closure: float = Field(1e-8, gt=0)
    proportionality: float = Field(1e-10, gt=0)

    @field_validator("growth_offsets")
    @classmethod
    def offsets_decrease(cls, v):
        far, near = v
        if not 0 < near < far < 0.5:
            raise ValueError("growth offsets must satisfy 0 < near < far < 0.5")
        return v


class SweepSpec(BaseModel):
    """One-dimensional sweep through state space"""

    model_config = ConfigDict(extra="forbid")

    active_var: str
    range: Tuple[float, float]
    points: int = Field(256, ge=16)
    scale: Literal["linear", "log"] = "linear"
    fixed: Dict[str, float] = Field(default_factory=dict)

    @field_validator("range")
    @classmethod
    def positive_range(cls, v):
        lo, hi = v
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("sweep bounds must be finite")
        if lo <= 0:
            raise ValueError(f"sweep minimum must be positive, got {lo}")
        if lo >= hi:
            raise ValueError(f"sweep minimum {lo} must be below maximum {hi}")
        return v

    @field_validator("fixed")
    @classmethod
    def positive_fixed(cls, v):
        for name, value in v.items():
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"fixed value of {name} must be positive, got {value}")
        return v

    @model_validator(mode="after")
    def active_not_fixed(self):
        if self.active_var in self.fixed:
            raise ValueError(f"{self.active_var} is both swept and fixed")
        return self


class Evidence(BaseModel):
    factors: List[str] = Field(default_factory=list, description="Labels of responsible denominator factors")
    multiplicities: List[int] = Field(default_factory=list)
    bracket: Tuple[float, float]
    residual: float
    f_value: Optional[float] = None
    growth_exponent: Optional[float] = None
    removable: bool = False
    dominance: Optional[float] = None
    dominant: Optional[bool] = None
    cq_distance: Optional[float] = None


class SingularityRecord(BaseModel):
    location: float
    source: Source
    kind: Kind = "unclassified"
    evidence: Evidence

    @property
    def physical(self) -> bool:
        return self.kind != "metric_degeneracy" and not self.evidence.removable


class MatchRecord(BaseModel):
    cq_location: float
    r_location: Optional[float] = None
    distance: Optional[float] = None
    matched: bool
    status: Literal["matched", "unmatched", "removable"] = "unmatched"


class WeinholdDistance(BaseModel):
    location: float
    nearest_cq: Optional[float] = None
    distance: Optional[float] = None


class TransitionReport(BaseModel):
    model: Dict[str, Any]
    sweep: SweepSpec
    metric: Literal["gtd", "weinhold", "ruppeiner"] = "gtd"
    records: List[SingularityRecord] = Field(default_factory=list)
    matching: List[MatchRecord] = Field(default_factory=list)
    weinhold: List[WeinholdDistance] = Field(default_factory=list)
    unmatched_physical: List[float] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    verdict: Literal["pass", "fail"] = "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def by_source(self, source: str) -> List[SingularityRecord]:
        return [r for r in self.records if r.source == source]


# Run configuration


class ModelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["pmi", "rn", "custom"]
    n: Optional[int] = None
    s: Optional[str] = None
    i: Optional[int] = None
    l: Optional[float] = None
    l_is_variable: bool = False
    variables: Optional[List[str]] = None
    potential: Optional[str] = None
    eta_s: int = -1

    @field_validator("s", mode="before")
    @classmethod
    def s_as_text(cls, v):
        if isinstance(v, (int, float)):
            return str(v)
        return v

    @field_validator("eta_s")
    @classmethod
    def eta_sign(cls, v):
        if v not in (-1, 1):
            raise ValueError(f"eta_s must be -1 or 1, got {v}")
        return v

    @field_validator("variables", mode="before")
    @classmethod
    def split_variables(cls, v):
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        return v


class SweepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    var: str
    min: float
    max: float
    points: int = Field(256, ge=16)
    scale: Literal["linear", "log"] = "linear"


class AnalysisSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    quantities: List[str] = Field(default_factory=lambda: list(QUANTITIES))
    verify_coincidence: bool = False
    coincidence_metric: Literal["gtd", "weinhold", "ruppeiner"] = "gtd"

    @field_validator("quantities", mode="before")
    @classmethod
    def normalize_quantities(cls, v):
        if isinstance(v, str):
            v = [item.strip() for item in v.split(",") if item.strip()]
        names = []
        for item in v:
            if item not in QUANTITY_ALIASES:
                raise ValueError(f"unknown quantity {item!r}; choose from {', '.join(QUANTITIES)}")
            name = QUANTITY_ALIASES[item]
            if name not in names:
                names.append(name)
        return names


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: Optional[str] = None
    name: str = "run"


class RunSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: ModelSection
    sweep: SweepSection
    fixed: Dict[str, float] = Field(default_factory=dict)
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    output: OutputSection = Field(default_factory=OutputSection)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    def sweep_spec(self) -> SweepSpec:
        return SweepSpec(
            active_var=self.sweep.var,
            range=(self.sweep.min, self.sweep.max),
            points=self.sweep.points,
            scale=self.sweep.scale,
            fixed=dict(self.fixed),
        )
