"""Request and response shapes shared by the HTTP service and the CLI.

Everything the service emits is built from these models, so the JSON
layout is pinned in one place.  Two conventions worth noting:

* every check row carries the same nine data columns regardless of
  suite, which is what lets the CLI flatten any response into the fixed
  CSV layout ``suite,case,n,label,seed,lhs,rhs,margin,std_error,pass``;
* all wall-clock data lives in the single volatile ``timestamp`` field
  of the report document, so re-running with the same configuration
  reproduces every other byte.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

Family = Literal["real", "complex", "quaternionic", "octonionic"]

VERIFY_TARGETS = (
    "theorem21",
    "beckner",
    "gross",
    "heisenberg",
    "projected",
    "semigroup",
    "hls",
    "rearrangement",
    "lemma",
    "constants",
    "asymptotics",
)

Status = Literal["pass", "violation", "numeric-failure"]


class SpectraRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    case: Family = "complex"
    n: Optional[int] = Field(default=None, ge=1, le=64)
    max_degree: int = Field(default=10, ge=0, le=200)
    nu: Optional[float] = None


class SpectraRow(BaseModel):
    """One K-type row of the eigenvalue table."""

    case: str
    n: int
    label: list[int]
    nu: str
    deltab: int
    margin: str
    eigenvalue_exact: Optional[str] = None
    eigenvalue: Optional[float] = None
    pole: Optional[str] = None


class SpectraResponse(BaseModel):
    case: str
    n: int
    max_degree: int
    special_nu: str
    rows: list[SpectraRow]
    identities_pass: bool
    margins_nonnegative: bool
    equality_labels: list[list[int]]
    degenerate: bool = False
    degenerate_note: Optional[str] = None
    all_pass: bool


class VerifyRequest(BaseModel):
    """Knobs for a single verification target.

    Targets read only the fields they need; the rest keep defaults and
    are echoed back so a run can be reproduced from its own output.
    """

    model_config = ConfigDict(extra="forbid")

    case: Optional[Family] = None
    n: Optional[int] = Field(default=None, ge=1, le=1_000_000)
    k: Optional[int] = Field(default=None, ge=1, le=8)
    samples: int = Field(default=20_000, ge=16, le=5_000_000)
    seed: int = Field(default=0, ge=0, lt=2**63)
    trials: int = Field(default=3, ge=1, le=1000)
    tolerance: float = Field(default=1e-9, ge=0.0)
    grid: Literal["small", "full"] = "small"
    length: int = Field(default=8, ge=2, le=12)
    max_degree: int = Field(default=4, ge=1, le=10)
    p: Optional[float] = Field(default=None, gt=1.0)
    q: Optional[float] = Field(default=None, gt=1.0)
    t: Optional[float] = None


class CheckRow(BaseModel):
    """One inequality or identity evaluation in CSV column order."""

    model_config = ConfigDict(populate_by_name=True)

    suite: str
    case: Optional[str] = None
    n: Optional[int] = None
    label: str
    seed: Optional[int] = None
    lhs: float
    rhs: float
    margin: float
    std_error: float = 0.0
    passed: bool = Field(alias="pass")
    metadata: dict = Field(default_factory=dict)


class VerifyResponse(BaseModel):
    target: str
    status: Status
    config: dict
    checks: list[CheckRow]
    margin_min: Optional[float] = None
    margin_median: Optional[float] = None
    detail: Optional[str] = None


class ReportRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    samples: int = Field(default=8_000, ge=16, le=5_000_000)
    seed: int = Field(default=0, ge=0, lt=2**63)
    trials: int = Field(default=2, ge=1, le=200)
    tolerance: float = Field(default=1e-9, ge=0.0)
    cases: list[Family] = Field(
        default_factory=lambda: ["real", "complex", "quaternionic", "octonionic"]
    )


class SuiteSummary(BaseModel):
    suite: str
    status: Status
    margin_min: Optional[float] = None
    margin_median: Optional[float] = None
    checks: list[CheckRow]


class ReportDocument(BaseModel):
    version: str
    config: dict
    suites: list[SuiteSummary]
    all_pass: bool
    exit_code: int
    timestamp: dict
