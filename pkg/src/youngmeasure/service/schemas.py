"""Request/response models for the HTTP service.

Requests reference the target function either by builtin name or by an
inline function spec — exactly one of the two.  Responses mirror the
file formats the CLI writes (same field names, same derived quantities)
so a service client and a file consumer see the same vocabulary.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .. import __version__
from ..specio import FunctionSpec


class FunctionRef(BaseModel):
    model_config = ConfigDict(extra="forbid")

    builtin: str | None = None
    spec: FunctionSpec | None = None
    truncate: int = Field(default=64, ge=2, description="piece count for truncated builtins")

    @model_validator(mode="after")
    def _exactly_one_source(self) -> "FunctionRef":
        if (self.builtin is None) == (self.spec is None):
            raise ValueError("provide exactly one of 'builtin' or 'spec'")
        return self


class DensityRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    function: FunctionRef
    grid: int = Field(default=4096, ge=2, le=1 << 22)


class DensityResponse(BaseModel):
    grid: list[float]
    values: list[float]
    contributing_pieces: list[int]
    tail_bound: float
    q_tol: float
    domain_measure: float
    mass: float
    breakpoints: list[float]
    version: str = __version__


class AtomsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    function: FunctionRef


class AtomsResponse(BaseModel):
    atoms: list[tuple[float, float]]  # (location, weight), sorted by location
    tail_bound: float
    version: str = __version__


class ProbabilityRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    function: FunctionRef
    intervals: list[tuple[float, float]] = Field(min_length=1)


class ProbabilityResponse(BaseModel):
    value: float
    tail_bound: float
    intervals: list[tuple[float, float]]
    version: str = __version__


class SampleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    function: FunctionRef
    n: int = Field(default=10_000, ge=1, le=10_000_000)
    seed: int | None = None
    cap: int | None = Field(default=1000, ge=2, description="max samples returned; None for all")


class KSModel(BaseModel):
    statistic: float
    threshold: float
    n: int
    seed: int


class SampleResponse(BaseModel):
    samples: list[float]  # sorted; evenly thinned when capped
    n: int
    rejected: int
    seed: int
    generator: str
    capped: bool
    ks: KSModel | None = None
    version: str = __version__


class EstimateModel(BaseModel):
    value: float
    stderr: float
    n: int
    seed: int
    method: str
    generator: str
    rejected: int = 0
    failures: int = 0
    note: str = ""


class FunctionalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    function: FunctionRef
    beta: str = "s"
    weight: str | None = None
    psi: str | None = None
    n: int = Field(default=100_000, ge=1, le=10_000_000)
    seed: int | None = None
    subdivisions: int = Field(default=4096, ge=2, le=1 << 22)


class FunctionalResponse(BaseModel):
    monte_carlo: EstimateModel
    quadrature: EstimateModel | None = None  # absent for multi-dimensional domains
    version: str = __version__


class ApproxRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    function: FunctionRef
    levels: list[int] = Field(default=[1, 2, 3, 4, 5, 6, 7, 8], min_length=1)
    suite: str = "default"


class ReportRowModel(BaseModel):
    level: int
    gap: float
    atom_count: int


class ApproxResponse(BaseModel):
    rows: list[ReportRowModel]
    suite: str
    reference: str
    version: str = __version__


class ValidateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    function: FunctionRef
    samples_per_piece: int = Field(default=1000, ge=10, le=100_000)


class ImageEscapeModel(BaseModel):
    piece: int
    x: list[float]
    value: list[float]


class InverseDefectModel(BaseModel):
    piece: int
    y: float
    residual: float


class EvaluationFailureModel(BaseModel):
    piece: int
    x: list[float]
    error: str


class ValidateResponse(BaseModel):
    ok: bool
    overlaps: list[tuple[int, int]]
    outside_domain: list[int]
    defect: float
    image_escape_count: int
    image_escapes: list[ImageEscapeModel]
    inverse_defects: list[InverseDefectModel]
    evaluation_failures: list[EvaluationFailureModel]
    samples_per_piece: int
    version: str = __version__


class HealthResponse(BaseModel):
    status: str
    version: str


class BuiltinInfo(BaseModel):
    name: str
    description: str


class ErrorResponse(BaseModel):
    error: str
    kind: str
