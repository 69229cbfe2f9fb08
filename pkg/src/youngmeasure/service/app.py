"""FastAPI application exposing the measure computations over HTTP.

Error convention: anything wrong with the *request* — unparseable
expressions, inconsistent specs, out-of-range parameters — maps to 400;
requests that are well-formed but numerically unservable (non-invertible
pieces, everything rejected, failure budget exceeded) map to 422.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..analytic import BUILTIN_NAMES, Reference, builtin_function
from ..domain import PiecewiseFunction
from ..errors import InputError, NumericalError
from ..exports import sketch_indices
from ..montecarlo import DEFAULT_SEED, GENERATOR_NAME, FunctionalEstimate
from ..specio import build_function
from . import handlers
from .schemas import (
    ApproxRequest,
    ApproxResponse,
    AtomsRequest,
    AtomsResponse,
    BuiltinInfo,
    DensityRequest,
    DensityResponse,
    ErrorResponse,
    EstimateModel,
    EvaluationFailureModel,
    FunctionalRequest,
    FunctionalResponse,
    FunctionRef,
    HealthResponse,
    ImageEscapeModel,
    InverseDefectModel,
    KSModel,
    ProbabilityRequest,
    ProbabilityResponse,
    ReportRowModel,
    SampleRequest,
    SampleResponse,
    ValidateRequest,
    ValidateResponse,
)

_ERROR_RESPONSES = {
    400: {"model": ErrorResponse},
    422: {"model": ErrorResponse},
}


def _resolve(ref: FunctionRef) -> tuple[PiecewiseFunction, Reference | None]:
    if ref.builtin is not None:
        return builtin_function(ref.builtin, ref.truncate)
    return build_function(ref.spec), None


def _estimate_model(est: FunctionalEstimate) -> EstimateModel:
    return EstimateModel(
        value=est.value,
        stderr=est.stderr,
        n=est.n,
        seed=est.seed,
        method=est.method,
        generator=GENERATOR_NAME if est.method == "monte-carlo" else "trapezoid",
        rejected=est.rejected,
        failures=est.failures,
        note=est.note,
    )


def create_app() -> FastAPI:
    app = FastAPI(
        title="youngmeasure",
        version=__version__,
        description="Pushforward (Young) measures of piecewise functions: "
        "densities, atoms, sampling, functionals, and simple-function ladders.",
    )

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": str(exc), "kind": type(exc).__name__},
        )

    @app.exception_handler(NumericalError)
    async def _numerical_error(request: Request, exc: NumericalError) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={"error": str(exc), "kind": type(exc).__name__},
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError) -> JSONResponse:
        # malformed request bodies are input errors, same as bad spec files
        return JSONResponse(
            status_code=400,
            content={"error": str(exc), "kind": "RequestValidationError"},
        )

    @app.get("/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/builtins", response_model=list[BuiltinInfo])
    async def builtins() -> list[BuiltinInfo]:
        out = []
        for name in BUILTIN_NAMES:
            _, ref = builtin_function(name, truncate=8)
            out.append(BuiltinInfo(name=name, description=ref.description))
        return out

    @app.post("/density", response_model=DensityResponse, responses=_ERROR_RESPONSES)
    async def density(req: DensityRequest) -> DensityResponse:
        f, reference = _resolve(req.function)
        table, breakpoints = handlers.density(f, reference, req.grid)
        return DensityResponse(
            grid=table.grid.tolist(),
            values=table.values.tolist(),
            contributing_pieces=table.contributing_counts.tolist(),
            tail_bound=table.tail_bound,
            q_tol=table.q_tol,
            domain_measure=table.domain_measure,
            mass=table.mass(),
            breakpoints=list(breakpoints),
        )

    @app.post("/atoms", response_model=AtomsResponse, responses=_ERROR_RESPONSES)
    async def atoms(req: AtomsRequest) -> AtomsResponse:
        f, _ = _resolve(req.function)
        nu = handlers.atoms(f)
        return AtomsResponse(atoms=list(nu.atoms), tail_bound=nu.tail_bound)

    @app.post("/prob", response_model=ProbabilityResponse, responses=_ERROR_RESPONSES)
    async def prob(req: ProbabilityRequest) -> ProbabilityResponse:
        f, _ = _resolve(req.function)
        result = handlers.probability(f, list(req.intervals))
        return ProbabilityResponse(
            value=result.value,
            tail_bound=result.tail_bound,
            intervals=req.intervals,
        )

    @app.post("/sample", response_model=SampleResponse, responses=_ERROR_RESPONSES)
    async def sample(req: SampleRequest) -> SampleResponse:
        f, reference = _resolve(req.function)
        seed = DEFAULT_SEED if req.seed is None else req.seed
        e, ks = handlers.sample(f, req.n, seed, reference)
        samples = e.samples
        capped = req.cap is not None and req.cap < e.n
        if capped:
            samples = samples[sketch_indices(e.n, req.cap)]
        return SampleResponse(
            samples=samples.tolist(),
            n=e.n,
            rejected=e.rejected,
            seed=seed,
            generator=GENERATOR_NAME,
            capped=capped,
            ks=None
            if ks is None
            else KSModel(
                statistic=ks.statistic, threshold=ks.threshold, n=ks.n, seed=ks.seed
            ),
        )

    @app.post("/functional", response_model=FunctionalResponse, responses=_ERROR_RESPONSES)
    async def functional(req: FunctionalRequest) -> FunctionalResponse:
        f, _ = _resolve(req.function)
        seed = DEFAULT_SEED if req.seed is None else req.seed
        mc, quad = handlers.functional(
            f,
            beta=req.beta,
            weight=req.weight,
            psi=req.psi,
            n=req.n,
            seed=seed,
            subdivisions=req.subdivisions,
        )
        return FunctionalResponse(
            monte_carlo=_estimate_model(mc),
            quadrature=None if quad is None else _estimate_model(quad),
        )

    @app.post("/approx", response_model=ApproxResponse, responses=_ERROR_RESPONSES)
    async def approx(req: ApproxRequest) -> ApproxResponse:
        f, reference = _resolve(req.function)
        rows, suite_desc, ref_type = handlers.approximate(
            f, list(req.levels), req.suite, reference
        )
        return ApproxResponse(
            rows=[
                ReportRowModel(level=r.level, gap=r.gap, atom_count=r.atom_count)
                for r in rows
            ],
            suite=suite_desc,
            reference=ref_type,
        )

    @app.post("/validate", response_model=ValidateResponse, responses=_ERROR_RESPONSES)
    async def validate(req: ValidateRequest) -> ValidateResponse:
        f, _ = _resolve(req.function)
        report = handlers.validate(f, req.samples_per_piece)
        return ValidateResponse(
            ok=report.ok,
            overlaps=list(report.overlaps),
            outside_domain=list(report.outside_domain),
            defect=report.defect,
            image_escape_count=report.image_escape_count,
            image_escapes=[
                ImageEscapeModel(piece=k, x=list(x), value=list(v))
                for k, x, v in report.image_escapes
            ],
            inverse_defects=[
                InverseDefectModel(piece=k, y=y, residual=r)
                for k, y, r in report.inverse_defects
            ],
            evaluation_failures=[
                EvaluationFailureModel(piece=k, x=list(x), error=msg)
                for k, x, msg in report.evaluation_failures
            ],
            samples_per_piece=report.samples_per_piece,
        )

    return app


app = create_app()
