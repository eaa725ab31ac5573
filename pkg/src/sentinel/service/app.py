"""HTTP face of the toolkit.

Five POST endpoints mirror the command-line verbs.  Domain errors come
back as structured JSON: malformed descriptions are 400, a tied vote is
409 (the tally is included so the caller can judge how close it was),
and everything the solver itself rules out is 422.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import DegenerateInput, MajorityTie, SentinelError, ShapeError
from . import handlers
from .schemas import (
    CanonicalResponse,
    CorrectionResponse,
    DetectionResponse,
    ErrorBody,
    SecurityReportDoc,
    SignalsRequest,
    SimulateRequest,
    SimulationResponse,
    SystemRequest,
)


def _status_for(exc):
    if isinstance(exc, MajorityTie):
        return 409
    if isinstance(exc, (DegenerateInput, ShapeError)):
        return 400
    return 422


def create_app():
    app = FastAPI(
        title="sentinel",
        description=(
            "Security index, sensor-attack detection and majority-vote "
            "correction for discrete-time systems in kernel form."
        ),
        version=__version__,
    )

    @app.exception_handler(SentinelError)
    async def _domain_error(request, exc):
        body = {"error": type(exc).__name__, "detail": str(exc)}
        if isinstance(exc, MajorityTie) and exc.tally is not None:
            body["tally"] = list(exc.tally)
        return JSONResponse(status_code=_status_for(exc), content=body)

    responses = {
        400: {"model": ErrorBody},
        409: {"model": ErrorBody},
        422: {"model": ErrorBody},
    }

    @app.get("/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/index", response_model=SecurityReportDoc, responses=responses)
    async def index(req: SystemRequest):
        return handlers.compute_index(req.system.to_payload())

    @app.post("/canon", response_model=CanonicalResponse, responses=responses)
    async def canon(req: SystemRequest):
        return handlers.compute_canonical(req.system.to_payload())

    @app.post("/detect", response_model=DetectionResponse, responses=responses)
    async def detect(req: SignalsRequest):
        return handlers.run_detection(
            req.system.to_payload(), req.signals_csv, req.eps_sig
        )

    @app.post("/correct", response_model=CorrectionResponse, responses=responses)
    async def correct(req: SignalsRequest):
        return handlers.run_correction(
            req.system.to_payload(), req.signals_csv, req.eps_sig
        )

    @app.post("/simulate", response_model=SimulationResponse, responses=responses)
    async def simulate(req: SimulateRequest):
        return handlers.run_simulation(req.scenario.to_payload(), req.seed)

    return app


app = create_app()
