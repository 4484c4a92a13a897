"""HTTP JSON service behind the browser calculator.

Endpoints (schemas in ``docs/api.md``):

* ``POST /api/test``       — the three tests on a submitted table
* ``POST /api/power``      — Monte Carlo power at given parameters
* ``POST /api/samplesize`` — smallest m = n reaching a target power
* ``GET  /health``

Requests that fail schema validation get 400 with field diagnostics;
admissibility and computation errors get 422 with the module's message.
A static calculator bundle is served at ``/`` when present.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .fit import FitError, FitOptions
from .inference import TEST_NAMES, run_all_tests
from .model import ModelDomainError
from .serialize import SCHEMA_VERSION, report_to_dict, summary_to_dict
from .simulate import SIZE_CAP, SimConfig, estimate_power, min_sample_size
from .tableio import parse_table_json
from .tables import TableError

__all__ = ["create_app", "find_web_dir"]


class TableGroup(BaseModel):
    label: str = ""
    bilateral: list[int] = Field(min_length=3, max_length=3)
    unilateral: list[int] = Field(min_length=2, max_length=2)


class TablePayload(BaseModel):
    groups: list[TableGroup] = Field(min_length=2, max_length=2)


class TestRequest(BaseModel):
    table: TablePayload
    delta0: float = 0.0
    alpha: float = 0.05


class PowerRequest(BaseModel):
    pi1: float
    rho: float
    delta1: float
    m: int = 50
    n: int = 50
    alpha: float = 0.05
    replicates: int = 10_000
    seed: int = 0


class SampleSizeRequest(BaseModel):
    pi1: float
    rho: float
    delta1: float
    power: float = 0.8
    alpha: float = 0.05
    test: str = "score"
    replicates: int = 20_000
    seed: int = 0


def find_web_dir() -> Path | None:
    """Locate the built calculator bundle, if any."""
    env = os.environ.get("RHODIFF_WEB_DIR")
    candidates = [Path(env)] if env else []
    here = Path(__file__).resolve()
    candidates += [parent / "frontend" / "dist" for parent in here.parents[:4]]
    for cand in candidates:
        if cand and (cand / "index.html").is_file():
            return cand
    return None


def create_app() -> FastAPI:
    app = FastAPI(title="rhodiff calculator", version=SCHEMA_VERSION)

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        details = [
            {"field": ".".join(str(p) for p in err.get("loc", [])),
             "message": err.get("msg", "invalid")}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400,
                            content={"error": "malformed request", "details": details})

    def unprocessable(exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.get("/health")
    async def health():
        return {"status": "ok", "schema_version": SCHEMA_VERSION}

    @app.post("/api/test")
    async def api_test(req: TestRequest):
        try:
            table = parse_table_json(req.table.model_dump())
            report = run_all_tests(table, delta0=req.delta0,
                                   opts=FitOptions(), alpha=req.alpha)
        except (TableError, ModelDomainError, FitError, ValueError) as exc:
            return unprocessable(exc)
        return report_to_dict(report)

    @app.post("/api/power")
    async def api_power(req: PowerRequest):
        try:
            config = SimConfig(pi1=req.pi1, rho=req.rho, delta_true=req.delta1,
                               delta_null=0.0, m1=req.m, m2=req.m,
                               n1=req.n, n2=req.n, replicates=req.replicates,
                               alpha=req.alpha, seed=req.seed)
            summary = estimate_power(config)
        except (ModelDomainError, ValueError) as exc:
            return unprocessable(exc)
        return summary_to_dict(summary)

    @app.post("/api/samplesize")
    async def api_samplesize(req: SampleSizeRequest):
        if req.test not in TEST_NAMES:
            return unprocessable(ValueError(
                f"test must be one of {TEST_NAMES}, got {req.test!r}"))
        try:
            size = min_sample_size(rho=req.rho, pi1=req.pi1, delta1=req.delta1,
                                   target_power=req.power, alpha=req.alpha,
                                   test=req.test, replicates=req.replicates,
                                   seed=req.seed, size_cap=SIZE_CAP)
        except (ModelDomainError, ValueError) as exc:
            return unprocessable(exc)
        except RuntimeError as exc:
            return unprocessable(exc)
        return {
            "schema_version": SCHEMA_VERSION,
            "sample_size": size,
            "test": req.test,
            "target_power": req.power,
            "pi1": req.pi1,
            "rho": req.rho,
            "delta1": req.delta1,
            "alpha": req.alpha,
            "replicates": req.replicates,
            "seed": req.seed,
        }

    web_dir = find_web_dir()
    if web_dir is not None:
        app.mount("/", StaticFiles(directory=str(web_dir), html=True), name="web")

    return app
