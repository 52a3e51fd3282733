"""HTTP front end over the dispatch layer.

Run with ``uvicorn kstar.service:app``.  Validation errors answer 400,
numerical errors 422; both carry the error class name.
"""
from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import dispatch as dp
from .errors import KStarError
from .schemas import ErrorResponse, EvalRequest, EvalResponse, RunConfigIn, VerifyRequest, VerifyResponse
from .words import EvalGrid

app = FastAPI(title="kstar", version="0.1.0")

_ERRORS = {400: {"model": ErrorResponse}, 422: {"model": ErrorResponse}}


def _run_config(c: RunConfigIn) -> dp.RunConfig:
    grid = None
    if c.points is not None:
        if not c.points:
            raise dp.ValidationError("a grid needs at least one (u, v) point")
        pts = np.array([[complex(a, b), complex(x, y)] for a, b, x, y in c.points], dtype=complex)
        grid = EvalGrid(pts)
    return dp.RunConfig(hbar=c.hbar, tol=c.tol, trunc_N=c.trunc_N, grid=grid)


def _failure(exc: Exception) -> JSONResponse:
    code, name = dp.error_exit(exc)
    status = 422 if code == dp.EXIT_NUMERICAL else 400
    return JSONResponse(status_code=status, content={"error": name, "detail": str(exc)})


@app.exception_handler(RequestValidationError)
def _schema_failure(request: Request, exc: RequestValidationError) -> JSONResponse:
    # schema rejections are validation errors, like the ones raised by dispatch
    detail = "; ".join(f"{'.'.join(map(str, e['loc']))}: {e['msg']}" for e in exc.errors())
    return JSONResponse(status_code=400, content={"error": "ValidationError", "detail": detail})


@app.get("/health")
def health():
    return {"status": "ok"}


@app.get("/ops")
def list_ops():
    return {name: [p.name for p in spec.params] for name, spec in dp.OPS.items()}


@app.post("/eval/{op}", response_model=EvalResponse, response_model_exclude_none=True, responses=_ERRORS)
def eval_op(op: str, req: EvalRequest):
    try:
        return dp.run_eval(op, req.params, _run_config(req.config))
    except (KStarError, ValueError) as exc:
        return _failure(exc)


@app.post("/verify/{suite}", response_model=VerifyResponse, responses=_ERRORS)
def verify_suite(suite: str, req: VerifyRequest | None = None):
    req = req or VerifyRequest()
    try:
        return dp.run_verify(suite, _run_config(req.config))
    except (KStarError, ValueError) as exc:
        return _failure(exc)
