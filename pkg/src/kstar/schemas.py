"""Request and response models for the HTTP service."""
from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

# complex inputs: a number, a string such as "1+2j", or [re, im]
ComplexIn = Union[float, str, tuple[float, float]]


class RunConfigIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hbar: float = Field(1.0, gt=0, description="Planck constant")
    tol: float = Field(1e-13, gt=0, lt=1, description="series truncation tolerance")
    trunc_N: int = Field(40, ge=0, le=400, description="diagonal series truncation")
    points: Optional[list[tuple[float, float, float, float]]] = Field(
        None, description="grid rows [u_re, u_im, v_re, v_im]; default 5 x 5 grid")


class EvalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    # values are checked by the dispatch layer against the operation table
    params: dict[str, Union[ComplexIn, int, bool, None]] = Field(default_factory=dict)
    config: RunConfigIn = Field(default_factory=RunConfigIn)


class GridOut(BaseModel):
    points: list[list[float]]
    values: Optional[list[list[float]]] = None


class DiagOut(BaseModel):
    basis: str
    N: int
    coeffs: list[tuple[int, float, float]]


class EvalResponse(BaseModel):
    model_config = ConfigDict(extra="allow")

    op: str
    params: dict[str, Any]
    grid: Optional[GridOut] = None
    diag: Optional[DiagOut] = None
    residuals: Optional[dict[str, float]] = None
    value: Optional[Any] = None


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfigIn = Field(default_factory=RunConfigIn)


class CheckRow(BaseModel):
    name: str
    status: Literal["pass", "xfail", "FAIL"]
    residual: float
    tol: float
    note: str = ""


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    rows: list[CheckRow]


class ErrorResponse(BaseModel):
    error: str
    detail: str
