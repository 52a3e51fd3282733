"""Operation table shared by the command line and the HTTP service.

``run_eval`` takes an operation name, a mapping of raw parameters (strings
from argv or JSON scalars) and a ``RunConfig``; it validates everything
before computing and returns a plain JSON-ready dict.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np

from . import diag as dg
from . import special as sp
from .errors import KStarError
from .starexp import classify, exchanging_interval, exp_2H, polar_element, q_scalar_sign, riccati_flow, GaussPoly
from .verify import SUITES, run_suite
from .weyl import ExprParam, HbarConfig
from .words import (EvalGrid, IntegralElement, default_grid, matrix_element, star_delta,
                    star_delta_continued, vacuum)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

MAX_TRUNC_N = 400


class ValidationError(ValueError):
    """Bad operation name, parameter or configuration value."""


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    hbar: float = 1.0
    tol: float = 1e-13
    trunc_N: int = dg.DEFAULT_N
    grid: EvalGrid | None = None
    fmt: str = "json"

    def __post_init__(self):
        if not (isinstance(self.hbar, (int, float)) and math.isfinite(self.hbar) and self.hbar > 0):
            raise ValidationError("hbar must be a positive finite number")
        if not (isinstance(self.tol, (int, float)) and 0 < self.tol < 1):
            raise ValidationError("tol must lie in (0, 1)")
        if not (isinstance(self.trunc_N, int) and 0 <= self.trunc_N <= MAX_TRUNC_N):
            raise ValidationError(f"trunc_N must be an integer in [0, {MAX_TRUNC_N}]")
        if self.fmt not in ("json", "csv"):
            raise ValidationError("format must be json or csv")

    @property
    def h(self) -> HbarConfig:
        return HbarConfig(self.hbar)

    @property
    def eval_grid(self) -> EvalGrid:
        return self.grid if self.grid is not None else default_grid()


def load_grid(path: str | Path) -> EvalGrid:
    """Read a grid from JSON (``{points: [...]}``) or CSV with the documented header."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read grid file {p}: {exc.strerror}") from exc
    try:
        if p.suffix.lower() == ".csv" or text.lstrip().startswith("u_re"):
            grid = EvalGrid.from_csv(text)
        else:
            grid = EvalGrid.from_json(json.loads(text))
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise ValidationError(f"malformed grid file {p}") from exc
    grid = EvalGrid(grid.points)
    if grid.points.ndim != 2 or grid.points.shape[1] != 2 or len(grid.points) == 0:
        raise ValidationError("a grid needs at least one (u, v) point")
    if not np.all(np.isfinite(grid.points)):
        raise ValidationError("grid points must be finite")
    return grid


def parse_config_file(path: str | Path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc.strerror}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{num}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def make_config(values: Mapping[str, Any]) -> RunConfig:
    """Build a ``RunConfig`` from loosely typed values (config file or flags)."""
    known = {"hbar", "tol", "trunc_N", "grid_file", "format"}
    extra = set(values) - known
    if extra:
        raise ValidationError(f"unknown configuration keys: {', '.join(sorted(extra))}")
    kw: dict[str, Any] = {}
    if values.get("hbar") is not None:
        kw["hbar"] = _real(values["hbar"], "hbar")
    if values.get("tol") is not None:
        kw["tol"] = _real(values["tol"], "tol")
    if values.get("trunc_N") is not None:
        kw["trunc_N"] = _int(values["trunc_N"], "trunc_N")
    if values.get("format") is not None:
        kw["fmt"] = str(values["format"])
    if values.get("grid_file"):
        kw["grid"] = load_grid(values["grid_file"])
    return RunConfig(**kw)


# ---------------------------------------------------------------------------
# parameter parsing

_REQUIRED = object()


def _complex(x, name: str) -> complex:
    if isinstance(x, bool):
        raise ValidationError(f"{name}: expected a complex number")
    if isinstance(x, (list, tuple)) and len(x) == 2:
        z = complex(_real(x[0], name), _real(x[1], name))
    elif isinstance(x, (int, float, complex)):
        z = complex(x)
    elif isinstance(x, str):
        try:
            z = complex(x.strip().replace(" ", "").replace("i", "j"))
        except ValueError:
            raise ValidationError(f"{name}: cannot parse {x!r} as a complex number") from None
    else:
        raise ValidationError(f"{name}: expected a complex number")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError(f"{name} must be finite")
    return z


def _real(x, name: str) -> float:
    if isinstance(x, bool):
        raise ValidationError(f"{name}: expected a real number")
    try:
        r = float(x)
    except (TypeError, ValueError):
        raise ValidationError(f"{name}: cannot parse {x!r} as a real number") from None
    if not math.isfinite(r):
        raise ValidationError(f"{name} must be finite")
    return r


def _int(x, name: str) -> int:
    if isinstance(x, bool):
        raise ValidationError(f"{name}: expected an integer")
    if isinstance(x, int):
        return x
    if isinstance(x, float) and x.is_integer():
        return int(x)
    try:
        return int(str(x).strip())
    except ValueError:
        raise ValidationError(f"{name}: cannot parse {x!r} as an integer") from None


def _bool(x, name: str) -> bool:
    if isinstance(x, bool):
        return x
    s = str(x).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"{name}: expected a boolean")


@dataclass(frozen=True)
class Param:
    name: str
    kind: str                           # complex | real | int | bool | choice
    default: Any = _REQUIRED
    choices: tuple = ()
    help: str = ""
    lo: int | None = None
    hi: int | None = None

    def parse(self, raw):
        if self.kind == "complex":
            return _complex(raw, self.name)
        if self.kind == "real":
            return _real(raw, self.name)
        if self.kind == "bool":
            return _bool(raw, self.name)
        if self.kind == "int":
            n = _int(raw, self.name)
            if (self.lo is not None and n < self.lo) or (self.hi is not None and n > self.hi):
                raise ValidationError(f"{self.name} must lie in [{self.lo}, {self.hi}]")
            return n
        s = str(raw)
        if s not in self.choices:
            raise ValidationError(f"{self.name} must be one of {', '.join(self.choices)}")
        return s


K_PARAMS = (
    Param("delta", "complex", 0.5, help="K entry delta"),
    Param("dprime", "complex", 0.5, help="K entry delta'"),
    Param("c", "complex", 2 + 0.5j, help="K off-diagonal entry c"),
)
SIGN = Param("sign", "choice", "+", ("+", "-"), "sign in z +- H")


@dataclass(frozen=True)
class OpSpec:
    name: str
    params: tuple[Param, ...]
    fn: Callable[[dict, RunConfig], dict]
    help: str = ""


def _K(p: dict) -> ExprParam:
    return ExprParam(p["delta"], p["c"], p["dprime"])


# ---------------------------------------------------------------------------
# result helpers


def _cx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _grid_out(values, cfg: RunConfig) -> dict:
    return cfg.eval_grid.with_values(values).to_json()


def _element_out(x: IntegralElement, cfg: RunConfig) -> dict:
    return {"grid": _grid_out(x.evaluate(cfg.eval_grid), cfg)}


def _gauss_out(g: GaussPoly, cfg: RunConfig) -> dict:
    grid = cfg.eval_grid
    return {"gauss": g.to_json(), "grid": _grid_out(g(grid.u, grid.v, cfg.h), cfg)}


# ---------------------------------------------------------------------------
# operations


def _op_exp(p: dict, cfg: RunConfig) -> dict:
    K, h = _K(p), cfg.h
    g = exp_2H(p["t"], K, h)
    out = _gauss_out(g, cfg)
    if p["check"]:
        one = GaussPoly(1.0 + 0j)
        flow = riccati_flow(one, p["t"], 400, K, h)
        res = np.max(np.abs(np.array(flow.quad.as_tuple() + (flow.amp,)) - np.array(g.quad.as_tuple() + (g.amp,))))
        out["residuals"] = {"riccati_flow": float(res)}
    return out


def _op_interval(p: dict, cfg: RunConfig) -> dict:
    K = _K(p)
    a, b = exchanging_interval(K)
    return {"a": a, "b": b, "class": classify(K).tag}


def _op_classify(p: dict, cfg: RunConfig) -> dict:
    return {"class": classify(_K(p)).tag}


def _op_polar(p: dict, cfg: RunConfig) -> dict:
    K, h = _K(p), cfg.h
    out = _gauss_out(polar_element(K, h), cfg)
    out["q_sign"] = q_scalar_sign(K, h)
    return out


def _op_vacuum(p: dict, cfg: RunConfig) -> dict:
    return _element_out(vacuum(p["kind"], _K(p), cfg.h), cfg)


def _op_matelem(p: dict, cfg: RunConfig) -> dict:
    kind = p["kind"]
    if kind != "D" and (p["p"] < 0 or p["q"] < 0):
        raise ValidationError("E and Ebar indices must be non-negative")
    return _element_out(matrix_element(kind, p["p"], p["q"], _K(p), cfg.h), cfg)


def _op_delta(p: dict, cfg: RunConfig) -> dict:
    K, h = _K(p), cfg.h
    if p["continued"]:
        if p["xi"] != 0:
            raise ValidationError("the continued star-delta is defined for xi = 0")
        x = star_delta_continued(p["z"], K, h)
    else:
        x = star_delta(p["z"], p["xi"], K, h)
    return _element_out(x, cfg)


_BASIS = {"E": "Emat", "Ebar": "EbarMat"}


def _diag_out(d: dg.DiagSeries, n: int | None) -> dict:
    out: dict = {"diag": d.to_json()}
    if n is not None:
        if not 0 <= n <= d.N:
            raise ValidationError(f"n must lie in [0, {d.N}]")
        out["value"] = _cx(d.coeff(n))
    return out


def _op_gamma(p: dict, cfg: RunConfig) -> dict:
    z, sign, mode = p["z"], p["sign"], p["mode"]
    basis = _BASIS[p["basis"]]
    if mode == "diag":
        return _diag_out(sp.gamma_diag(z, sign, basis, cfg.trunc_N), p["n"])
    if mode == "inverse":
        return _diag_out(sp.star_gamma_inverse_diag(z, sign, basis, cfg.trunc_N), p["n"])
    res = sp.star_gamma(z, sign, _K(p), cfg.h, basis, cfg.trunc_N)
    out = _element_out(res.integral, cfg)
    out["method"] = res.meta.get("method")
    return out


def _op_zeta(p: dict, cfg: RunConfig) -> dict:
    z, sign, mode = p["z"], p["sign"], p["mode"]
    K, h = _K(p), cfg.h
    basis = _BASIS[p["basis"]]
    if mode == "diag":
        return _diag_out(sp.zeta_diag(z, cfg.trunc_N, basis), p["n"])
    if mode == "inverse":
        return _diag_out(sp.star_zeta_inverse_diag(z, cfg.trunc_N, basis), p["n"])
    if mode == "L":
        return _element_out(sp.L_star(z, sign, K, h).integral, cfg)
    if mode == "euler":
        return _element_out(sp.star_zeta_euler(z, sign, p["P"], p["Kmax"], K, h, tol=cfg.tol), cfg)
    return _element_out(sp.star_zeta(z, sign, p["terms"], K, h, cfg.trunc_N).integral, cfg)


def _op_partition(p: dict, cfg: RunConfig) -> dict:
    z, sign, K, h = p["z"], p["sign"], _K(p), cfg.h
    if p["mode"] == "product":
        x = sp.partition_product(z, sign, p["L"], K, h)
        coeffs = sp.partition_product_coeffs(p["L"], 3 * p["L"])
    else:
        x = sp.partition_gen(z, sign, p["nmax"], K, h)
        coeffs = [sp.partitions(k) for k in range(p["nmax"] + 1)]
    out = _element_out(x, cfg)
    out["coeffs"] = coeffs
    return out


def _op_reflect(p: dict, cfg: RunConfig) -> dict:
    s, k = p["s"], p["k"]
    r = sp.reflection_residual(s, k)
    out: dict = {"value": r, "residuals": {"reflection": r}}
    if 0 < s.real < 1:
        _, G = sp.FG_hybrid(s, k)
        _, Gr = sp.FG_hybrid(1 - s, k, pairing="minus")
        out["residuals"]["G_symmetry"] = float(max(np.max(np.abs(G.epart.coeffs - Gr.epart.coeffs)),
                                                   np.max(np.abs(G.ebarpart.coeffs - Gr.ebarpart.coeffs))))
    return out


OPS: dict[str, OpSpec] = {
    "exp": OpSpec("exp", (Param("t", "complex", 0.5, help="exponent of exp_*(t (2/ih) u o v)"),
                          Param("check", "bool", False, help="compare with the Riccati flow")) + K_PARAMS,
                  _op_exp, "closed-form star-exponential of 2H"),
    "interval": OpSpec("interval", K_PARAMS, _op_interval, "exchanging interval and class"),
    "classify": OpSpec("classify", K_PARAMS, _op_classify, "class Kplus, Kzero or Kminus"),
    "polar": OpSpec("polar", K_PARAMS, _op_polar, "polar element and q-scalar sign"),
    "vacuum": OpSpec("vacuum", (Param("kind", "choice", "vac", ("vac", "barvac", "pseudovac")),) + K_PARAMS,
                     _op_vacuum, "vacuum idempotents"),
    "matelem": OpSpec("matelem", (Param("kind", "choice", "E", ("E", "Ebar", "D")),
                                  Param("p", "int", 0, lo=-50, hi=50), Param("q", "int", 0, lo=-50, hi=50))
                      + K_PARAMS, _op_matelem, "matrix elements E, Ebar, D"),
    "delta": OpSpec("delta", (Param("z", "complex", 0.0), Param("xi", "real", 0.0),
                              Param("continued", "bool", False)) + K_PARAMS,
                    _op_delta, "star-delta"),
    "gamma": OpSpec("gamma", (Param("z", "complex", _REQUIRED), SIGN,
                              Param("mode", "choice", "integral", ("integral", "diag", "inverse")),
                              Param("basis", "choice", "E", ("E", "Ebar")),
                              Param("n", "int", None, lo=0, hi=MAX_TRUNC_N)) + K_PARAMS,
                    _op_gamma, "star-gamma"),
    "zeta": OpSpec("zeta", (Param("z", "complex", _REQUIRED), SIGN,
                            Param("mode", "choice", "dirichlet", ("dirichlet", "euler", "diag", "inverse", "L")),
                            Param("basis", "choice", "E", ("E", "Ebar")),
                            Param("n", "int", None, lo=0, hi=MAX_TRUNC_N),
                            Param("terms", "int", 200, lo=1, hi=100000),
                            Param("P", "int", 100, lo=2, hi=10 ** 6),
                            Param("Kmax", "int", 12, lo=0, hi=64)) + K_PARAMS,
                   _op_zeta, "star-zeta and L"),
    "partition": OpSpec("partition", (Param("z", "complex", 1.0), SIGN,
                                      Param("mode", "choice", "series", ("series", "product")),
                                      Param("nmax", "int", 50, lo=0, hi=10 ** 4),
                                      Param("L", "int", 10, lo=1, hi=1000)) + K_PARAMS,
                        _op_partition, "partition generating element"),
    "reflect": OpSpec("reflect", (Param("s", "complex", _REQUIRED), Param("k", "int", 0, lo=0, hi=MAX_TRUNC_N)),
                      _op_reflect, "reflection residual and G symmetry"),
}


def parse_params(op: str, raw: Mapping[str, Any]) -> dict:
    if op not in OPS:
        raise ValidationError(f"unknown operation {op!r}")
    spec = OPS[op]
    names = {p.name for p in spec.params}
    extra = set(raw) - names
    if extra:
        raise ValidationError(f"{op}: unknown parameters {', '.join(sorted(extra))}")
    out = {}
    for prm in spec.params:
        val = raw.get(prm.name)
        if val is None:
            if prm.default is _REQUIRED:
                raise ValidationError(f"{op}: missing required parameter {prm.name}")
            out[prm.name] = prm.default if prm.default is None else prm.parse(prm.default)
        else:
            out[prm.name] = prm.parse(val)
    return out


def _jsonable(p: dict) -> dict:
    return {k: (_cx(v) if isinstance(v, complex) else v) for k, v in p.items()}


def run_eval(op: str, raw_params: Mapping[str, Any], cfg: RunConfig = RunConfig()) -> dict:
    """Validate and evaluate one operation; numerical failures raise ``KStarError``."""
    params = parse_params(op, raw_params)
    try:
        body = OPS[op].fn(params, cfg)
    except (KStarError, ValidationError):
        raise
    except ValueError as exc:
        # argument checks inside the library that reach past dispatch validation
        raise ValidationError(str(exc)) from exc
    return {"op": op, "params": _jsonable(params), **body}


def run_verify(suite: str, cfg: RunConfig = RunConfig()) -> dict:
    if suite != "all" and suite not in SUITES:
        raise ValidationError(f"unknown suite {suite!r}; choose from {', '.join([*SUITES, 'all'])}")
    rows = run_suite(suite, cfg.h)
    return {
        "suite": suite,
        "passed": all(r.status != "FAIL" for r in rows),
        "rows": [{"name": r.name, "status": r.status, "residual": float(r.residual),
                  "tol": float(r.tol), "note": r.note} for r in rows],
    }


def error_exit(exc: BaseException) -> tuple[int, str]:
    """Exit code and error class name for a failure raised by ``run_eval``."""
    if isinstance(exc, KStarError):
        return EXIT_NUMERICAL, type(exc).__name__
    if isinstance(exc, (ValidationError, ValueError)):
        return EXIT_VALIDATION, "ValidationError"
    raise exc


# ---------------------------------------------------------------------------
# rendering


_LEAF_LIST = re.compile(r"\[\s+([^\[\]{}\"]*?)\s+\]")


def to_json_text(result: dict) -> str:
    text = json.dumps(result, indent=2)
    # lists of numbers stay on one line
    return _LEAF_LIST.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]", text) + "\n"


def to_csv_text(result: dict) -> str:
    if "rows" in result:
        lines = ["name,status,residual,tol"]
        for r in result["rows"]:
            name = '"' + r["name"].replace('"', '""') + '"'
            lines.append(f"{name},{r['status']},{r['residual']!r},{r['tol']!r}")
        return "\n".join(lines) + "\n"
    if "grid" in result:
        return EvalGrid.from_json(result["grid"]).to_csv()
    if "diag" in result:
        lines = ["n,re,im"] + [f"{n},{re!r},{im!r}" for n, re, im in result["diag"]["coeffs"]]
        return "\n".join(lines) + "\n"
    lines = ["key,value"]
    for k, v in result.items():
        if k in ("op", "params"):
            continue
        if isinstance(v, dict):
            lines += [f"{k}.{kk},{vv!r}" for kk, vv in v.items()]
        elif isinstance(v, list):
            lines.append(f"{k},{' '.join(repr(x) for x in v)}")
        else:
            lines.append(f"{k},{v}")
    return "\n".join(lines) + "\n"


def render(result: dict, fmt: str) -> str:
    return to_csv_text(result) if fmt == "csv" else to_json_text(result)
