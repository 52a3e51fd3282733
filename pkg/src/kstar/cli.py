"""``kstar`` command line: ``kstar eval <op> [--param value ...]`` and ``kstar verify <suite>``.

Exit codes: 0 success, 1 a verification row failed, 2 invalid input,
3 numerical error (the error class is printed on stderr).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dispatch as dp
from .errors import KStarError
from .verify import SUITES


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which matches the validation code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(dp.EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--hbar", help="Planck constant (default 1)")
    g.add_argument("--tol", help="truncation tolerance for series (default 1e-13)")
    g.add_argument("--trunc-N", dest="trunc_N", help="diagonal series truncation N (default 40)")
    g.add_argument("--grid-file", dest="grid_file", help="evaluation grid, JSON or CSV")
    g.add_argument("--out", help="write output here instead of stdout")
    g.add_argument("--format", help="json or csv (verify also accepts table)")
    g.add_argument("--config", help="key = value file; flags override it")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="kstar", description="K-ordered star calculus on the Weyl algebra")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = sub.add_parser("eval", help="evaluate one operation")
    ops = ev.add_subparsers(dest="op", required=True, parser_class=_Parser)
    for spec in dp.OPS.values():
        op = ops.add_parser(spec.name, help=spec.help, parents=[common])
        for prm in spec.params:
            extra = f" ({'|'.join(prm.choices)})" if prm.choices else ""
            default = "" if prm.default is dp._REQUIRED else f" [default {prm.default}]"
            op.add_argument(f"--{prm.name}", dest=f"p_{prm.name}", metavar=prm.kind.upper(),
                            help=(prm.help or prm.name) + extra + default)

    vf = sub.add_parser("verify", help="run a property suite", parents=[common])
    vf.add_argument("suite", choices=[*SUITES, "all"])
    return parser


def _config(args) -> tuple[dp.RunConfig, str | None]:
    values: dict = {}
    if args.config:
        values.update(dp.parse_config_file(args.config))
    for key in ("hbar", "tol", "trunc_N", "grid_file", "format"):
        val = getattr(args, key)
        if val is not None:
            values[key] = val
    fmt = values.get("format")
    if args.command == "verify" and fmt == "table":
        values.pop("format")
    cfg = dp.make_config(values)
    return cfg, fmt


def format_table(result: dict) -> str:
    rows = result["rows"]
    width = max([len(r["name"]) for r in rows] + [8])
    lines = [f"{'status':6s}  {'residual':>10s}  {'tol':>8s}  name", "-" * (32 + width)]
    for r in rows:
        lines.append(f"{r['status']:6s}  {r['residual']:10.3e}  {r['tol']:8.1e}  {r['name']}")
    n_fail = sum(r["status"] == "FAIL" for r in rows)
    n_x = sum(r["status"] == "xfail" for r in rows)
    lines.append(f"{len(rows)} checks, {n_fail} failed, {n_x} expected failures")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_eval(args) -> int:
    cfg, _ = _config(args)
    raw = {k[2:]: v for k, v in vars(args).items() if k.startswith("p_") and v is not None}
    result = dp.run_eval(args.op, raw, cfg)
    _emit(dp.render(result, cfg.fmt), args.out)
    return dp.EXIT_OK


def cmd_verify(args) -> int:
    cfg, fmt = _config(args)
    result = dp.run_verify(args.suite, cfg)
    text = format_table(result) if fmt in (None, "table") else dp.render(result, cfg.fmt)
    _emit(text, args.out)
    return dp.EXIT_OK if result["passed"] else dp.EXIT_VERIFY_FAILED


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return cmd_eval(args) if args.command == "eval" else cmd_verify(args)
    except (KStarError, ValueError) as exc:
        code, name = dp.error_exit(exc)
        sys.stderr.write(f"kstar: {name}: {exc}\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
