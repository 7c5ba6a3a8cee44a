"""Command-line driver: ``ibd list``, ``ibd run`` and ``ibd verify-all``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

from .cases import REGISTRY, CaseRecord, InvalidParams, UnknownCase, format_params, run_case, verify_all

COLUMNS = ("case_id", "params", "method_value", "oracle_value", "abs_err", "rel_err", "tol", "status", "note",
           "seconds")
FORMATS = ("md", "csv", "json")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt_real(x: float) -> str:
    """17 significant digits with a lowercase exponent."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def fmt_value(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return fmt_real(z.real)
    im = fmt_real(z.imag)
    return f"{fmt_real(z.real)}{'' if im.startswith('-') else '+'}{im}j"


def _row(r: CaseRecord) -> dict:
    return {
        "case_id": r.case_id,
        "params": format_params(r.params),
        "method_value": fmt_value(r.method_value),
        "oracle_value": fmt_value(r.oracle_value),
        "abs_err": fmt_real(r.abs_err),
        "rel_err": fmt_real(r.rel_err),
        "tol": fmt_real(r.tol),
        "status": r.status,
        "note": r.note,
        "seconds": f"{r.seconds:.6f}",
    }


def render(records: list[CaseRecord], fmt: str) -> str:
    rows = [_row(r) for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
    for row in rows:
        cells = (str(row[c]).replace("|", "\\|") for c in COLUMNS)
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def read_config(path: str) -> dict:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    out: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err}") from err
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _parse_kv(items: list[str] | None) -> dict:
    params = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--param expects k=v, got {item!r}")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    return params


def _truthy(v: str) -> bool:
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off", ""):
        return False
    raise UsageError(f"not a boolean: {v!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key=value file; flags override it")
    common.add_argument("--tol", type=float, help="tolerance on abs_err or rel_err")
    common.add_argument("--seed", type=int, help="seed for Monte Carlo cases")
    common.add_argument("--format", choices=FORMATS, help="report format (default md)")
    common.add_argument("--heaviside-midpoint", action="store_true", default=None,
                        help="use H(0)=1/2 instead of H(0)=1")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="ibd", description="Integration by differentiation: verification cases")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="registered cases with their anchors")
    run = sub.add_parser("run", parents=[common], help="run one case")
    run.add_argument("case")
    run.add_argument("--param", action="append", metavar="K=V", help="case parameter (repeatable)")
    va = sub.add_parser("verify-all", parents=[common], help="run every case matching a glob")
    va.add_argument("--filter", metavar="GLOB", help="case id pattern (default *)")
    return parser


def _settings(args) -> dict:
    cfg = read_config(args.config) if args.config else {}
    params = {k[len("param."):]: v for k, v in cfg.items() if k.startswith("param.")}
    params.update(_parse_kv(getattr(args, "param", None)))
    try:
        tol = args.tol if args.tol is not None else (float(cfg["tol"]) if "tol" in cfg else None)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 12345))
    except ValueError as err:
        raise UsageError(f"bad config value: {err}") from err
    fmt = args.format or cfg.get("format", "md")
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    mid = args.heaviside_midpoint if args.heaviside_midpoint is not None else _truthy(cfg.get("heaviside_midpoint", "0"))
    pattern = getattr(args, "filter", None) or cfg.get("filter", "*")
    return {"params": params, "tol": tol, "seed": seed, "format": fmt, "midpoint": mid, "filter": pattern}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command == "list":
        for cid in sorted(REGISTRY):
            c = REGISTRY[cid]
            print(f"{cid}\t{c.description}\tanchor: {c.anchor}")
        return EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        s = _settings(args)
        if args.command == "run":
            records = [run_case(args.case, s["params"], s["tol"], s["seed"], s["midpoint"])]
            code = EXIT_FAIL if records[0].status == "fail" else EXIT_OK
        else:
            if s["params"]:
                raise UsageError("--param applies to run only")
            records, code = verify_all(s["filter"], s["tol"], s["seed"], s["midpoint"])
    except UnknownCase as err:
        print(f"ibd: unknown case {err.args[0]!r}; see 'ibd list'", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, InvalidParams) as err:
        print(f"ibd: {err}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(records, s["format"]))
    return code


if __name__ == "__main__":
    sys.exit(main())
