"""Command-line front end.

Examples::

    evoalg classify -m 2,4,6,2
    evoalg iso --left 1,0,-1,0 --right 0,1,0,-1
    evoalg cea check --family f3 --phi "exp(t)" --psi "t"
    evoalg cea period --family f2 --var t --max 10
    evoalg trace --family f2 --s 0 --t0 0 --t1 3.2 --step 0.1 --out trace.csv
    evoalg boundaries --family f2 --s 0 --t0 1 --t1 2

Any option may also come from ``--config FILE`` holding ``key = value``
lines (keys are the long option names); command-line flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import BasisChange, StructMatrix
from .cea import (
    F1,
    F2,
    F3,
    Custom,
    Family,
    ck_check,
    ck_triples,
    homogeneity_check,
    homogeneity_samples,
    periodicity_scan,
)
from .classify import CanonicalClass, classify
from .dynamics import find_boundaries, trace
from .expr import EvalDomainError, ExprSyntaxError, UnknownIdentifier
from .iso import Inconclusive, iso
from .scalars import DEFAULT_TOL, is_exact, parse_scalar

EXIT_OK, EXIT_ERROR, EXIT_AMBIGUOUS = 0, 1, 2

TRACE_COLUMNS = ("s", "t", "class", "param1", "param2", "expected_class", "agrees", "boundary")

PRINTED_NOTES = {
    "f1": "exponent t instead of t - s: violates Chapman-Kolmogorov and time-homogeneity",
    "f2": "extra factor 1/2: Chapman-Kolmogorov residual sqrt(2)/4 at every triple",
}


class ConfigError(ValueError):
    pass


# formatting ------------------------------------------------------------------


def fmt_number(x) -> str:
    """Shortest text with at most 12 significant digits."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    text = format(float(x), ".12g")
    return "0" if text == "-0" else text


def json_number(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    value = float(format(float(x), ".12g"))
    if value.is_integer() and abs(value) < 1e15:
        return int(value)
    return value


def _exact_text(x):
    return str(x) if is_exact(x) else None


def _class_json(c: CanonicalClass) -> dict:
    return {"class": c.tag, "params": [json_number(p) for p in c.params]}


def _witness_json(t: BasisChange) -> list:
    return [[json_number(v) for v in row] for row in t.rows]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# configuration ---------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    options: dict = field(default_factory=dict)

    def echo(self) -> dict:
        return {"command": self.command,
                **{k: v for k, v in sorted(self.options.items()) if v is not None and k != "config"}}


def read_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def parse_matrix(text: str) -> StructMatrix:
    parts = [p for p in text.replace(";", ",").split(",")]
    if len(parts) != 4:
        raise ConfigError(f"matrix needs four comma-separated entries, got {text!r}")
    try:
        return StructMatrix(*(parse_scalar(p) for p in parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad matrix literal {text!r}: {exc}") from None


def _float(opts: dict, key: str, default=None) -> float | None:
    value = opts.get(key)
    if value is None:
        return default
    try:
        return float(parse_scalar(str(value)))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"--{key.replace('_', '-')} expects a number, got {value!r}") from None


def _flag(opts: dict, key: str) -> bool:
    value = opts.get(key)
    if isinstance(value, str):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key} expects a boolean, got {value!r}")
    return bool(value)


def build_family(opts: dict) -> Family:
    kind = (opts.get("family") or "").lower()
    printed = _flag(opts, "printed_form")
    if kind == "f1":
        lam = _float(opts, "lambda_", 2.0)
        mu = _float(opts, "mu", 0.5)
        try:
            return F1(lam, mu, "t" if printed else "t-s")
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if kind == "f2":
        return F2(half_factor=printed)
    if kind == "f3":
        return F3.from_text(opts.get("phi") or "exp(t)", opts.get("psi") or "t")
    if kind == "custom":
        keys = ("m11", "m12", "m21", "m22")
        if any(opts.get(k) is None for k in keys):
            raise ConfigError("custom family needs --m11 --m12 --m21 --m22")
        return Custom.from_text(*(opts[k] for k in keys))
    raise ConfigError("--family must be one of f1, f2, f3, custom")


def _family_json(f: Family) -> dict:
    desc = f.describe()
    desc["printed_form"] = bool(f.printed_variant)
    return desc


# commands --------------------------------------------------------------------


def cmd_classify(cfg: RunConfig, out) -> int:
    m = parse_matrix(cfg.options.get("matrix") or "")
    tol = _float(cfg.options, "tol", DEFAULT_TOL)
    rec = classify(m, tol)
    report = {
        "config": cfg.echo(),
        "input": [[json_number(v) for v in row] for row in m.rows],
        "mode": "exact" if m.exact else "floating",
        **_class_json(rec.cls),
        "params_exact": [_exact_text(p) for p in rec.cls.params] if m.exact else None,
        "witness": _witness_json(rec.witness),
        "witness_exact": [[str(v) for v in row] for row in rec.witness.rows] if m.exact else None,
        "verified": rec.verified,
        "ambiguous": rec.ambiguous,
        "residual": json_number(rec.residual),
    }
    if (cfg.options.get("format") or "json") == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["class", "param1", "param2", "verified", "ambiguous"])
        params = [fmt_number(p) for p in rec.cls.params] + ["", ""]
        w.writerow([rec.cls.tag, params[0], params[1], str(rec.verified).lower(),
                    str(rec.ambiguous).lower()])
    else:
        out.write(_dump(report))
    return EXIT_AMBIGUOUS if rec.ambiguous else EXIT_OK


def cmd_iso(cfg: RunConfig, out) -> int:
    left = parse_matrix(cfg.options.get("left") or "")
    right = parse_matrix(cfg.options.get("right") or "")
    tol = _float(cfg.options, "tol", DEFAULT_TOL)
    try:
        res = iso(left, right, tol)
    except Inconclusive as exc:
        out.write(_dump({"config": cfg.echo(), "isomorphic": None, "inconclusive": str(exc)}))
        return EXIT_AMBIGUOUS
    report = {
        "config": cfg.echo(),
        "left": [[json_number(v) for v in row] for row in left.rows],
        "right": [[json_number(v) for v in row] for row in right.rows],
        "isomorphic": res.isomorphic,
        "method": res.method,
        "witness": _witness_json(res.witness) if res.witness is not None else None,
    }
    out.write(_dump(report))
    return EXIT_OK


def _window(opts: dict, default: tuple[float, float]) -> tuple[float, float]:
    text = opts.get("window")
    if text is None:
        return default
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ConfigError("--window expects LO,HI")
    lo, hi = (float(parse_scalar(p)) for p in parts)
    if not 0 <= lo < hi:
        raise ConfigError("--window must satisfy 0 <= LO < HI")
    return lo, hi


def cmd_cea(cfg: RunConfig, out) -> int:
    opts = cfg.options
    f = build_family(opts)
    tol = _float(opts, "tol", DEFAULT_TOL)
    samples = int(_float(opts, "samples", 0) or 0)
    sub = opts.get("check_kind")
    report: dict = {"config": cfg.echo(), "family": _family_json(f), "check": sub}
    if sub == "check":
        triples = ck_triples(samples or 1000, _window(opts, (0.0, 3.0)))
        report.update(ck_check(f, triples, tol).to_dict())
    elif sub == "homogeneity":
        pts = homogeneity_samples(samples or 200, _window(opts, (0.0, 2.0)))
        report.update(homogeneity_check(f, pts, tol).to_dict())
    elif sub == "period":
        var = opts.get("var") or "t"
        if var not in ("s", "t"):
            raise ConfigError("--var must be s or t")
        p_range = (_float(opts, "min", 0.0), _float(opts, "max", 10.0))
        if not 0 <= p_range[0] < p_range[1]:
            raise ConfigError("period range must satisfy 0 <= min < max")
        rep = periodicity_scan(f, var, p_range, n_samples=samples or 16, tol=tol)
        report.update(rep.to_dict())
    else:
        raise ConfigError("cea subcommand must be check, homogeneity or period")
    for key in ("max_residual", "max_relative_residual", "period", "residual", "tolerance"):
        if report.get(key) is not None:
            report[key] = json_number(report[key])
    if f.printed_variant:
        report["discrepancy_note"] = PRINTED_NOTES[f.describe()["family"]]
    out.write(_dump(report))
    return EXIT_OK


def _grid(opts: dict) -> tuple[float, float, float, float]:
    s = _float(opts, "s", 0.0)
    t0 = _float(opts, "t0", s)
    t1 = _float(opts, "t1", None)
    step = _float(opts, "step", None)
    if t1 is None or step is None:
        raise ConfigError("trace needs --t1 and --step")
    if s < 0 or t0 < s or t1 < t0 or step <= 0:
        raise ConfigError("grid must satisfy 0 <= s <= t0 <= t1 and step > 0")
    return s, t0, t1, step


def render_trace(records, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "json":
        rows = []
        for r in records:
            rows.append({
                "s": json_number(r.s),
                "t": json_number(r.t),
                **_class_json(r.cls),
                "expected_class": r.expected.tag if r.expected else None,
                "expected_params": [json_number(p) for p in r.expected.params] if r.expected else None,
                "agrees": r.agrees,
                "boundary": r.boundary,
                "ambiguous": r.ambiguous,
            })
        buf.write(_dump(rows))
        return buf.getvalue()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for r in records:
        params = [fmt_number(p) for p in r.cls.params] + ["", ""]
        w.writerow([
            fmt_number(r.s), fmt_number(r.t), r.cls.tag, params[0], params[1],
            r.expected.tag if r.expected else "",
            "" if r.agrees is None else str(r.agrees).lower(),
            str(r.boundary).lower(),
        ])
    return buf.getvalue()


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".evoalg-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_trace(cfg: RunConfig, out) -> int:
    opts = cfg.options
    f = build_family(opts)
    s, t0, t1, step = _grid(opts)
    tol = _float(opts, "tol", DEFAULT_TOL)
    fmt = opts.get("format") or ("json" if str(opts.get("out") or "").endswith(".json") else "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("--format must be csv or json")
    records = trace(f, s, t0, t1, step, tol)
    text = render_trace(records, fmt)
    print(json.dumps({"config": cfg.echo(), "family": _family_json(f)}), file=sys.stderr)
    if opts.get("out"):
        _write_atomic(opts["out"], text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_boundaries(cfg: RunConfig, out) -> int:
    opts = cfg.options
    f = build_family(opts)
    s, t0, t1, _ = _grid({**opts, "step": opts.get("step") or "1"})
    tol = _float(opts, "tol", DEFAULT_TOL)
    found = find_boundaries(f, s, t0, t1, tol=tol)
    out.write(_dump({
        "config": cfg.echo(),
        "family": _family_json(f),
        "boundaries": [
            {"s": json_number(b.s), "t": json_number(b.t),
             "before": _class_json(b.before), "after": _class_json(b.after)}
            for b in found
        ],
    }))
    return EXIT_OK


# argument parsing ------------------------------------------------------------


def _add_family_options(p: argparse.ArgumentParser):
    p.add_argument("--family", help="f1, f2, f3 or custom")
    p.add_argument("--lambda", dest="lambda_", help="F1 lambda (>= 0)")
    p.add_argument("--mu", help="F1 mu (>= 0)")
    p.add_argument("--phi", help="F3 phi(t) expression")
    p.add_argument("--psi", help="F3 psi(t) expression")
    for key in ("m11", "m12", "m21", "m22"):
        p.add_argument(f"--{key}", help="custom entry, expression in s and t")
    p.add_argument("--printed-form", action="store_true", default=None,
                   help="F1: exponent t; F2: extra factor 1/2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evoalg", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="file of 'key = value' lines")
        p.add_argument("--tol", help="relative zero tolerance (default 1e-9)")

    p = sub.add_parser("classify", help="canonical class of a structural matrix")
    p.add_argument("-m", "--matrix", help="a11,a12,a21,a22 (decimals or p/q)")
    p.add_argument("--format", choices=("json", "csv"))
    common(p)

    p = sub.add_parser("iso", help="isomorphism test with witness")
    p.add_argument("--left")
    p.add_argument("--right")
    common(p)

    p = sub.add_parser("cea", help="Chapman-Kolmogorov / homogeneity / period checks")
    p.add_argument("check_kind", choices=("check", "homogeneity", "period"))
    _add_family_options(p)
    p.add_argument("--samples", help="number of sample points")
    p.add_argument("--window", help="LO,HI time window for samples")
    p.add_argument("--var", help="period variable, s or t")
    p.add_argument("--min", help="smallest period considered (exclusive)")
    p.add_argument("--max", help="largest period considered")
    common(p)

    for name, helptext in (("trace", "classify a CEA along a time grid"),
                           ("boundaries", "locate class changes in a time window")):
        p = sub.add_parser(name, help=helptext)
        _add_family_options(p)
        p.add_argument("--s", help="start time s")
        p.add_argument("--t0", help="first t")
        p.add_argument("--t1", help="last t")
        p.add_argument("--step", help="grid step")
        if name == "trace":
            p.add_argument("--out", help="output file (default stdout)")
            p.add_argument("--format", choices=("csv", "json"))
        common(p)
    return parser


COMMANDS = {
    "classify": cmd_classify,
    "iso": cmd_iso,
    "cea": cmd_cea,
    "trace": cmd_trace,
    "boundaries": cmd_boundaries,
}


def resolve(argv) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = {k: v for k, v in vars(args).items() if k != "command"}
    if opts.get("config"):
        allowed = set(opts) - {"config", "check_kind"}
        for key, value in read_config_file(opts["config"]).items():
            key = "lambda_" if key == "lambda" else key
            if key not in allowed:
                raise ConfigError(f"unknown config key {key!r} for {args.command}")
            if opts.get(key) is None:
                opts[key] = value
    return RunConfig(args.command, opts)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        cfg = resolve(argv)
        return COMMANDS[cfg.command](cfg, out)
    except (ConfigError, ExprSyntaxError, UnknownIdentifier, EvalDomainError,
            ArithmeticError, ValueError, OSError) as exc:
        print(f"evoalg: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
