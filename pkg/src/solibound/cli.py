"""Command-line front end: ``eval``, ``verify`` and ``contour``.

Exit codes: 0 success, 1 poles hit (eval/contour) or failed checks (verify),
2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kp, suites, toda
from .errors import ParameterError, PoleError, SoliboundError
from .field_eval import Axis, GridSpec
from .verify import run_suite

KP_KEYS = {"alpha": "alpha", "y0": "y0", "p": "p", "q": "q", "d": "d", "l": "l", "g": "g_const",
           "g_const": "g_const"}
TODA_KEYS = {"c": "c", "D": "D", "x0": "x0", "a0": "a0", "p": "p", "k": "k", "nu": "nu", "u0": "u0"}
KP_SOLUTIONS = ("seed", "dressed")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    example: str | None = None
    solution: str | None = None
    params: dict = field(default_factory=dict)
    grid: list = field(default_factory=list)
    h: float = 1e-3
    suite: str | None = None
    format: str = "csv"
    out: str | None = None

    def to_dict(self):
        d = asdict(self)
        d.pop("out")
        return d


# ---------------------------------------------------------------------------
# parsing


def parse_value(text):
    t = str(text).strip()
    if t in ("i", "1j", "+i"):
        return 1j
    if t == "-i":
        return -1j
    try:
        return float(t)
    except ValueError:
        pass
    try:
        return complex(t.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse parameter value {text!r}") from None


def encode_value(v):
    """JSON-safe parameter value: float when real, ``"a+bj"`` otherwise."""
    if v is None or isinstance(v, str):
        return v
    c = complex(v)
    if c.imag == 0:
        return float(c.real)
    return repr(c).strip("()")


def parse_param(item):
    key, sep, val = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"--param expects key=value, got {item!r}")
    return key.strip(), parse_value(val)


def parse_grid(item):
    parts = item.split(":")
    if len(parts) != 4:
        raise ConfigError(f"--grid expects axis:min:max:count, got {item!r}")
    name, lo, hi, count = parts
    try:
        return [name, float(lo), float(hi), int(count)]
    except ValueError:
        raise ConfigError(f"bad numbers in --grid {item!r}") from None


# ---------------------------------------------------------------------------
# model resolution


def _resolve_kp(cfg: RunConfig):
    over = {}
    for k, v in cfg.params.items():
        if k not in KP_KEYS:
            raise ConfigError(f"unknown kp parameter {k!r} (allowed: {', '.join(sorted(KP_KEYS))})")
        over[KP_KEYS[k]] = parse_value(v) if isinstance(v, str) else v
    P = suites.kp_params(over)
    if cfg.solution == "dressed":
        P.check_dressed()
    return P


def _resolve_toda(cfg: RunConfig):
    over = {}
    for k, v in cfg.params.items():
        if k not in TODA_KEYS:
            raise ConfigError(f"unknown toda parameter {k!r} (allowed: {', '.join(sorted(TODA_KEYS))})")
        v = parse_value(v) if isinstance(v, str) else v
        over[TODA_KEYS[k]] = v if k in ("p", "k", "nu") else float(complex(v).real)
    P = suites.toda_params(cfg.example, over)
    if cfg.solution == "dressed":
        P.check_dressed()
    return P


def resolved_params(P):
    if isinstance(P, kp.KPParams):
        names = ("alpha", "y0", "p", "q", "d", "l", "g_const")
    else:
        names = ("c", "x0", "a0", "D", "p", "k", "nu", "u0")
    return {n: encode_value(getattr(P, n)) for n in names}


def resolve(cfg: RunConfig):
    """Validate and fill defaults; returns the parameter object."""
    if cfg.model not in ("kp", "toda"):
        raise ConfigError(f"--model must be kp or toda, got {cfg.model!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"--format must be csv or json, got {cfg.format!r}")
    if not cfg.h > 0:
        raise ConfigError("--h must be positive")
    if cfg.model == "kp":
        if cfg.example is None:
            cfg.example = cfg.solution or "dressed"
        if cfg.example not in KP_SOLUTIONS:
            raise ConfigError(f"kp examples are {KP_SOLUTIONS}, got {cfg.example!r}")
        cfg.solution = cfg.example
        P = _resolve_kp(cfg)
    else:
        cfg.example = cfg.example or "ex1"
        if cfg.example not in toda.EXAMPLES:
            raise ConfigError(f"toda examples are {toda.EXAMPLES}, got {cfg.example!r}")
        cfg.solution = cfg.solution or "dressed"
        if cfg.solution not in KP_SOLUTIONS:
            raise ConfigError(f"--solution must be seed or dressed, got {cfg.solution!r}")
        P = _resolve_toda(cfg)
    cfg.params = resolved_params(P)
    return P


def default_axes(cfg: RunConfig):
    if cfg.command == "eval":
        if cfg.model == "kp":
            return [["x", -4.0, 4.0, 21], ["Y", -2.0, 2.0, 21], ["T", 0.5, 2.0, 21]]
        _, (xl, xh), (yl, yh), _ = suites.TODA_DESK[cfg.example]
        return [["X", xl, xh, 21], ["Y", yl, yh, 21], ["n", -5.0, 5.0, 11]]
    if cfg.model == "kp":
        return [["x", -4.0, 4.0, 9], ["t", 0.5, 2.0, 100]]
    lo, hi = suites.TODA_DESK[cfg.example][3]
    return [["y", lo, hi, 100], ["n", -5.0, 5.0, 11]]


def build_grid(cfg: RunConfig) -> GridSpec:
    axes = default_axes(cfg)
    order = [a[0] for a in axes]
    given = {}
    for name, lo, hi, count in cfg.grid:
        if name not in order:
            raise ConfigError(f"axis {name!r} not in {order} for {cfg.model} {cfg.command}")
        given[name] = [name, float(lo), float(hi), int(count)]
    axes = [given.get(a[0], a) for a in axes]
    cfg.grid = axes
    try:
        built = tuple(Axis(n, lo, hi, count, integer=(n == "n")) for n, lo, hi, count in axes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return GridSpec(built)


# ---------------------------------------------------------------------------
# evaluation with pole bookkeeping


def _pointwise(fn, coords):
    """Evaluate ``fn`` point by point; rows that hit a pole become NaN."""
    outs, poles = None, []
    n = coords[0].size
    for i in range(n):
        pt = tuple(c[i] for c in coords)
        try:
            vals = fn(*pt)
        except PoleError as exc:
            poles.append({"point": [_num(v) for v in pt], "code": exc.code})
            vals = None
        if outs is None and vals is not None:
            outs = [np.full(n, np.nan + 0j) for _ in vals]
        if vals is not None:
            for o, v in zip(outs, vals):
                o[i] = complex(v)
    if outs is None:
        outs = []
    return outs, poles


def evaluate(fn, coords):
    try:
        vals = fn(*coords)
        return [np.asarray(v, dtype=np.complex128) for v in vals], []
    except PoleError:
        return _pointwise(fn, coords)


def _num(v):
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def eval_columns(cfg: RunConfig, P, coords):
    if cfg.model == "kp":
        if cfg.solution == "seed":
            fn = lambda x, Y, T: kp.kp_seed(x, Y, T, P)
            names = ["u", "w"]
        else:
            fn = lambda x, Y, T: kp.kp_dressed(x, Y, T, P)
            names = ["u", "w", "tau"]
        return fn, names
    ex = cfg.example
    if cfg.solution == "seed":
        return (lambda X, Y, n: (toda.toda_seed(ex, X, Y, n, P),)), ["u"]
    return (lambda X, Y, n: (toda.toda_dressed(ex, X, Y, n, P),)), ["u"]


def contour_columns(cfg: RunConfig, P):
    """``(fn, coord names)``: fn maps the contour grid to coordinates + residual."""
    if cfg.model == "kp":
        fields = kp.seed_fields(P) if cfg.solution == "seed" else kp.dressed_fields(P)

        def fn(x, t):
            Y, T = kp.HYPERBOLIC.forward(P.y0, t)
            Y = Y + 0 * x
            T = T + 0 * x
            return Y, T, kp.kp_boundary_residual(x, Y, T, fields, P)
        return fn, ["Y", "T"]
    ex = cfg.example
    if cfg.solution == "seed":
        u = toda.seed_field(ex, P)
        grad = lambda X, Y, n: toda.toda_seed_grad(ex, X, Y, n, P)
    else:
        u = toda.dressed_field(ex, P)
        grad = toda.dressed_grad(ex, P, cfg.h)

    def fn(y, n):
        X, Y = toda.contour_points(ex, y, P)
        return X, Y, toda.toda_boundary_residual(ex, X, Y, n, u, P, grad=grad)
    return fn, ["X", "Y"]


# ---------------------------------------------------------------------------
# writers


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_table(header, rows, fmt, out):
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    else:
        recs = []
        for r in rows:
            rec = {}
            for k, v in zip(header, r):
                if isinstance(v, (int, np.integer)):
                    rec[k] = int(v)
                else:
                    v = float(v)
                    rec[k] = None if not math.isfinite(v) else v
            recs.append(rec)
        text = json.dumps(recs, indent=1) + "\n"
    _emit(text, out)


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def write_poles(poles, cfg: RunConfig, names):
    report = {"code": "solution-pole", "coordinates": names,
              "poles": poles, "config": cfg.to_dict()}
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    if cfg.out and cfg.out != "-":
        with open(cfg.out + ".poles.json", "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)


def _coord_cols(coords):
    return [c.astype(int) if np.issubdtype(c.dtype, np.integer) else c for c in coords]


# ---------------------------------------------------------------------------
# commands


def cmd_eval(cfg: RunConfig):
    P = resolve(cfg)
    g = build_grid(cfg)
    coords = g.points()
    fn, names = eval_columns(cfg, P, coords)
    vals, poles = evaluate(fn, coords)
    header = list(g.names)
    cols = _coord_cols(coords)
    for name, v in zip(names, vals):
        header += [f"{name}_re", f"{name}_im"]
        cols += [v.real, v.imag]
    rows = zip(*cols)
    write_table(header, rows, cfg.format, cfg.out)
    if poles:
        write_poles(poles, cfg, list(g.names))
        return 1
    return 0


def cmd_contour(cfg: RunConfig):
    P = resolve(cfg)
    if cfg.model == "kp" and P.y0 == 0:
        raise ConfigError("y0 = 0 has no contour")
    g = build_grid(cfg)
    coords = g.points()
    fn, names = contour_columns(cfg, P)
    vals, poles = evaluate(fn, coords)
    header = list(g.names) + names + ["residual_re", "residual_im"]
    cols = _coord_cols(coords)
    if vals:
        *mapped, res = vals
        cols += [m.real for m in mapped] + [res.real, res.imag]
    else:
        cols += [np.full(coords[0].size, np.nan)] * (len(names) + 2)
    write_table(header, zip(*cols), cfg.format, cfg.out)
    if poles:
        write_poles(poles, cfg, list(g.names))
        return 1
    return 0


def cmd_verify(cfg: RunConfig):
    if cfg.suite is None:
        raise ConfigError("--suite is required")
    if cfg.suite != "all" and cfg.suite not in suites.SUITE_NAMES:
        raise UnknownSuite(cfg.suite)
    if cfg.format != "json":
        raise ConfigError("verification reports are JSON")
    overrides = {}
    if cfg.params:
        if cfg.model not in ("kp", "toda"):
            raise ConfigError("--param with verify needs --model kp or toda")
        keys = KP_KEYS if cfg.model == "kp" else TODA_KEYS
        for k, v in cfg.params.items():
            if k not in keys:
                raise ConfigError(f"unknown {cfg.model} parameter {k!r}")
            overrides[keys[k]] = parse_value(v) if isinstance(v, str) else v
        if cfg.suite == "all":
            raise ConfigError("parameter overrides apply to single suites only")
        if not cfg.suite.startswith(cfg.model):
            raise ConfigError(f"suite {cfg.suite!r} is not a {cfg.model} suite")
        if cfg.model == "kp":
            resolved = suites.kp_params(overrides)
        else:
            ex = cfg.suite.split("-", 1)[1]
            resolved = suites.toda_params(ex if ex in toda.EXAMPLES else "ex1", overrides)
        cfg.params = resolved_params(resolved)
        overrides = {KP_KEYS.get(k, k) if cfg.model == "kp" else k: parse_value(v)
                     if isinstance(v, str) else v for k, v in cfg.params.items()}
    suite = suites.build_suite(cfg.suite, overrides or None, cfg.h)
    t0 = time.perf_counter()
    outcomes = run_suite(suite, h=cfg.h)
    elapsed = time.perf_counter() - t0
    report = {
        "config": cfg.to_dict(),
        "suite": suite.name,
        "passed": all(o.passed for o in outcomes),
        "n_checks": len(outcomes),
        "n_failed": sum(not o.passed for o in outcomes),
        "checks": [o.as_dict() for o in outcomes],
    }
    _emit(json.dumps(report, indent=1, sort_keys=True, default=_json_default) + "\n", cfg.out)
    for o in outcomes:
        sys.stderr.write(f"{'PASS' if o.passed else 'FAIL'}  {o.name}\n")
    sys.stderr.write(f"{report['n_checks'] - report['n_failed']}/{report['n_checks']} passed "
                     f"in {elapsed:.1f} s\n")
    return 0 if report["passed"] else 1


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, complex):
        return encode_value(o)
    raise TypeError(type(o))


class UnknownSuite(ConfigError):
    pass


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "contour": cmd_contour}


def build_parser():
    ap = argparse.ArgumentParser(prog="solibound", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("eval", "evaluate a solution on a grid"),
                           ("verify", "run a verification suite"),
                           ("contour", "sample a boundary contour with constraint residuals")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON config (or a verify report embedding one)")
        p.add_argument("--model", choices=("kp", "toda"))
        p.add_argument("--example", help="kp: seed|dressed; toda: ex1|ex1c1|ex2|ex3")
        p.add_argument("--solution", choices=KP_SOLUTIONS, help="toda: seed or dressed field")
        p.add_argument("--param", action="append", default=[], metavar="K=V")
        p.add_argument("--grid", action="append", default=[], metavar="AXIS:MIN:MAX:COUNT")
        p.add_argument("--h", type=float)
        p.add_argument("--suite")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--out")
    return ap


def config_from_args(args) -> RunConfig:
    base = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                base = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        base = base.get("config", base)
        if base.get("command", args.command) != args.command:
            raise ConfigError(f"config is for {base['command']!r}, not {args.command!r}")
    cfg = RunConfig(command=args.command)
    for key in ("model", "example", "solution", "params", "grid", "h", "suite", "format"):
        if key in base and base[key] is not None:
            setattr(cfg, key, base[key])
    if args.command == "verify" and "format" not in base:
        cfg.format = "json"
    for key in ("model", "example", "solution", "h", "suite", "format", "out"):
        val = getattr(args, key)
        if val is not None:
            setattr(cfg, key, val)
    params = dict(cfg.params)
    for item in args.param:
        k, v = parse_param(item)
        params[k] = v
    cfg.params = params
    if args.grid:
        cfg.grid = [parse_grid(g) for g in args.grid]
    if args.command != "verify" and cfg.model is None:
        raise ConfigError("--model is required")
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except UnknownSuite as exc:
        sys.stderr.write(f"error: unknown suite {exc}; choose from all, "
                         f"{', '.join(suites.SUITE_NAMES)}\n")
        return 2
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ParameterError as exc:
        sys.stderr.write(f"error: invalid parameters [{exc.code}]: {exc}\n")
        return 2
    except SoliboundError as exc:
        sys.stderr.write(f"error: [{exc.code}] {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
