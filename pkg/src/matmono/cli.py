"""Command-line entry point.

Exit codes: 0 clean, 1 violations found, 2 domain error, 64 usage error,
65 configuration error.  ``--expect-violations`` swaps 0 and 1.
"""

import argparse
import json
import sys

import numpy as np

from . import catalog, elast, jogcalc, monocheck, primfn
from .exceptions import ConfigurationError, DomainError, MatMonoError, NumericalError, PreconditionError, ShapeError

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_DOMAIN = 2
EXIT_USAGE = 64
EXIT_CONFIG = 65

NOTION_FLAGS = {"h": monocheck.HMON, "o": monocheck.OMON, "p": monocheck.PMON, "s": monocheck.SMON}

DEFAULTS = {
    "n": 2,
    "samples": 1000,
    "seed": monocheck.DEFAULT_SEED,
    "scale": 1.0,
    "notion": "all",
    "domain": "sym",
    "format": "json",
    "t_steps": 101,
    "steps": 101,
}
COMMAND_DEFAULTS = {"tsts": {"n": 3}, "path": {"format": "csv"}, "trace": {"format": "csv"}}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _matrix(text, name="matrix"):
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse {name}: {exc}") from None
    a = np.asarray(value, dtype=float) if isinstance(value, list) else None
    if a is None or a.ndim != 2 or not np.all(np.isfinite(a)):
        raise UsageError(f"{name} must be a JSON array of arrays of finite numbers")
    return a


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def build_parser():
    p = _Parser(prog="matmono", description="Monotonicity checks for matrix functions and stress responses.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", help="JSON file of option defaults; explicit flags win")
        sp.add_argument("--output", help="write the result here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"))

    def sampling(sp):
        sp.add_argument("--n", type=int)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--seed", type=lambda s: int(s, 0))
        sp.add_argument("--scale", type=float)
        sp.add_argument("--expect-violations", action="store_true", default=None)

    sp = sub.add_parser("eval", help="evaluate f(A) and optionally Df[A].H")
    sp.add_argument("fn")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--derivative", action="store_true", default=None)
    sp.add_argument("--direction")
    common(sp)

    sp = sub.add_parser("mono", help="sample a monotonicity notion")
    sp.add_argument("map")
    sp.add_argument("--notion", choices=(*NOTION_FLAGS, "all"))
    sampling(sp)
    common(sp)

    sp = sub.add_parser("tsts", help="TSTS-M+ scan of a stress model")
    sp.add_argument("--model", help="model JSON, inline or a path")
    sp.add_argument("--domain", choices=("sym", "elastic"))
    sp.add_argument("--sigma-y", type=float)
    sp.add_argument("--grid-search", action="store_true", default=None)
    sampling(sp)
    common(sp)

    sp = sub.add_parser("golden", help="recompute the golden-value table")
    common(sp)

    sp = sub.add_parser("path", help="invertible-but-not-positive path experiment (CSV)")
    sp.add_argument("--t-steps", type=int)
    common(sp)

    sp = sub.add_parser("trace", help="lambda_min of an operator field along a segment (CSV)")
    sp.add_argument("field", choices=sorted(monocheck.FIELDS))
    sp.add_argument("--a0", required=True)
    sp.add_argument("--a1", required=True)
    sp.add_argument("--steps", type=int)
    common(sp)
    return p


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args):
    """Merge explicit flags over ``--config`` over built-in defaults."""
    config = _load_config(args.config) if args.config else {}
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    merged = dict(vars(args))
    for key, value in merged.items():
        if value is None:
            merged[key] = config.get(key, defaults.get(key))
    return argparse.Namespace(**merged)


def _verdict(violations, expect):
    found = violations > 0
    if expect:
        return EXIT_OK if found else EXIT_VIOLATIONS
    return EXIT_VIOLATIONS if found else EXIT_OK


def _lookup(getter, name, kind):
    try:
        return getter(name)
    except ConfigurationError as exc:
        raise UsageError(f"unknown {kind}: {exc}") from None


def cmd_eval(args):
    fn = _lookup(primfn.get_function, args.fn, "function")
    a = _matrix(args.matrix)
    out = {"fn": fn.name, "a": a.tolist(), "f": primfn.apply_primary(fn, a).tolist()}
    if args.derivative:
        if args.direction is None:
            out["derivative"] = primfn.frechet(fn, a).to_dict()
        else:
            h = _matrix(args.direction, "direction")
            out["direction"] = h.tolist()
            out["derivative"] = primfn.frechet_apply(fn, a, h).tolist()
    elif args.direction is not None:
        raise UsageError("--direction requires --derivative")
    return dumps(out), EXIT_OK


def cmd_mono(args):
    fmap = _lookup(monocheck.get_map, args.map, "map")
    spec = monocheck.SampleSpec(seed=args.seed, count=args.samples, scale=args.scale, n=args.n)
    notions = list(NOTION_FLAGS.values()) if args.notion == "all" else [NOTION_FLAGS[args.notion]]
    reports = []
    for notion in notions:
        if notion == monocheck.SMON:
            if fmap.fn is None:
                if args.notion == "s":
                    raise ConfigurationError(f"S-mon needs a primary map; {fmap.name} is not one")
                continue
            reports.append(monocheck.check_smon(fmap))
        else:
            checker = {monocheck.HMON: monocheck.check_hmon, monocheck.OMON: monocheck.check_omon,
                       monocheck.PMON: monocheck.check_pmon}[notion]
            reports.append(checker(fmap, spec))
    body = reports[0].to_dict() if len(reports) == 1 else {"map": fmap.name, "reports": [r.to_dict() for r in reports]}
    return dumps(body), _verdict(sum(r.violations for r in reports), args.expect_violations)


def _model_config(text):
    if text is None:
        raise ConfigurationError("tsts needs --model (inline JSON or a path)")
    if isinstance(text, dict):
        return text
    stripped = text.strip()
    if not stripped.startswith("{"):
        try:
            with open(stripped, encoding="utf-8") as fh:
                stripped = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read model file {text}: {exc}") from None
    try:
        data = json.loads(stripped)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"model is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError("model must be a JSON object")
    return data


def cmd_tsts(args):
    model = elast.StressModel.from_config(_model_config(args.model))
    spec = monocheck.SampleSpec(seed=args.seed, count=args.samples, scale=args.scale, n=args.n)
    report = elast.tsts_scan(model, spec, domain=args.domain, sigma_y=args.sigma_y)
    body = report.to_dict()
    if args.grid_search:
        found = elast.hencky_violation_search(model, n=args.n)
        body["grid_search"] = None if found is None else {
            "shear": found.shear,
            "dilation": found.dilation,
            "lambda_min": found.lambda_min,
            "crossing": list(found.crossing),
            "witness": found.witness.to_dict(),
        }
    violations = report.violations + (1 if body.get("grid_search") else 0)
    return dumps(body), _verdict(violations, args.expect_violations)


def cmd_golden(args):
    rows = catalog.golden_table()
    ok = all(r.ok for r in rows)
    if args.format == "csv":
        lines = ["name,expected,computed,abs_err,ok"]
        lines += [f"{r.name},{r.expected!r},{r.computed!r},{r.error!r},{str(r.ok).lower()}" for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = dumps({"ok": ok, "rows": [r.to_dict() for r in rows]})
    return text, EXIT_OK if ok else EXIT_VIOLATIONS


def cmd_path(args):
    exp = jogcalc.run_path_experiment(args.t_steps)
    if args.format == "json":
        body = {
            "t_star": jogcalc.locate_sym_pd_crossing(),
            "records": [r.__dict__ for r in exp.records],
        }
        return dumps(body), EXIT_OK
    return exp.to_csv(), EXIT_OK


def cmd_trace(args):
    trace = monocheck.lambda_min_along_curve(
        monocheck.FIELDS[args.field], _matrix(args.a0, "a0"), _matrix(args.a1, "a1"), args.steps
    )
    if args.format == "json":
        body = {
            "field": args.field,
            "t": trace.t.tolist(),
            "lambda_min": trace.lambda_min.tolist(),
            "min_abs_eig": trace.min_abs_eig,
            "sign_change": trace.sign_change,
        }
        return dumps(body), EXIT_OK
    return trace.to_csv(), EXIT_OK


COMMANDS = {"eval": cmd_eval, "mono": cmd_mono, "tsts": cmd_tsts, "golden": cmd_golden,
            "path": cmd_path, "trace": cmd_trace}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        raw = build_parser().parse_args(argv)
        args = resolve(raw)
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ShapeError, PreconditionError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, MatMonoError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
