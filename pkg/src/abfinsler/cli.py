"""Command-line interface: compute, classify, crosscheck, theorem, zoo."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .alphabeta import angular_expansion, frame, g_expansion, landsberg_cf, mean_cartan_cf, mean_landsberg_cf, spray_cf
from .classify import (
    CONSISTENT,
    SCHEMA_VERSION,
    VIOLATION,
    Tolerances,
    classify_metric,
    crosscheck,
    draw_samples,
    theorem_check,
)
from .exprs import ExprDomainError, ExprSyntaxError
from .finsler import point_state
from .metric import DomainError, MetricSpec, make_spec
from .phi import PhiDomainError, make_phi
from .volume import QuadratureError
from .zoo import PROPERTIES, ValidationError, ZooError, validate_entry, zoo_get, zoo_list

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_VIOLATION, EXIT_INCONCLUSIVE = 0, 2, 3, 4, 5
METRIC_FILE_VERSION = "1"
TENSORS = ("F", "g", "g_inv", "h", "C", "I", "M", "G", "N", "B", "L", "J", "PRED", "S", "sigma")


class InputError(ValueError):
    pass


# metric files -------------------------------------------------------------------

def metric_from_dict(doc: dict, source: str = "<dict>") -> MetricSpec:
    """Parse a metric document (see README for the schema)."""
    try:
        n = int(doc["n"])
        a, b, phi = doc["a"], doc["b"], doc["phi"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{source}: missing or invalid field {exc}") from None
    if n < 2 or n > 4:
        raise InputError(f"{source}: n must be 2, 3 or 4")
    if len(a) != n or any(len(row) != i + 1 for i, row in enumerate(a)):
        raise InputError(f"{source}: 'a' must be the lower triangle (row i has i+1 entries)")
    if len(b) != n:
        raise InputError(f"{source}: 'b' must have {n} entries")
    box = doc.get("box")
    if box is not None and (len(box) != n or any(len(iv) != 2 or iv[0] >= iv[1] for iv in box)):
        raise InputError(f"{source}: 'box' must be {n} intervals [lo, hi] with lo < hi")
    try:
        family = make_phi(phi["family"], **phi.get("params", {}))
    except (KeyError, TypeError) as exc:
        raise InputError(f"{source}: bad phi block: {exc}") from None
    spec = make_spec(n, a, b, family, box, doc.get("id", Path(source).stem), doc.get("params"))
    declared = tuple(doc.get("declared_properties", ()))
    unknown = set(declared) - set(PROPERTIES)
    if unknown:
        raise InputError(f"{source}: unknown declared properties {sorted(unknown)}")
    spec.declared = declared
    return spec


def load_metric(ref: str, params: dict | None = None) -> MetricSpec:
    """``zoo:<id>`` or a path to a metric JSON file."""
    if ref.startswith("zoo:"):
        return zoo_get(ref[4:], **(params or {}))
    if params:
        raise InputError("--param only applies to zoo metrics")
    path = Path(ref)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {ref}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{ref}: invalid JSON at line {exc.lineno} col {exc.colno}") from None
    spec = metric_from_dict(doc, ref)
    if spec.declared:
        validate_entry(spec)
    return spec


# helpers -------------------------------------------------------------------------

def _parse_value(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _kv(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"expected key=value, got {item!r}")
        out[key.strip()] = _parse_value(val.strip())
    return out


def _vec(text: str, n: int, name: str) -> np.ndarray:
    try:
        v = np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise InputError(f"--{name}: expected comma-separated numbers") from None
    if v.size != n:
        raise InputError(f"--{name}: expected {n} components, got {v.size}")
    return v


def _clean(obj):
    """JSON-safe copy: arrays to lists, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _fmt(v) -> str:
    if isinstance(v, dict):
        return "{}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in obj.items():
        if isinstance(v, dict) and v:
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {_fmt(v)}")
    return "\n".join(lines)


def _emit(obj, fmt: str, out: str | None = None):
    body = dumps(obj) if fmt == "json" else _text(_clean(obj)) + "\n"
    if out:
        Path(out).write_text(body)
    else:
        sys.stdout.write(body)


def _discrepancy(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / (1 + np.max(np.abs(b))))


# commands ------------------------------------------------------------------------

def cmd_compute(args) -> int:
    spec = load_metric(args.metric, _kv(args.param))
    x = _vec(args.x, spec.n, "x")
    y = _vec(args.y, spec.n, "y")
    wanted = [t.strip() for t in args.tensors.split(",") if t.strip()]
    bad = [t for t in wanted if t not in TENSORS]
    if bad:
        raise InputError(f"unknown tensors {bad}; choose from {', '.join(TENSORS)}")
    ps = point_state(spec, x, y)
    fr = frame(spec, x, y)
    closed = {
        "G": lambda: spray_cf(spec, x, y, fr),
        "J": lambda: mean_landsberg_cf(spec, x, y, fr),
        "L": lambda: landsberg_cf(spec, x, y, fr),
        "I": lambda: mean_cartan_cf(spec, x, y, fr),
        "g": lambda: g_expansion(fr),
        "h": lambda: angular_expansion(fr),
    }
    out = {"metric": spec.describe(), "x": x, "y": y, "tensors": {}}
    for t in wanted:
        if t == "S":
            rec = {"definition": ps.S, "quadrature_discrepancy": ps.volume.discrepancy}
        elif t == "sigma":
            rec = {"definition": ps.volume.sigma, "quadrature_discrepancy": ps.volume.discrepancy}
        else:
            val = np.asarray(getattr(ps, t))
            rec = {"definition": val}
            if t in closed:
                try:
                    cf = np.asarray(closed[t]())
                except DomainError as exc:
                    rec["closed_form_unavailable"] = exc.guard
                else:
                    rec["closed_form"] = cf
                    rec["discrepancy"] = _discrepancy(cf, val)
        out["tensors"][t] = rec
    _emit(out, args.format)
    return EXIT_OK


def _tolerances(items) -> Tolerances:
    over = _kv(items)
    unknown = set(over) - set(Tolerances.__dataclass_fields__)
    if unknown:
        raise InputError(f"unknown tolerance keys {sorted(unknown)}")
    try:
        return Tolerances(**{k: float(v) for k, v in over.items()})
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _outcome_code(outcome: str) -> int:
    return {CONSISTENT: EXIT_OK, VIOLATION: EXIT_VIOLATION}.get(outcome, EXIT_INCONCLUSIVE)


def cmd_classify(args) -> int:
    spec = load_metric(args.metric, _kv(args.param))
    rep = classify_metric(spec, args.samples, args.seed, _tolerances(args.tol))
    _emit(rep, args.format, args.out)
    return _outcome_code(rep["theorem"]["outcome"])


def cmd_crosscheck(args) -> int:
    spec = load_metric(args.metric, _kv(args.param))
    ss = draw_samples(spec, args.samples, args.seed)
    table = crosscheck(spec, ss)
    _emit({"schema_version": SCHEMA_VERSION, "metric": spec.describe(), "samples": len(ss.samples),
           "seed": args.seed, "crosscheck": table}, args.format)
    return EXIT_OK if all(r["ok"] for r in table.values()) else EXIT_VIOLATION


def cmd_theorem(args) -> int:
    spec = load_metric(args.metric, _kv(args.param))
    tol = _tolerances(args.tol)
    ss = draw_samples(spec, args.samples, args.seed)
    res = theorem_check(spec, ss, tol)
    _emit({"schema_version": SCHEMA_VERSION, "metric": spec.describe(), "samples": len(ss.samples),
           "seed": args.seed, "theorem": res}, args.format)
    return _outcome_code(res["outcome"])


def cmd_zoo(args) -> int:
    if args.action == "list":
        rows = {e.id: {"description": e.description, "defaults": e.defaults, "declared": list(e.declared)}
                for e in zoo_list()}
        _emit({"entries": rows}, args.format)
        return EXIT_OK
    if not args.id:
        raise InputError("zoo validate needs an entry id")
    spec = zoo_get(args.id, validate=False, **_kv(args.param))
    table = validate_entry(spec, strict=False)
    _emit({"id": args.id, "params": spec.params, "validation": table}, args.format)
    return EXIT_OK if all(r["ok"] for r in table.values()) else EXIT_VIOLATION


# parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="abfinsler", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, samples=None):
        sp.add_argument("--metric", required=True, help="zoo:<id> or path to a metric JSON file")
        sp.add_argument("--param", action="append", metavar="KEY=VALUE", help="zoo parameter override")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        if samples is not None:
            sp.add_argument("--samples", type=int, default=samples)
            sp.add_argument("--seed", type=int, default=0)

    c = sub.add_parser("compute", help="tensors at one point, both computation paths")
    common(c)
    c.add_argument("--x", required=True)
    c.add_argument("--y", required=True)
    c.add_argument("--tensors", default="F,g,G")
    c.set_defaults(func=cmd_compute)

    c = sub.add_parser("classify", help="full classification report")
    common(c, 200)
    c.add_argument("--tol", action="append", metavar="KEY=VALUE")
    c.add_argument("--out")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("crosscheck", help="closed forms against the definition path")
    common(c, 200)
    c.set_defaults(func=cmd_crosscheck)

    c = sub.add_parser("theorem", help="theorem consistency verdict")
    common(c, 200)
    c.add_argument("--tol", action="append", metavar="KEY=VALUE")
    c.set_defaults(func=cmd_theorem)

    c = sub.add_parser("zoo", help="catalog listing and validation")
    c.add_argument("action", choices=("list", "validate"))
    c.add_argument("id", nargs="?")
    c.add_argument("--param", action="append", metavar="KEY=VALUE")
    c.add_argument("--format", choices=("json", "text"), default="json")
    c.set_defaults(func=cmd_zoo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ExprSyntaxError, ZooError, ValidationError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, PhiDomainError, ExprDomainError) as exc:
        guard = getattr(exc, "guard", None)
        print(f"domain error{f' [{guard}]' if guard else ''}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except QuadratureError as exc:
        print(f"domain error [quadrature]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
