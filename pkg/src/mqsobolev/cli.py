"""Command-line front end: reproducible field computations, verifiers, and
experiments with JSON/CSV reports.

Every run is fully determined by its resolved configuration (seed included),
which is embedded in the report, so reruns are byte-identical.  Exit codes:
0 all requested checks pass, 1 a verification failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import grid as _grid
from . import interpolation as _interp
from . import jets as _jets
from . import luzin as _luzin
from . import maximal as _maximal
from . import meanquotient as _mq
from . import mms as _mms

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    command: str
    fn: str
    dim: int
    origin: tuple
    extent: tuple
    h: float
    cap: float | None
    budget: int
    tol: float | None
    seed: int
    out: str | None
    fmt: str
    extra: dict

    def to_dict(self) -> dict:
        d = asdict(self)
        d["origin"] = list(self.origin)
        d["extent"] = list(self.extent)
        return d


def parse_fn(spec: str) -> _grid.TestFunction:
    """Parse --fn values like 'poly:0,1', 'cusp:0.5', 'weierstrass', 'sin:2'."""
    name, _, raw = spec.partition(":")
    params = [float(p) for p in raw.split(",")] if raw else []
    name = name.strip().lower()
    if name in ("poly", "polynomial"):
        return _grid.polynomial(params or [0.0, 1.0])
    if name in ("cusp", "holder_cusp"):
        return _grid.holder_cusp(*(params or [0.5]))
    if name in ("weier", "weierstrass"):
        if params:
            return _grid.weierstrass(params[0], int(params[1]), int(params[2]))
        return _grid.weierstrass()
    if name in ("sin", "sin_composite"):
        return _grid.sin_composite(*(params or [1.0]))
    if name == "indicator":
        return _grid.indicator(*(params or [0.25, 0.75]))
    raise ValueError(f"unknown test function {spec!r}")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mqsobolev", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fn_default="poly:0,1"):
        sp.add_argument("--fn", default=fn_default)
        sp.add_argument("--dim", type=int, default=1)
        sp.add_argument("--h", type=float, default=0.01)
        sp.add_argument("--origin", default=None, help="comma-separated")
        sp.add_argument("--extent", default=None, help="comma-separated")
        sp.add_argument("--cap", type=float, default=None)
        sp.add_argument("--budget", type=int, default=10_000_000)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=None)
        sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    sp = sub.add_parser("constants", help="closed-form geometric constants")
    sp.add_argument("what", choices=("lens",))
    sp.add_argument("--dim", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    sp = sub.add_parser("field", help="compute a field over a grid")
    sp.add_argument("kind", choices=("mq", "maximal", "mq-m"))
    common(sp)
    sp.add_argument("--operator", choices=("centered", "uncentered", "left", "right"),
                    default="centered")
    sp.add_argument("--m", type=int, default=2)

    sp = sub.add_parser("verify", help="run an inequality verifier")
    sp.add_argument(
        "what",
        choices=("pointwise", "grad-dom", "poincare", "holder", "divided", "lemma2", "chain"),
    )
    common(sp)
    sp.add_argument("--constant", type=float, default=None)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--m", type=int, default=2)

    sp = sub.add_parser("luzin", help="Lipschitz truncation pipeline")
    common(sp, fn_default="cusp:0.5")
    sp.add_argument("--level", "--L", dest="level", type=float, default=2.0)

    sp = sub.add_parser("mms", help="finite metric measure space diagnostics")
    sp.add_argument("what", choices=("mq", "doubling", "overlap", "verify"))
    sp.add_argument("--space", required=True, help="JSON file {kind, params, weights}")
    sp.add_argument("--values", default=None, help="comma-separated f values")
    sp.add_argument("--constant", type=float, default=None)
    sp.add_argument("--cap", type=float, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")

    sp = sub.add_parser("experiment", help="exploratory estimates")
    sp.add_argument("what", choices=("conjecture31",))
    common(sp, fn_default="sin:1")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--samples", type=int, default=200)
    return p


def _resolve_grid(args) -> _grid.Grid:
    dim = args.dim
    origin = (
        tuple(float(v) for v in args.origin.split(","))
        if args.origin
        else (0.0,) * dim
    )
    extent = (
        tuple(float(v) for v in args.extent.split(","))
        if args.extent
        else (1.0,) * dim
    )
    return _grid.make_grid(dim, origin, extent, args.h)


def _config_from(args, extra: dict) -> RunConfig:
    return RunConfig(
        command=args.command,
        fn=getattr(args, "fn", ""),
        dim=getattr(args, "dim", 1),
        origin=tuple(float(v) for v in args.origin.split(",")) if getattr(args, "origin", None) else (0.0,) * getattr(args, "dim", 1),
        extent=tuple(float(v) for v in args.extent.split(",")) if getattr(args, "extent", None) else (1.0,) * getattr(args, "dim", 1),
        h=getattr(args, "h", 0.0),
        cap=getattr(args, "cap", None),
        budget=getattr(args, "budget", 0),
        tol=getattr(args, "tol", None),
        seed=getattr(args, "seed", 0),
        out=getattr(args, "out", None),
        fmt=getattr(args, "fmt", "json"),
        extra=extra,
    )


def _jsonable(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def emit_report(results: list, config: RunConfig, fmt: str, path: str | None) -> None:
    """Write the report (stdout when no path); floats keep full precision."""
    if not results:
        raise ValueError("refusing to emit an empty report")
    if fmt == "json":
        payload = {
            "schema": SCHEMA_VERSION,
            "config": config.to_dict(),
            "results": results,
        }
        text = json.dumps(payload, indent=2, sort_keys=False, default=_jsonable) + "\n"
    else:
        if len(results) == 1 and isinstance(results[0], str):
            text = results[0]
        else:
            rows = ["key,value"]
            for r in results:
                flat = r if isinstance(r, dict) else {"value": r}
                for k, v in flat.items():
                    rows.append(f"{k},{v!r}" if isinstance(v, str) else f"{k},{v}")
            text = "\n".join(rows) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_constants(args) -> int:
    cfg = _config_from(args, {"what": args.what})
    c = _mq.lens_constant(args.dim)
    emit_report([{"lens_constant": c, "dim": args.dim, "value": f"{c:.12f}"}], cfg, args.fmt, args.out)
    return 0


def _cmd_field(args) -> int:
    tf = parse_fn(args.fn)
    g = _resolve_grid(args)
    f = _grid.sample(tf, g)
    if args.kind == "mq":
        field = _mq.mq_field(f, args.cap).base
    elif args.kind == "maximal":
        if args.operator == "centered":
            field = _maximal.centered_maximal(f, args.cap)
        elif args.operator == "uncentered":
            field = _maximal.uncentered_maximal(f)
        else:
            field = _maximal.one_sided_maximal(f, args.operator)
    else:
        jet = _jets.jet_from_function(tf, g, args.m - 1)
        field = _jets.mq_m_field(jet, f, args.m, args.cap).base
    cfg = _config_from(args, {"kind": args.kind, "label": field.label})
    if args.fmt == "csv":
        emit_report([_maximal.scalarfield_to_csv(field)], cfg, "csv", args.out)
    else:
        emit_report(
            [{"label": field.label, "values": [float(v) for v in field.values]}],
            cfg,
            "json",
            args.out,
        )
    return 0


def _cmd_verify(args) -> int:
    tf = parse_fn(args.fn)
    g = _resolve_grid(args)
    f = _grid.sample(tf, g)
    kappa = 4.0
    reports = []
    ok = True
    if args.what == "pointwise":
        c = args.constant if args.constant is not None else _mq.lens_constant(g.dim)
        rep = _mq.verify_pointwise(
            f, _mq.mq_field(f, args.cap).base, c, args.budget, kappa,
            interior_only=True, seed=args.seed,
        )
        reports.append(rep.to_dict())
        ok = rep.passed
    elif args.what == "chain":
        rep = _mq.lens_chain_check(f, args.budget, seed=args.seed)
        reports.append(rep.to_dict())
        ok = rep.passed
    elif args.what == "grad-dom":
        rep = _mq.verify_grad_domination(f, tol=args.tol)
        reports.append(rep.to_dict())
        ok = rep.passed
    elif args.what == "poincare":
        ratio = _mq.poincare_integral(f, args.p)
        reports.append({"name": "poincare_integral", "p": args.p, "ratio": ratio})
        ok = np.isfinite(ratio)
    elif args.what == "holder":
        rep = _mq.holder_check(f, args.p, kappa)
        reports.append(rep.to_dict())
        ok = rep.passed
    elif args.what == "divided":
        jet = _jets.jet_from_function(tf, g, args.m - 1)
        gfield = _jets.mq_m_field(jet, f, args.m).base
        rep1, rep2 = _interp.verify_divided_inequality(
            f, args.m, gfield, args.budget, kappa, args.seed
        )
        reports.extend([rep1.to_dict(), rep2.to_dict()])
        ok = rep1.passed and rep2.passed
    elif args.what == "lemma2":
        rep = _jets.second_order_check(
            tf, g, triple_budget=min(args.budget, 100_000), seed=args.seed
        )
        reports.append(
            {
                "name": "second_order_triples",
                "triples_checked": rep.triples_checked,
                "violations": rep.violations,
                "worst_margin": rep.worst_margin,
                "pass": rep.passed,
            }
        )
        ok = rep.passed
    cfg = _config_from(args, {"what": args.what})
    emit_report(reports, cfg, args.fmt, args.out)
    return 0 if ok else 1


def _cmd_luzin(args) -> int:
    tf = parse_fn(args.fn)
    g = _resolve_grid(args)
    f = _grid.sample(tf, g)
    res = _luzin.luzin_pipeline(f, args.level)
    ok = res.lipschitz_witness <= res.lam * (1.0 + 1e-9)
    cfg = _config_from(args, {"level": args.level})
    emit_report([res.to_dict()], cfg, args.fmt, args.out)
    return 0 if ok else 1


def _cmd_mms(args) -> int:
    if args.space.endswith(".csv"):
        # a raw distance matrix, one row per point
        d = np.loadtxt(args.space, delimiter=",", ndmin=2)
        X = _mms.build_space("distance_matrix", d)
    else:
        with open(args.space) as fh:
            desc = json.load(fh)
        X = _mms.build_space(desc["kind"], desc["params"], desc.get("weights"))
    fv = (
        np.array([float(v) for v in args.values.split(",")])
        if args.values
        else np.arange(X.n_points, dtype=float)
    )
    cfg = _config_from(args, {"what": args.what, "space": args.space})
    ok = True
    if args.what == "mq":
        out = _mms.mq_field_mms(fv, X, args.cap)
        results = [{"name": "mms_mq", "values": [float(v) for v in out]}]
    elif args.what == "doubling":
        results = [{"name": "mms_doubling", "constant": _mms.doubling_constant(X)}]
    elif args.what == "overlap":
        rep = _mms.overlap_constant(X)
        results = [
            {
                "name": "mms_overlap",
                "constant": rep.constant,
                "pairs_with_lens": rep.pairs_with_lens,
                "pairs_empty_lens": rep.pairs_empty_lens,
            }
        ]
    else:
        mqv = _mms.mq_field_mms(fv, X, args.cap)
        out = _mms.verify_pointwise_mms(fv, X, mqv, args.constant)
        results = [
            out.report.to_dict()
            | {
                "empty_lens_pairs": out.empty_lens_pairs,
                "worst_ratio_empty_lens": out.worst_ratio_empty_lens,
            }
        ]
        ok = out.report.passed
    emit_report(results, cfg, args.fmt, args.out)
    return 0 if ok else 1


def _cmd_experiment(args) -> int:
    tf = parse_fn(args.fn)
    rep = _interp.scheme_witness_experiment(
        tf, args.m, args.samples, seed=args.seed
    )
    cfg = _config_from(args, {"what": args.what, "samples": args.samples})
    emit_report([rep.to_dict()], cfg, args.fmt, args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        if args.command == "constants":
            return _cmd_constants(args)
        if args.command == "field":
            return _cmd_field(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "luzin":
            return _cmd_luzin(args)
        if args.command == "mms":
            return _cmd_mms(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return 2
    except (ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
