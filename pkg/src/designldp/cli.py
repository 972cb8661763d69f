"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 bad input. Exact values are
printed as ``"p/q"`` strings; float renderings carry a ``_float`` suffix.
Points are 0-based in JSON and 1-based in text output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import designs
from .designs import SetSystem, catalog_lookup, classify, design_from_json
from .errors import DesignLDPError, InvalidDistribution
from .estimators import (
    CountVector,
    closed_form_estimator,
    cn_optimal_estimator,
    estimate_from_counts,
    moore_penrose,
    project_simplex,
)
from .linalg import frac_str
from .protocol import build_tpm, params_from_gamma, params_from_theta, pure_check, verify_ldp
from .risk import Distribution, communication_cost, induced_distribution, risk_report
from .simulate import make_randomiser, monte_carlo


class UsageError(DesignLDPError):
    pass


def load_design(source: str) -> SetSystem:
    path = Path(source)
    if source in designs.catalog_names() or not path.exists():
        return catalog_lookup(source)
    try:
        return design_from_json(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}: not valid JSON ({exc})") from None


def load_distribution(spec: str, n: int) -> Distribution:
    if spec == "uniform":
        return Distribution.uniform(n)
    path = Path(spec)
    if path.exists():
        data = json.loads(path.read_text(encoding="utf-8"))
        if isinstance(data, dict):
            data = data.get("probs", data.get("pi"))
        dist = Distribution(tuple(Fraction(str(x)) for x in data))
    else:
        try:
            dist = Distribution.parse(spec)
        except (ValueError, ZeroDivisionError):
            raise InvalidDistribution(f"cannot parse distribution {spec!r}") from None
    if len(dist) != n:
        raise InvalidDistribution(f"distribution has {len(dist)} entries, design has {n} points")
    return dist


def load_counts(source: str) -> CountVector:
    data = json.loads(Path(source).read_text(encoding="utf-8"))
    return CountVector(tuple(data["f"]), int(data["t"]))


def _params(args, s: SetSystem):
    profile = classify(s)
    if (args.theta is None) == (args.gamma is None):
        raise UsageError("give exactly one of --theta or --gamma")
    try:
        if args.theta is not None:
            return params_from_theta(profile, Fraction(args.theta))
        return params_from_gamma(profile, Fraction(args.gamma))
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, DesignLDPError):
            raise
        raise UsageError(f"cannot parse rational: {exc}") from None


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- commands -------------------------------------------------------------


def cmd_catalog(args) -> None:
    if args.action == "list":
        lines = [f"{name}\t{designs.catalog_description(name)}" for name in designs.catalog_names()]
        _emit(args, "\n".join(lines) + "\n")
        return
    if not args.name:
        raise UsageError("catalog show needs a design name")
    _emit(args, _dumps(catalog_lookup(args.name).to_dict()))


def cmd_verify(args) -> None:
    s = load_design(args.design)
    profile = classify(s)
    purity = pure_check(s)
    if args.format == "text":
        lines = [f"points: {s.v}, blocks: {s.b}", f"kind: {profile.kind.value}"]
        for key, val in (("r", profile.replication), ("lambda", profile.index), ("k", profile.block_size)):
            lines.append(f"{key}: {'-' if val is None else val}")
        w = purity.witness
        if w is not None and w["type"] == "replication":
            lines.append(f"witness: point {w['point'] + 1} lies in {w['count']} blocks (typical {w['expected']})")
        elif w is not None:
            a, b = (x + 1 for x in w["pair"])
            lines.append(f"witness: pair {{{a},{b}}} lies in {w['count']} blocks (typical {w['expected']})")
        _emit(args, "\n".join(lines) + "\n")
        return
    out = {"design": s.name, **profile.to_dict(), "pure": purity.pure, "witness": purity.witness}
    _emit(args, _dumps(out))


def cmd_protocol(args) -> None:
    s = load_design(args.design)
    params = _params(args, s)
    Q = build_tpm(s, params)
    ratio = verify_ldp(Q)
    out = {
        "design": s.name,
        "params": params.to_dict(),
        "realised_ratio": frac_str(ratio),
        "communication_cost_float": communication_cost(s.b),
        "tpm": Q.to_strings(),
    }
    _emit(args, _dumps(out))


def _estimator(kind: str, s: SetSystem, params, dist: Distribution | None):
    if kind == "closed":
        return closed_form_estimator(s, params)
    Q = build_tpm(s, params)
    if kind == "mp":
        return moore_penrose(Q, classify(s), params)
    return cn_optimal_estimator(Q, induced_distribution(Q, dist or Distribution.uniform(s.v)))


def cmd_estimate(args) -> None:
    s = load_design(args.design)
    params = _params(args, s)
    counts = load_counts(args.counts)
    if len(counts.f) != s.b:
        estimate_from_counts(s, params, counts)  # raises DimensionMismatch
    if args.estimator == "closed":
        est = estimate_from_counts(s, params, counts)
        provenance = "CLOSED_FORM"
    else:
        dist = load_distribution(args.dist, s.v) if args.dist else None
        L = _estimator(args.estimator, s, params, dist)
        est = L.apply(counts.rho_hat)
        provenance = L.provenance.value
    out = {
        "design": s.name,
        "provenance": provenance,
        "estimate": [frac_str(x) for x in est],
        "estimate_float": [float(x) for x in est],
        "sum": frac_str(sum(est, Fraction(0))),
    }
    if args.project_simplex:
        proj = project_simplex(est)
        out["projected"] = [frac_str(x) for x in proj]
        out["projected_float"] = [float(x) for x in proj]
    _emit(args, _dumps(out))


def _frange(spec: str):
    try:
        a, b, step = (Fraction(x) for x in spec.split(","))
    except ValueError:
        raise UsageError("--sweep-theta expects A,B,STEP") from None
    if step <= 0:
        raise UsageError("sweep step must be positive")
    x = a
    while x <= b:
        yield x
        x += step


def cmd_risk(args) -> None:
    s = load_design(args.design)
    dist = load_distribution(args.dist, s.v)
    if args.sweep_theta:
        profile = classify(s)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["theta_float", "gamma_float", "variance_total_float", "bound_cn_float", "trace_bound_float"])
        for theta in _frange(args.sweep_theta):
            try:
                params = params_from_theta(profile, theta)
            except DesignLDPError as exc:
                print(f"skipping theta={frac_str(theta)}: {exc}", file=sys.stderr)
                continue
            rep = risk_report(s, params, dist, args.t, args.estimator)
            bt = "" if rep.bound_trace is None else float(rep.bound_trace)
            writer.writerow([float(theta), float(params.gamma), float(rep.total), float(rep.bound_cn), bt])
        _emit(args, buf.getvalue())
        return
    params = _params(args, s)
    rep = risk_report(s, params, dist, args.t, args.estimator)
    out = {"design": s.name, "params": params.to_dict(), **rep.to_dict()}
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["route", "value", "value_float"])
        for name, val in rep.routes.items():
            writer.writerow([name, frac_str(val), float(val)])
        writer.writerow(["bound_cn", frac_str(rep.bound_cn), float(rep.bound_cn)])
        _emit(args, buf.getvalue())
        return
    _emit(args, _dumps(out))


def cmd_simulate(args) -> None:
    s = load_design(args.design)
    params = _params(args, s)
    dist = load_distribution(args.dist, s.v)
    if args.reps < 2:
        raise UsageError("--reps must be at least 2")
    if args.t < 1:
        raise UsageError("--t must be at least 1")
    spec = make_randomiser(s, params)
    rep = monte_carlo(spec, dist, args.t, args.reps, args.seed, workers=args.workers,
                      keep_estimates=args.format == "csv")
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rep"] + [f"p{j + 1}_float" for j in range(s.v)])
        for i, row in enumerate(rep.estimates):
            writer.writerow([i] + [repr(float(x)) for x in row])
        _emit(args, buf.getvalue())
        return
    out = {"design": s.name, "params": params.to_dict(), "pi": dist.to_list(), **rep.to_dict()}
    _emit(args, _dumps(out))


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="designldp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def protocol_flags(p):
        p.add_argument("design", help="catalog name or path to a design JSON file")
        p.add_argument("--theta", help="probability of reporting inside Y_x, e.g. 3/4")
        p.add_argument("--gamma", help="privacy ratio e^eps, e.g. 6")
        p.add_argument("--out", help="write output to PATH instead of stdout")

    p = sub.add_parser("catalog", help="list or show built-in designs")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.add_argument("--out")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("verify", help="classify a design and test purity")
    p.add_argument("design")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("protocol", help="protocol parameters and TPM")
    protocol_flags(p)
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("estimate", help="estimate pi from report counts")
    protocol_flags(p)
    p.add_argument("--counts", required=True, help='JSON file {"t": int, "f": [int, ...]}')
    p.add_argument("--estimator", choices=["closed", "mp", "cn"], default="closed")
    p.add_argument("--dist", help="prior used to weight the cn estimator (default uniform)")
    p.add_argument("--project-simplex", action="store_true", help="also report the simplex projection")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("risk", help="exact variance, risk and bounds")
    protocol_flags(p)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--estimator", choices=["closed", "mp", "cn"], default="mp")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--sweep-theta", metavar="A,B,STEP", help="CSV of variance vs theta")
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("simulate", help="Monte Carlo check of the estimator")
    protocol_flags(p)
    p.add_argument("--dist", default="uniform")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (DesignLDPError, json.JSONDecodeError, OSError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
