"""Command-line entry point ``peeltri``.

Primary output goes to stdout (or ``--output``), diagnostics and the run
manifest to stderr (or ``<output>.manifest.json``).  Exit codes: 0 success,
1 failed verification, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import platform
import sys
from fractions import Fraction
from itertools import combinations_with_replacement, permutations

from . import __version__, coeffs, enumerator, mapcore, sampler, series
from .series import parse_rational, render


class VerificationFailed(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _default_seed() -> int:
    try:
        return int(os.environ.get("PEELTRI_SEED", "0"))
    except ValueError:
        return 0


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, ok)
# ---------------------------------------------------------------------------


def cmd_series(args):
    if args.tau:
        n, p = args.tau
        return {"tau": {"n": n, "p": p}, **render(series.tau(n, p))}, True
    if args.zp:
        h, p = _rational(args.zp[0]), int(args.zp[1])
        return {"h": str(h), "p": p, **render(series.Z_p_at(h, p))}, True
    if args.lambda_of_h is not None:
        return {"h": str(args.lambda_of_h), **render(series.lambda_of_h(args.lambda_of_h))}, True
    order = args.order or 8
    s = series.h_series_of_lambda(order)
    return {"series": "h(lambda)", "order": order,
            "coefficients": [render(s[k]) for k in range(order + 1)]}, True


def cmd_coeffs(args):
    fn = coeffs.c_genfun if args.closed_form else coeffs.c_recursive
    vec = fn(args.h, args.gamma, args.pmax)
    rows = [{"p": p, **render(vec[p])} for p in range(1, vec.P + 1)]
    return {"h": str(args.h), "gamma": str(args.gamma), "lambda": render(series.lambda_of_h(args.h)),
            "method": "closed-form" if args.closed_form else "recursion", "C": rows}, True


def _grid():
    return [(h, g) for h in coeffs.GRID_H for g in coeffs.GRID_GAMMA]


def verify_recursion(pmax: int = 24):
    points, ok = [], True
    for h, g in _grid():
        rec = coeffs.c_recursive(h, g, pmax)
        same = rec.values == coeffs.c_genfun(h, g, pmax).values
        if g == 0:
            same = same and all(rec[p] == coeffs.c_psht(p, h) for p in range(1, pmax + 1))
        ok &= same
        points.append({"h": str(h), "gamma": str(g), "equal": same})
    return {"check": "recursion", "pmax": pmax, "points": points, "passed": ok}, ok


def verify_peeling(k_max: int = 3, p_max: int = 4, v_max: int = 3):
    failures, checked = [], 0
    for h, g in _grid():
        mix = coeffs.point_mass(h, g)
        for k in range(1, k_max + 1):
            for base in combinations_with_replacement(range(1, p_max + 1), k):
                for perims in sorted(set(permutations(base))):
                    for v in range(v_max + 1):
                        res = coeffs.verify_peeling_identity(mix, v, perims)
                        checked += 1
                        if not res.is_zero():
                            failures.append({"h": str(h), "gamma": str(g), "perims": perims,
                                             "v": v, "residual": res.exact_str()})
    ok = not failures
    return {"check": "peeling", "identities": checked, "failures": failures, "passed": ok}, ok


def acceptance_mixtures():
    mixes = [(f"point({h},{g})", coeffs.point_mass(h, g)) for h, g in _grid()]
    mixes.append(("(1/8,0)+star", [coeffs.MixtureAtom(Fraction(1, 8), 0, Fraction(1, 2)),
                                   coeffs.MixtureAtom(coeffs.STAR, 0, Fraction(1, 2))]))
    return mixes


def verify_monotone(max_order: int = 6, k_max: int = 8, v_max: int = 7):
    rows, ok = [], True
    for name, mix in acceptance_mixtures():
        table = coeffs.ones_table(mix, k_max, v_max)
        verdicts = coeffs.check_monotone(table, max_order)
        good = all(verdicts.values()) and len(verdicts) == (max_order + 1) * (max_order + 2) // 2
        ok &= good
        rows.append({"mixture": name, "orders_checked": len(verdicts), "passed": good})
    return {"check": "monotone", "max_order": max_order, "tables": rows, "passed": ok}, ok


def cmd_verify(args):
    if args.grid != "default":
        raise ValueError("only --grid default is available")
    if args.what == "recursion":
        return verify_recursion(args.pmax)
    if args.what == "peeling":
        return verify_peeling()
    return verify_monotone()


def cmd_negativity(args):
    res = coeffs.find_negative_p(args.h, args.gamma, args.cap)
    if res:
        return {"h": str(args.h), "gamma": str(args.gamma), "cap": args.cap, "p": res}, True
    return {"h": str(args.h), "gamma": str(args.gamma), "cap": args.cap, "p": None,
            "status": "not found within cap (inconclusive)"}, True


def cmd_sample(args):
    if args.model == "psht":
        if args.n == 1:
            t = sampler.sample_psht_dual_ball(args.h, args.radius, args.seed)
            return {"h": str(args.h), "radius": args.radius, "seed": args.seed,
                    "code": t.canonical_code(), "patch": mapcore.to_patch(t)}, True
        counts = sampler.psht_ball_counts(args.h, args.radius, args.n, args.seed, args.jobs)
        rows = [{"code": c, "count": k} for c, k in sorted(counts.items())]
        return {"h": str(args.h), "radius": args.radius, "n": args.n, "seed": args.seed,
                "frequencies": rows}, True
    res = sampler.sample_boltzmann_polygon(args.p, args.h, cap=args.cap, seed=args.seed)
    return {"p": args.p, "h": str(args.h), "seed": args.seed, "volume": res.volume,
            "retries": res.retries, "patch": mapcore.to_patch(res.complex)}, True


def cmd_build(args):
    build = sampler.build_T0_dual_ball if args.which == "t0" else sampler.build_Tstar_dual_ball
    t = build(args.radius)
    return {"which": args.which, "radius": args.radius, "faces": t.face_count,
            "vertices": t.vertex_count, "code": t.canonical_code(), "patch": mapcore.to_patch(t)}, True


def cmd_enumerate(args):
    maps = enumerator.sphere_list(args.n, args.strategy, args.max_n)
    if args.emit == "jsonl":
        return {"jsonl": [mapcore.to_patch(t) for t in maps]}, True
    return {"n": args.n, "strategy": args.strategy, "count": len(maps),
            "tutte": enumerator.tutte_count(args.n), "digest": enumerator.code_digest(maps)}, True


def cmd_occ(args):
    with open(args.pattern) as fh:
        pattern = mapcore.from_patch(json.load(fh))
    hist = enumerator.occ_distribution(pattern, args.n, args.max_n)
    ratio = enumerator.mean_occ_ratio(pattern, args.n, args.max_n)
    rows = [{"occ": k, "count": c} for k, c in sorted(hist.items())]
    return {"n": args.n, "histogram": rows, "mean_ratio": render(ratio)}, True


def cmd_degree(args):
    val = enumerator.mean_inverse_degree(args.n, args.max_n)
    expected = Fraction(args.n + 2, 6 * args.n)
    ok = val == expected
    return {"n": args.n, "mean_inverse_degree": render(val), "expected": str(expected),
            "passed": ok}, ok


# ---------------------------------------------------------------------------
# parser and output
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", help="write primary output here (manifest beside it)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=_default_seed())

    ap = argparse.ArgumentParser(prog="peeltri", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"peeltri {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", parents=[common], help="partition functions and tau")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--tau", nargs=2, type=int, metavar=("N", "P"))
    g.add_argument("--zp", nargs=2, metavar=("H", "P"))
    g.add_argument("--lambda-of-h", type=_rational, metavar="H")
    p.add_argument("--order", type=int)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("coeffs", parents=[common], help="peeling coefficients C_p")
    p.add_argument("--h", type=_rational, required=True)
    p.add_argument("--gamma", type=_rational, default=Fraction(0))
    p.add_argument("--pmax", type=int, default=10)
    p.add_argument("--closed-form", action="store_true")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("verify", parents=[common], help="exact identity checks")
    p.add_argument("what", choices=("peeling", "monotone", "recursion"))
    p.add_argument("--grid", default="default")
    p.add_argument("--pmax", type=int, default=24)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("negativity", parents=[common], help="least p with C_p < 0")
    p.add_argument("--h", type=_rational, required=True)
    p.add_argument("--gamma", type=_rational, required=True)
    p.add_argument("--cap", type=int, default=200)
    p.set_defaults(func=cmd_negativity)

    p = sub.add_parser("sample", parents=[common], help="peeling samplers")
    p.add_argument("model", choices=("psht", "polygon"))
    p.add_argument("--h", type=_rational, required=True)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--cap", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("build", parents=[common], help="degenerate triangulations")
    p.add_argument("which", choices=("t0", "tstar"))
    p.add_argument("--radius", type=int, required=True)
    p.set_defaults(func=cmd_build)

    for name, func, hlp in (("enumerate", cmd_enumerate, "rooted sphere triangulations"),
                            ("occ", cmd_occ, "pattern occurrence histogram"),
                            ("degree", cmd_degree, "mean inverse root degree")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--max-n", type=int, default=enumerator.DEFAULT_MAX_N)
        if name == "enumerate":
            p.add_argument("--strategy", choices=("a", "b"), default="a")
            p.add_argument("--emit", choices=("summary", "jsonl"), default="summary")
        if name == "occ":
            p.add_argument("--pattern", required=True)
        p.set_defaults(func=func)
    return ap


def _to_csv(payload: dict) -> str:
    rows = None
    for key in ("frequencies", "histogram", "C", "points", "tables", "coefficients"):
        if key in payload:
            rows = payload[key]
            break
    if rows is None:
        rows = [payload]
    buf = io.StringIO()
    fields = sorted({k for r in rows for k in r})
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (json.dumps(v) if isinstance(v, (dict, list, tuple)) else v)
                         for k, v in r.items()})
    return buf.getvalue()


def format_payload(payload: dict, fmt: str) -> str:
    if "jsonl" in payload:
        return "".join(json.dumps(x, sort_keys=True) + "\n" for x in payload["jsonl"])
    if fmt == "csv":
        return _to_csv(payload)
    return json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"


def manifest(argv: list[str], args, text: str) -> dict:
    params = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in vars(args).items()
              if k != "func"}
    return {
        "subcommand": args.command,
        "argv": list(argv),
        "params": params,
        "seed": getattr(args, "seed", None),
        "versions": {"peeltri": __version__, "python": platform.python_version()},
        "output_sha256": hashlib.sha256(text.encode()).hexdigest(),
    }


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        payload, ok = args.func(args)
    except (ValueError, mapcore.MapError, series.SeriesError, coeffs.CoeffError,
            enumerator.BudgetExceeded, sampler.SamplerError, OSError) as exc:
        print(f"peeltri: error: {exc}", file=stderr)
        return 2
    text = format_payload(payload, args.format)
    man = manifest(argv, args, text)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        with open(args.output + ".manifest.json", "w") as fh:
            json.dump(man, fh, sort_keys=True, indent=2)
    else:
        stdout.write(text)
        print(json.dumps({"manifest": man}, sort_keys=True), file=stderr)
    if not ok:
        print("peeltri: verification failed", file=stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
