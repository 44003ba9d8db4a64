"""Command-line interface.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import construction, dynamics
from .coherence import (
    check_coherence,
    check_extreme,
    from_expert_model,
    load_expert_model,
)
from .errors import CoherentLabError
from .measures import format_measure, load_measure, save_measure
from .rational import format_rational, parse_rational

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2

SEED_ENV = "COHERENT_LAB_SEED"


class InputError(Exception):
    """Raised inside a command for problems that map to exit code 2."""


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"{SEED_ENV}={env!r} is not an integer") from None


def _emit(payload: dict, args: argparse.Namespace) -> None:
    text = json.dumps(payload, indent=2)
    if getattr(args, "json", None):
        Path(args.json).write_text(text + "\n", encoding="utf-8")
    print(text)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _load(path: str):
    try:
        return load_measure(path)
    except OSError as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    m = _load(args.path)
    if not m:
        raise InputError("empty measure")
    report = check_coherence(m)
    _emit(report.to_dict(), args)
    _note(f"coherent: {report.feasible}  defect: {format_rational(report.defect)}")
    return EXIT_OK if report.feasible else EXIT_FAIL


def cmd_extreme(args: argparse.Namespace) -> int:
    m = _load(args.path)
    if not m:
        raise InputError("empty measure")
    report = check_extreme(m)
    _emit(report.to_dict(), args)
    _note(
        f"coherent: {report.coherent}  unique: {report.unique}  "
        f"minimal: {report.minimal}  extreme: {report.extreme}"
    )
    return EXIT_OK if report.extreme else EXIT_FAIL


def cmd_expert(args: argparse.Namespace) -> int:
    try:
        model = load_expert_model(args.path)
    except OSError as exc:
        raise InputError(str(exc)) from None
    measure, rep = from_expert_model(model)
    if args.out:
        save_measure(measure, args.out, header="pushforward of an expert model")
    report = check_coherence(measure)
    payload = report.to_dict()
    payload["generator_representation"] = rep.to_dict()
    _emit(payload, args)
    _note(f"coherent: {report.feasible}  atoms: {len(measure)}")
    return EXIT_OK if report.feasible else EXIT_FAIL


def cmd_cobweb(args: argparse.Namespace) -> int:
    if not 0 < args.r < 1:
        raise InputError(f"--r {args.r} outside (0, 1)")
    if not 0 <= args.x0 <= args.r:
        raise InputError(f"--x0 {args.x0} outside [0, r]")
    if args.n < 2:
        raise InputError("--n must be at least 2")
    cw = construction.cobweb_measure(args.r, args.x0, args.n)
    header = f"cobweb r={args.r} x0={args.x0} n={args.n}"
    out = Path(args.out)
    save_measure(cw.measure, out, header=header)
    csv_path = Path(args.csv) if args.csv else out.with_suffix(".csv")
    csv_path.write_text(construction.plot_csv(cw.measure, cw.endpoints), encoding="utf-8")
    ratios = construction.interior_ratio_check(cw)
    defect = check_coherence(cw.measure).defect
    payload = {
        "r": format_rational(cw.r),
        "x0": format_rational(cw.x0),
        "n": cw.n,
        "atoms": len(cw.measure),
        "normalizer": format_rational(cw.normalizer),
        "first_repeat": cw.first_repeat,
        "defect": format_rational(defect),
        "defect_float": float(defect),
        "interior_ratios_ok": ratios.ok,
        "measure_path": str(out),
        "csv_path": str(csv_path),
    }
    _emit(payload, args)
    _note(f"defect: {format_rational(defect)} (~{float(defect):.6g})")
    return EXIT_OK if ratios.ok else EXIT_FAIL


def cmd_mr(args: argparse.Namespace) -> int:
    r = args.r
    if not 0 < r < 1:
        raise InputError(f"--r {r} outside (0, 1)")
    if args.k < 1:
        raise InputError("--k must be at least 1")
    rf = float(r)
    m = construction.discretize_mr(r, args.k)
    payload: dict = {
        "r": format_rational(r),
        "k": args.k,
        "c_r": construction.c_r(rf),
        "atoms": len(m),
    }
    if args.out:
        save_measure(m, args.out, header=f"midpoint discretisation of m_r, r={r}, k={args.k}")
        payload["measure_path"] = args.out
    if args.csv:
        Path(args.csv).write_text(construction.mr_curve_csv(rf), encoding="utf-8")
    ok = True
    if args.verify:
        report = construction.verify_R_identities(rf, grid=args.grid, tol=args.tol)
        payload["identities"] = report.to_dict()
        mass_ok = report.total_mass_error <= 1e-12
        payload["total_mass_ok"] = mass_ok
        ok = report.passed and mass_ok
        _note(f"max identity error: {report.max_error:.3g}  total-mass error: {report.total_mass_error:.3g}")
    if args.out is None:
        payload["measure"] = format_measure(m).splitlines()
    _emit(payload, args)
    return EXIT_OK if ok else EXIT_FAIL


def _probe_invariance(args: argparse.Namespace, rng: random.Random) -> tuple[bool, dict]:
    r = args.r
    den = args.denominator
    failures = 0
    for _ in range(args.trials):
        a = Fraction(rng.randint(0, den), den) * r
        b = Fraction(rng.randint(0, den), den) * r
        a, b = min(a, b), max(a, b)
        if dynamics.preimage_interval(r, a, b).length != b - a:
            failures += 1
    return failures == 0, {"trials": args.trials, "failures": failures}


def _probe_birkhoff(args: argparse.Namespace, rng: random.Random) -> tuple[bool, dict]:
    x0 = args.x0
    if x0 is None:
        raise InputError("the birkhoff probe needs --x0")
    if not 0 <= x0 <= args.r:
        raise InputError(f"--x0 {x0} outside [0, r]")
    steps = args.n
    avg = dynamics.birkhoff_average(args.r, x0, steps)
    head = dynamics.orbit(args.r, x0, min(steps, 10_000))
    info = {
        "x0": format_rational(x0),
        "n": steps,
        "average": avg,
        "space_average": float(args.r) / 2,
        "periodic_within": head.first_repeat,
        "period": head.period,
    }
    ok = True
    if args.expect is not None:
        ok = abs(avg - float(args.expect)) <= args.tol
        info["expect"] = float(args.expect)
        info["tol"] = args.tol
    return ok, info


def _probe_transfer(args: argparse.Namespace, rng: random.Random) -> tuple[bool, dict]:
    k = args.k
    if k < 2 or k & (k - 1):
        raise InputError("--k must be a power of two")
    levels = k.bit_length() - 1
    if args.init == "corner":
        values = [Fraction(k)] + [Fraction(0)] * (k - 1)
    else:
        values = [Fraction(rng.randint(0, 20), rng.randint(1, 9)) for _ in range(k)]
        if not any(values):
            values[0] = Fraction(1)
    h0 = dynamics.Histogram.of(args.r, values)
    steps = args.steps if args.steps is not None else levels
    hs = dynamics.iterate_transfer(args.r, h0, steps)
    dist = [h.l1_to_uniform() for h in hs]
    monotone = all(b <= a for a, b in zip(dist, dist[1:]))
    hit = next((i for i, h in enumerate(hs) if h.is_uniform()), None)
    ok = monotone and hit is not None and hit <= levels
    info = {
        "k": k,
        "steps": steps,
        "distances": [float(d) for d in dist[1:]],
        "uniform_at_step": hit,
        "non_increasing": monotone,
        "integral_preserved": all(h.integral == h0.integral for h in hs),
    }
    return ok, info


_PROBES = {
    "invariance": _probe_invariance,
    "birkhoff": _probe_birkhoff,
    "transfer": _probe_transfer,
}


def cmd_dynamics(args: argparse.Namespace) -> int:
    if not 0 < args.r < 1:
        raise InputError(f"--r {args.r} outside (0, 1)")
    seed = _seed(args)
    rng = random.Random(seed)
    ok, info = _PROBES[args.probe](args, rng)
    payload = {"probe": args.probe, "r": format_rational(args.r), "seed": seed, "ok": ok, **info}
    _emit(payload, args)
    _note(f"{args.probe}: {'ok' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coherent-lab",
        description="Coherence and extremality checks, tent-map constructions and ergodic probes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p):
        p.add_argument("--json", metavar="PATH", help="also write the JSON report here")

    p = sub.add_parser("check", help="decide coherence of a measure file")
    p.add_argument("path")
    add_json(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extreme", help="test extremality of a measure file")
    p.add_argument("path")
    add_json(p)
    p.set_defaults(func=cmd_extreme)

    p = sub.add_parser("expert", help="push an expert model forward and check coherence")
    p.add_argument("path")
    p.add_argument("--out", help="write the resulting measure here")
    add_json(p)
    p.set_defaults(func=cmd_expert)

    p = sub.add_parser("cobweb", help="build a cobweb measure")
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--x0", type=_rational, required=True)
    p.add_argument("--n", type=_count, required=True)
    p.add_argument("--out", required=True, help="measure file to write")
    p.add_argument("--csv", help="plot CSV (default: OUT with .csv suffix)")
    add_json(p)
    p.set_defaults(func=cmd_cobweb)

    p = sub.add_parser("mr", help="discretise m_r and optionally verify its identities")
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--k", type=_count, required=True)
    p.add_argument("--out", help="measure file to write")
    p.add_argument("--csv", help="write support-curve CSV here")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--grid", type=_count, default=100)
    p.add_argument("--tol", type=float, default=1e-10)
    add_json(p)
    p.set_defaults(func=cmd_mr)

    p = sub.add_parser("dynamics", help="tent-map probes")
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--probe", choices=sorted(_PROBES), required=True)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV}, then 0")
    p.add_argument("--trials", type=_count, default=1000, help="invariance: random intervals")
    p.add_argument("--denominator", type=_count, default=1 << 16, help="invariance: endpoint grid")
    p.add_argument("--x0", type=_rational, help="birkhoff: start point")
    p.add_argument("--n", type=_count, default=10**6, help="birkhoff: steps")
    p.add_argument("--expect", type=_rational, help="birkhoff: fail unless the average is this close")
    p.add_argument("--tol", type=float, default=5e-3, help="birkhoff: tolerance for --expect")
    p.add_argument("--k", type=_count, default=8, help="transfer: bins (power of two)")
    p.add_argument("--steps", type=_count, help="transfer: steps (default log2 k)")
    p.add_argument("--init", choices=("corner", "random"), default="corner")
    add_json(p)
    p.set_defaults(func=cmd_dynamics)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (InputError, CoherentLabError) as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
