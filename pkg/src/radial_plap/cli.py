"""Command-line front end: ``radial-plap check|opial-k|solve|verify|sweep``.

Problem data come from a JSON scenario file; flags only steer the run.
Exit codes: 0 success/Consistent/Pass, 1 Violated, 2 HypothesesFail or a
failed/undecidable condition set, 3 numerical failure, 4 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from multiprocessing.pool import ThreadPool

import jsonschema
import numpy as np

from .conditions import ConditionSetId, check_set
from .core import (
    Constant,
    Form,
    GrowthEnvelope,
    HZero,
    OddPower,
    PowerLaw,
    ProblemSpec,
    SharpnessProduct,
    WeightSpec,
)
from .errors import InvalidParameter, RadialPlapError
from .opial import OpialSetup, opial_constant, opial_constant_power_closed_form, weight_coefficient
from .radial_ode import Direction, ShootSpec, Trajectory, solve
from .theorems import (
    VerdictStatus,
    monohomo_verdict,
    monotonicity_verdict,
    power_params_from_spec,
    power_region_classify,
    PowerParams,
    support_propagation,
    triviality_verdict,
    twprzy_verdict,
    vanishing_flux_verdict,
    verify_apriori,
    a_at_zero,
)

EXIT_OK, EXIT_VIOLATED, EXIT_HYP, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2, 3, 4

VERDICT_EXIT = {
    VerdictStatus.CONSISTENT: EXIT_OK,
    VerdictStatus.VIOLATED: EXIT_VIOLATED,
    VerdictStatus.HYPOTHESES_FAIL: EXIT_HYP,
    VerdictStatus.INCONCLUSIVE: EXIT_NUMERIC,
}

_NUM = {"type": "number"}
_POWER = {"type": "object", "additionalProperties": False, "required": ["kind", "coeff", "exponent"],
          "properties": {"kind": {"const": "power"}, "coeff": _NUM, "exponent": _NUM}}

SCENARIO_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["p", "n", "R", "weight", "phi"],
    "properties": {
        "p": _NUM,
        "n": _NUM,
        "R": {"oneOf": [_NUM, {"enum": ["inf", "Infinity"]}]},
        "weight": {"oneOf": [
            _POWER,
            {"type": "object", "additionalProperties": False, "required": ["kind", "value"],
             "properties": {"kind": {"const": "constant"}, "value": _NUM}},
        ]},
        "phi": {"type": "object", "additionalProperties": False,
                "required": ["kind", "coeff", "degree"],
                "properties": {"kind": {"const": "odd_power"}, "coeff": _NUM, "degree": _NUM}},
        "h": {"oneOf": [
            {"type": "object", "additionalProperties": False, "required": ["kind"],
             "properties": {"kind": {"const": "zero"}}},
            {"type": "object", "additionalProperties": False,
             "required": ["kind", "D", "s", "gamma", "l"],
             "properties": {"kind": {"const": "sharpness"}, "D": _NUM, "s": _NUM,
                            "gamma": _NUM, "l": _NUM}},
        ]},
        "form": {"enum": ["divergent", "nondivergent"]},
        "envelope": {"type": "object", "additionalProperties": False,
                     "required": ["theta", "l", "q"],
                     "properties": {"theta": _NUM, "l": _NUM, "q": _POWER,
                                    "v": {"enum": ["delta", "d"]}}},
        "shoot": {"type": "object", "additionalProperties": False,
                  "properties": {"direction": {"enum": ["ForwardFromZero", "BackwardFromR"]},
                                 "epsilon": _NUM, "u0": _NUM, "du0": _NUM}},
    },
}


class InputError(Exception):
    pass


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read scenario: {exc}") from exc
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputError(f"schema error: {exc.message}") from exc
    return doc


def _power(d):
    return PowerLaw(float(d["coeff"]), float(d["exponent"]))


def spec_from_scenario(doc) -> ProblemSpec:
    try:
        w = doc["weight"]
        a = _power(w) if w["kind"] == "power" else Constant(float(w["value"]))
        weight = WeightSpec(a, float(doc["n"]), float(doc["p"]))
        phi = OddPower(float(doc["phi"]["coeff"]), float(doc["phi"]["degree"]))
        hd = doc.get("h", {"kind": "zero"})
        h = HZero() if hd["kind"] == "zero" else SharpnessProduct(
            float(hd["D"]), float(hd["s"]), float(hd["gamma"]), float(hd["l"]))
        env = None
        if "envelope" in doc:
            e = doc["envelope"]
            env = GrowthEnvelope(float(e["theta"]), float(e["l"]), _power(e["q"]),
                                 e.get("v", "delta"))
        R = math.inf if isinstance(doc["R"], str) else float(doc["R"])
        return ProblemSpec(weight, R, phi, h, Form(doc.get("form", "nondivergent")), env)
    except (InvalidParameter, ValueError) as exc:
        raise InputError(f"invalid scenario: {exc}") from exc


def shoot_from_scenario(doc, default_direction=Direction.FORWARD) -> ShootSpec:
    sh = doc.get("shoot", {})
    try:
        return ShootSpec(Direction(sh.get("direction", default_direction.value)),
                         sh.get("epsilon"), float(sh.get("u0", 0.0)), float(sh.get("du0", 0.0)))
    except (InvalidParameter, ValueError) as exc:
        raise InputError(f"invalid shoot block: {exc}") from exc


def _human(x: float) -> str:
    return format(x, "#.13g")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    spec = spec_from_scenario(load_scenario(args.scenario))
    report = check_set(ConditionSetId(args.set), spec)
    print(report.to_json())
    return EXIT_OK if report.passed else EXIT_HYP


def cmd_opial_k(args) -> int:
    try:
        s, r = (float(x) for x in args.interval.split(","))
    except ValueError:
        raise InputError("--interval must be 's,r'")
    if not 0 <= s <= r:
        raise InputError("--interval needs 0 <= s <= r")
    p, l, n, alpha, gamma, C = args.p, args.l, args.n, args.alpha, args.gamma, args.C
    try:
        if s == r:
            value = 0.0
        elif s == 0:
            value = opial_constant_power_closed_form(p, l, n, alpha, gamma, C, r, args.v).value
        else:
            cv = weight_coefficient(p, n, alpha, args.v)
            setup = OpialSetup(l, p - l, PowerLaw(C, gamma), PowerLaw(cv, alpha - 1.0), (0.0, r))
            value = opial_constant(setup, s, r)
    except InvalidParameter as exc:
        raise InputError(str(exc)) from exc
    except RadialPlapError as exc:
        print(f"inadmissible: {exc}")
        return EXIT_HYP
    if not math.isfinite(value):
        print("infinite")
        return EXIT_HYP
    print(_human(value))
    return EXIT_OK


def cmd_solve(args) -> int:
    doc = load_scenario(args.scenario)
    spec = spec_from_scenario(doc)
    traj = solve(spec, shoot_from_scenario(doc))
    if args.out:
        traj.to_csv(args.out)
    else:
        sys.stdout.write(traj.to_csv())
    return EXIT_OK if traj.termination.ok else EXIT_NUMERIC


def _trajectory(path, spec, shoot):
    if path:
        return Trajectory.from_csv(path, p=spec.p)
    return solve(spec, shoot)


def run_verify(doc, theorem: str, trajectory_path=None, at=None):
    spec = spec_from_scenario(doc)
    shoot = shoot_from_scenario(doc, Direction.BACKWARD if theorem in ("lewa", "monohomo")
                                else Direction.FORWARD)
    traj = _trajectory(trajectory_path, spec, shoot)
    if theorem == "prawa":
        a0 = a_at_zero(spec.a)
        if a0 == 0 or shoot.du0 == 0:
            return triviality_verdict(spec, shoot.du0)
        return verify_apriori(spec, traj, shoot.du0)
    if theorem == "support":
        if at is None:
            inner = np.arange(1, max(len(traj) - 1, 1))
            score = np.abs(traj.u[inner]) + np.abs(traj.du[inner])
            at = float(traj.tau[inner[int(np.argmin(score))]]) if inner.size else float(traj.tau[0])
        return support_propagation(spec, traj, at)
    if theorem == "lewa":
        v = monotonicity_verdict(traj, spec)
        if v.status is not VerdictStatus.CONSISTENT:
            return v
        flux = vanishing_flux_verdict(spec, traj, check_hypotheses=False)
        v.numbers.update(flux.numbers)
        if flux.status is VerdictStatus.VIOLATED:
            v.status = VerdictStatus.VIOLATED
            v.witnesses = flux.witnesses
        return v
    if theorem == "twprzy":
        return twprzy_verdict(spec, traj)
    return monohomo_verdict(spec, traj)


def cmd_verify(args) -> int:
    doc = load_scenario(args.scenario)
    verdict = run_verify(doc, args.theorem, args.trajectory, args.at)
    print(verdict.to_json())
    return VERDICT_EXIT[verdict.status]


SWEEPABLE = ("p", "l", "alpha", "gamma", "n", "C")


def parse_vary(text: str):
    try:
        name, rng = text.split("=", 1)
        lo, hi, step = (float(x) for x in rng.split(":"))
    except ValueError:
        raise InputError(f"--vary expects name=lo:hi:step, got {text!r}")
    name = name.strip()
    if name not in SWEEPABLE:
        raise InputError(f"--vary: unknown parameter {name!r}")
    if not step > 0:
        raise InputError("--vary: step must be positive")
    if hi < lo:
        return name, []
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return name, [round(lo + k * step, 12) for k in range(count)]


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("RADIAL_PLAP_THREADS", "1")))
    except ValueError:
        return 1


def sweep_rows(base: PowerParams, axes):
    """Classification rows over the product grid, in deterministic order."""
    names = [n for n, _ in axes]
    grid = [()]
    for _, vals in axes:
        grid = [g + (v,) for g in grid for v in vals]

    def one(point):
        kw = dict(base.__dict__)
        kw.update(zip(names, point))
        try:
            res = power_region_classify(PowerParams(**kw))
            return list(point) + [res.region.value, res.reason]
        except InvalidParameter as exc:
            return list(point) + ["OutsideTheory", str(exc)]

    if not grid or (len(grid) == 1 and not names):
        return names, []
    with ThreadPool(_workers()) as pool:
        rows = pool.map(one, grid)
    return names, rows


def cmd_sweep(args) -> int:
    doc = load_scenario(args.scenario)
    spec = spec_from_scenario(doc)
    try:
        base = power_params_from_spec(spec)
    except RadialPlapError as exc:
        raise InputError(str(exc)) from exc
    axes = [parse_vary(v) for v in args.vary or []]
    names, rows = sweep_rows(base, axes)
    if any(not vals for _, vals in axes):
        rows = []
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(names + ["region", "reason"])
        for row in rows:
            w.writerow([format(x, ".12g") for x in row[:len(names)]] + row[len(names):])
    finally:
        if args.out:
            out.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radial-plap", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="evaluate a condition bundle")
    c.add_argument("scenario")
    c.add_argument("--set", required=True, choices=[s.value for s in ConditionSetId])
    c.set_defaults(func=cmd_check)

    k = sub.add_parser("opial-k", help="Opial constant for power data")
    for name in ("p", "l", "n", "alpha", "gamma", "C"):
        k.add_argument(f"--{name}", type=float, required=True)
    k.add_argument("--interval", default="0,1")
    k.add_argument("--v", choices=["delta", "d"], default="delta")
    k.set_defaults(func=cmd_opial_k)

    s = sub.add_parser("solve", help="shoot and write a trajectory CSV")
    s.add_argument("scenario")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="theorem verdict as JSON")
    v.add_argument("scenario")
    v.add_argument("--theorem", required=True,
                   choices=["prawa", "support", "lewa", "twprzy", "monohomo"])
    v.add_argument("--trajectory", help="reuse a trajectory CSV instead of solving")
    v.add_argument("--at", type=float, help="interior point for the support theorem")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("sweep", help="classify a parameter grid")
    w.add_argument("scenario")
    w.add_argument("--vary", action="append")
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RadialPlapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
