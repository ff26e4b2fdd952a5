"""Command-line interface.

Subcommands: threshold, trajectory, banana, simulate, solve-dp.
Configuration comes from an optional JSON file (``--config``) with
per-flag overrides on top. Exit codes: 0 ok, 2 bad configuration,
3 value iteration did not converge, 4 an output failed its own check.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import deterministic as det
from .dp import GridSpec, solve
from .errors import DomainError, InvariantViolation, NoConvergence, PolicyRangeError, QuadratureError
from .model import validate_params
from .serialize import csv_text, policy_document, read_policy_file, write_policy_file
from .simulator import EmployerPolicy, SimulationConfig, simulate

log = logging.getLogger("gigcontract")

EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INVARIANT = 4

PARAM_DEFAULTS = {"c": 1.0, "gamma": 1.0, "beta": 0.8, "delta": 0.8, "sigma": 0.0}
DEFAULT_R0S = [0.53, 0.42, 0.34, 0.22, 0.16, 0.1]
DEFAULT_DELTAS = [0.7, 0.9]

DEFAULTS = {
    "rounds": 20,
    "paths": 10_000,
    "seed": 42,
    "burn_in": 0,
    "workers": 1,
    "policy": "closed_form",
    "share": 1.0,
    "contract": True,
    "pin_reference": False,
    "tol": 1e-10,
    "max_iter": 10_000,
    "quad_nodes": 15,
}
CONFIG_KEYS = set(DEFAULTS) | {"params", "r0", "beta_grid", "delta_list", "grid", "per_round"}
GRID_KEYS = {"r_min", "r_max", "points"}

# relative tolerance for the output self-checks
CHECK_TOL = 1e-12


class ConfigError(Exception):
    pass


def _default_beta_grid():
    return [k / 100 for k in range(1, 100)]


def _number(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    return value


def _integer(name, value):
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    return value


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    params = cfg.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be a JSON object")
    unknown = sorted(set(params) - set(PARAM_DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown params keys: {', '.join(unknown)}")
    grid = cfg.get("grid", {})
    if not isinstance(grid, dict) or set(grid) - GRID_KEYS:
        raise ConfigError(f"grid must be an object with keys among {sorted(GRID_KEYS)}")
    return cfg


def resolve(args):
    """Merge defaults, config file and command-line overrides."""
    cfg = load_config(args.config)
    raw = dict(PARAM_DEFAULTS)
    raw.update(cfg.get("params", {}))
    for key in PARAM_DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            raw[key] = flag
    for key, value in raw.items():
        _number(key, value)
    params = validate_params(raw["c"], raw["gamma"], raw["beta"], raw["delta"], raw["sigma"])

    opts = dict(DEFAULTS)
    opts.update({k: v for k, v in cfg.items() if k != "params"})
    opts.setdefault("grid", {})
    opts["grid"] = dict(opts["grid"])
    for key in ("rounds", "paths", "seed", "burn_in", "workers", "tol", "max_iter",
                "quad_nodes", "policy", "share", "per_round"):
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    if getattr(args, "r0", None) is not None:
        opts["r0"] = args.r0
    if getattr(args, "pin_reference", False):
        opts["pin_reference"] = True
    if getattr(args, "no_contract", False):
        opts["contract"] = False
    for attr, key in (("grid_min", "r_min"), ("grid_max", "r_max"), ("grid_points", "points")):
        value = getattr(args, attr, None)
        if value is not None:
            opts["grid"][key] = value
    # a single --beta/--delta on banana means a one-point grid
    if args.command == "banana":
        if args.beta is not None:
            opts["beta_grid"] = [args.beta]
        if args.delta is not None:
            opts["delta_list"] = [args.delta]
    return params, opts


def emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _check(ok, what):
    if not ok:
        raise InvariantViolation(what)


def _close(a, b, scale=1.0):
    return abs(a - b) <= CHECK_TOL * max(1.0, abs(scale))


def cmd_threshold(params, opts, args):
    sol = det.solve(params)
    a = sol.net_production
    _check(0 < sol.r_bar < a, f"r_bar={sol.r_bar} outside (0, {a})")
    _check(_close(sol.r_bar + sol.v_at_r_bar, a, a), "r_bar + v != 1/(2c)")
    record = {
        "r_bar": sol.r_bar,
        "v_at_r_bar": sol.v_at_r_bar,
        "net_production": sol.net_production,
        "ratio": sol.ratio,
    }
    emit(json.dumps(record, indent=1) + "\n", args.out)
    return 0


def cmd_trajectory(params, opts, args):
    r0s = opts.get("r0", DEFAULT_R0S)
    if not isinstance(r0s, list):
        r0s = [r0s]
    r0s = [_number("r0", r) for r in r0s]
    rounds = _integer("rounds", opts["rounds"])
    if rounds < 1:
        raise ConfigError("rounds must be >= 1")
    r_bar = det.threshold(params)
    a = params.net_production
    rows = []
    for r0 in r0s:
        for row in det.trajectory(params, r0, rounds):
            _check(row.chi == (row.r <= r_bar), f"chi inconsistent at r0={r0}, t={row.t}")
            if row.chi:
                _check(_close(row.v + row.pi, a, a), f"v + pi != 1/(2c) at r0={r0}, t={row.t}")
            rows.append((r0, row.t, row.r, row.chi, row.s, row.f, row.z, row.v, row.pi))
    emit(csv_text(["r0", "t", "r", "chi", "s", "f", "z", "v", "pi"], rows), args.out)
    return 0


def cmd_banana(params, opts, args):
    betas = [_number("beta_grid", b) for b in opts.get("beta_grid", _default_beta_grid())]
    deltas = [_number("delta_list", d) for d in opts.get("delta_list", DEFAULT_DELTAS)]
    a = params.net_production
    rows = []
    for delta in deltas:
        for row in det.banana_curve(params.c, delta, betas):
            _check(_close(row.r_bar + row.v_at_r_bar, a, a),
                   f"r_bar + v != 1/(2c) at delta={delta}, beta={row.beta}")
            rows.append((row.delta, row.beta, row.r_bar, row.v_at_r_bar))
    emit(csv_text(["delta", "beta", "r_bar", "v_at_r_bar"], rows), args.out)
    return 0


def _policy(params, opts):
    choice = opts["policy"]
    if choice == "closed_form":
        return EmployerPolicy.closed_form()
    if choice == "fixed":
        return EmployerPolicy.fixed(s=float(_number("share", opts["share"])),
                                    chi=bool(opts["contract"]))
    try:
        file_params, _, table, _ = read_policy_file(choice)
    except OSError as exc:
        raise ConfigError(f"cannot read policy file {choice}: {exc.strerror}")
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad policy file {choice}: {exc}")
    if file_params != params:
        log.warning("policy file was solved for %s, simulating with %s",
                    file_params.as_dict(), params.as_dict())
    return EmployerPolicy.tabulated(table)


def cmd_simulate(params, opts, args):
    try:
        config = SimulationConfig(
            r0=float(_number("r0", opts.get("r0", 0.0))),
            rounds=_integer("rounds", opts["rounds"]),
            paths=_integer("paths", opts["paths"]),
            seed=_integer("seed", opts["seed"]),
            burn_in=_integer("burn_in", opts["burn_in"]),
            pin_reference=bool(opts["pin_reference"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    policy = _policy(params, opts)
    per_round = opts.get("per_round")
    summary = simulate(params, policy, config, workers=_integer("workers", opts["workers"]),
                       record=per_round is not None)
    _check(0.0 <= summary.employment_rate <= 1.0, "employment rate outside [0, 1]")
    doc = summary.as_dict()
    doc["seed"] = config.seed
    doc["r0"] = config.r0
    doc["policy"] = policy.kind
    emit(json.dumps(doc, indent=1) + "\n", args.out)
    if per_round is not None:
        rec = summary.record
        rows = []
        for p in range(config.paths):
            for t in range(config.rounds):
                rows.append((p, t, rec.r[p, t], rec.chi[p, t], rec.s[p, t], rec.f[p, t],
                             rec.z[p, t], rec.epsilon[p, t], rec.v[p, t], rec.pi[p, t]))
        header = ["path", "t", "r", "chi", "s", "f", "z", "epsilon", "v", "pi"]
        with open(per_round, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text(header, rows))
    return 0


def cmd_solve_dp(params, opts, args):
    g = opts["grid"]
    default = GridSpec.default(params)
    try:
        grid = GridSpec(
            float(_number("grid.r_min", g.get("r_min", default.r_min))),
            float(_number("grid.r_max", g.get("r_max", default.r_max))),
            _integer("grid.points", g.get("points", default.points)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    tol = float(_number("tol", opts["tol"]))
    max_iter = _integer("max_iter", opts["max_iter"])
    quad_nodes = _integer("quad_nodes", opts["quad_nodes"])
    if not tol > 0 or max_iter < 1:
        raise ConfigError("tol must be positive and max_iter >= 1")
    out = args.out or "policy.json"
    code = 0
    try:
        value, policy, report = solve(params, grid, tol, max_iter, quad_nodes)
    except NoConvergence as exc:
        value, policy, report = exc.value, exc.policy, exc.report
        print(f"error: NoConvergence: {exc}", file=sys.stderr)
        code = EXIT_NO_CONVERGENCE
    _check(all(math.isfinite(x) for x in value.values), "non-finite value table")
    write_policy_file(out, policy_document(params, value, policy, report, tol, max_iter, quad_nodes))
    sys.stdout.write(json.dumps(report.as_dict(), indent=1) + "\n")
    return code


COMMANDS = {
    "threshold": cmd_threshold,
    "trajectory": cmd_trajectory,
    "banana": cmd_banana,
    "simulate": cmd_simulate,
    "solve-dp": cmd_solve_dp,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", help="output file (default: standard output)")
    for name in PARAM_DEFAULTS:
        common.add_argument(f"--{name}", type=float, default=None)

    parser = argparse.ArgumentParser(
        prog="gigcontract",
        description="Dynamic principal-agent contract model: solvers and simulator.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("threshold", parents=[common],
                   help="closed-form threshold and steady profit (sigma = 0)")

    p = sub.add_parser("trajectory", parents=[common],
                       help="deterministic reference paths as long-format CSV")
    p.add_argument("--r0", type=_floats, help="initial reference(s), comma separated")
    p.add_argument("--rounds", type=int)

    sub.add_parser("banana", parents=[common],
                   help="threshold and steady profit over a beta grid, as CSV")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo simulation")
    p.add_argument("--r0", type=float)
    p.add_argument("--rounds", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--policy", help="closed_form, fixed, or a policy file from solve-dp")
    p.add_argument("--share", type=float, help="share for the fixed policy")
    p.add_argument("--no-contract", action="store_true", help="fixed policy never contracts")
    p.add_argument("--pin-reference", action="store_true",
                   help="hold the reference at r0 instead of updating it")
    p.add_argument("--per-round", help="also write every round of every path to this CSV")

    p = sub.add_parser("solve-dp", parents=[common], help="value iteration; writes a policy file")
    p.add_argument("--grid-min", type=float)
    p.add_argument("--grid-max", type=float)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--quad-nodes", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.command == "trajectory" and args.r0 is not None and len(args.r0) == 1:
        args.r0 = args.r0[0]
    try:
        params, opts = resolve(args)
        return COMMANDS[args.command](params, opts, args)
    except DomainError as exc:
        print(f"error: {exc.field}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, PolicyRangeError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
