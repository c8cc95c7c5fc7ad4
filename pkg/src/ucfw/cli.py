"""Command line entry point.

Verbs: ``solve --config``, ``suite <tag>``, ``verify --set --check``,
``online --config``.  The environment variable ``UCFW_SEED`` overrides every
config seed.  Exit codes: 0 all checks pass, 1 a check reported a violation,
2 config or runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import verify as vf
from .errors import ConfigError, UCFWError
from .geometry import LpBall, set_from_json
from .objectives import grad_floor_quadratic
from .solver import StepRule, reference_optimum, run_fw

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_ERROR = 2


def _env_seed() -> int | None:
    raw = os.environ.get("UCFW_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"UCFW_SEED must be an integer, got {raw!r}") from exc


def _load_json(arg: str) -> dict:
    """Accept either a path to a JSON file or an inline JSON object."""
    text = arg
    path = Path(arg)
    if not arg.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON {arg!r}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("expected a JSON object")
    return obj


def _cmd_solve(args: argparse.Namespace) -> int:
    config = _load_json(args.config)
    seed = _env_seed()
    if seed is not None:
        config["seed"] = seed
    manifest = ex.run_solve(config, args.out)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_suite(args: argparse.Namespace) -> int:
    seed = _env_seed()
    if seed is None:
        seed = args.seed
    result = ex.run_suite(args.tag, args.out, seed=seed)
    summary = {k: v for k, v in result.items() if k not in ("runs", "results", "positive", "negative", "files")}
    summary["out"] = str(args.out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    if result.get("pass") is False:
        return EXIT_VIOLATION
    if args.tag == "online" and not all(r["regret_ok"] for r in result["runs"]):
        return EXIT_VIOLATION
    return EXIT_OK


def _verify_objective(feasible):
    if not isinstance(feasible, LpBall):
        raise ConfigError("this check needs an lp-ball set (p > 1)")
    return ex._ball_quadratic(feasible)


def _cmd_verify(args: argparse.Namespace) -> int:
    feasible = set_from_json(_load_json(args.set))
    seed = _env_seed()
    if seed is None:
        seed = args.seed
    cfg = vf.SamplerConfig(n_pairs=args.pairs, n_directions=args.directions, seed=seed)

    uc = feasible.uc
    if args.alpha is not None or args.q is not None:
        from .geometry import UCParams

        if args.alpha is None or args.q is None:
            raise ConfigError("override --alpha and --q together")
        uc = UCParams(alpha=args.alpha, q=args.q, norm_tag="override")
    if uc is None:
        raise ConfigError("set has no uniform-convexity parameters; pass --alpha/--q")

    if args.check == "definition1":
        report = vf.check_definition1(feasible, uc, cfg)
    elif args.check == "lemma1":
        f = _verify_objective(feasible)
        report = vf.check_lemma1(feasible, uc, f, cfg)
    elif args.check in ("local_scaling", "lemma3"):
        f = _verify_objective(feasible)
        f.grad_floor = grad_floor_quadratic(f, feasible)
        x_init = ex.x_init_for(feasible, seed)
        x_star, f_star = reference_optimum(feasible, f, x_init, 50_000, stop_gap=1e-13)
        if args.check == "local_scaling":
            report = vf.check_local_scaling(feasible, f, x_star, uc.alpha, uc.q, cfg)
        else:
            trace = run_fw(feasible, f, x_init, StepRule.short(), 2000, x_star=x_star, f_star=f_star)
            consts = ex.problem_constants(feasible, f)
            report = vf.check_lemma3(trace, consts["c"], consts["alpha"], consts["q"], consts["L"])
    else:
        raise ConfigError(f"unknown check {args.check!r}")

    print(report.to_json())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _cmd_online(args: argparse.Namespace) -> int:
    config = _load_json(args.config)
    seed = _env_seed()
    if seed is not None and "stream" in config and isinstance(config["stream"], dict):
        config["stream"]["seed"] = seed
    manifest = ex.run_online_config(config, args.out)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    if manifest.get("regret_ok") is False:
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucfw",
        description="Projection-free optimization over uniformly convex sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="one traced run from a JSON config")
    p_solve.add_argument("--config", required=True, help="JSON file or inline object")
    p_solve.add_argument("--out", default="out/solve", help="output directory")
    p_solve.set_defaults(func=_cmd_solve)

    p_suite = sub.add_parser("suite", help="run a named experiment suite")
    p_suite.add_argument("tag", choices=["fig2", "online", "verify_all", "bounds_grid"])
    p_suite.add_argument("--out", default=None, help="output directory (default out/<tag>)")
    p_suite.add_argument("--seed", type=int, default=0)
    p_suite.set_defaults(func=_cmd_suite)

    p_verify = sub.add_parser("verify", help="run one geometric check on a set")
    p_verify.add_argument("--set", required=True, help="set descriptor, JSON file or inline")
    p_verify.add_argument(
        "--check", required=True, choices=["definition1", "lemma1", "local_scaling", "lemma3"]
    )
    p_verify.add_argument("--alpha", type=float, default=None, help="override catalog alpha")
    p_verify.add_argument("--q", type=float, default=None, help="override catalog q")
    p_verify.add_argument("--pairs", type=int, default=1000)
    p_verify.add_argument("--directions", type=int, default=50)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=_cmd_verify)

    p_online = sub.add_parser("online", help="one FTL run from a JSON config")
    p_online.add_argument("--config", required=True, help="JSON file or inline object")
    p_online.add_argument("--out", default="out/online", help="output directory")
    p_online.set_defaults(func=_cmd_online)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "suite" and args.out is None:
        args.out = f"out/{args.tag}"
    try:
        return args.func(args)
    except UCFWError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
