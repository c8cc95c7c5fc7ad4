"""Experiment drivers: single solves from JSON configs, the curved-vs-flat
lp-ball grid, the online regret sweep, the recursion-soundness grid, and
the full geometric verification battery.

Every driver writes CSV traces plus a JSON manifest (written last) into an
output directory; reruns with the same config and seed are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds as bnd
from . import verify as vf
from .errors import ConfigError
from .geometry import (
    FeasibleSet,
    L1Ball,
    LpBall,
    SchattenBall,
    UCParams,
    set_from_json,
    sqnorm_level_set,
)
from .objectives import (
    QuadraticObjective,
    SmoothObjective,
    dual_floor_factor,
    grad_floor_quadratic,
    lp_smoothness_from_l2,
    objective_from_json,
    quadratic_from_descriptor,
)
from .online import LossStream, adversarial_stream, run_ftl, stream_from_json, theorem4_bound
from .solver import StepRule, reference_optimum, run_fw
from .svg import line_plot_svg

__all__ = [
    "ExperimentConfig",
    "fit_loglog_slope",
    "problem_constants",
    "run_single",
    "run_solve",
    "run_fig2",
    "run_online_suite",
    "run_bounds_grid",
    "run_verify_all",
    "run_suite",
]

DEFAULT_P_GRID = (2.5, 3.0, 5.0, 7.0, 10.0)
STEP_RULES = {"deterministic": StepRule.deterministic(), "short": StepRule.short(), "exact": StepRule.exact()}


def fit_loglog_slope(t, y, t_min: float, t_max: float) -> float:
    """Least-squares slope of log10(y) against log10(t) over a window."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (t >= t_min) & (t <= t_max) & (t > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log10(t[keep]), np.log10(y[keep]), 1)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """Curved-vs-flat grid configuration (defaults reproduce the protocol:
    quadratic with condition number 100 over lp balls of radius 5)."""

    dim: int = 100
    cond: float = 100.0
    radius: float = 5.0
    p_grid: tuple = DEFAULT_P_GRID
    step_rules: tuple = ("deterministic", "short", "exact")
    horizon: int = 1000
    seed: int = 0
    optimum_location: str = "curved"  # "curved" | "flat"
    x0_scale_factor: float = 3.0  # ||x0||_2 = factor * radius, keeps c > 0
    reference_multiplier: int = 50

    def __post_init__(self) -> None:
        if self.optimum_location not in ("curved", "flat"):
            raise ConfigError(f"unknown optimum_location {self.optimum_location!r}")
        for rule in self.step_rules:
            if rule not in STEP_RULES:
                raise ConfigError(f"unknown step rule {rule!r}")
        if self.horizon < 1 or self.dim < 2:
            raise ConfigError("need horizon >= 1 and dim >= 2")

    @staticmethod
    def from_json(desc: dict) -> "ExperimentConfig":
        known = {f for f in ExperimentConfig.__dataclass_fields__}
        extra = set(desc) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        desc = dict(desc)
        for key in ("p_grid", "step_rules"):
            if key in desc:
                desc[key] = tuple(desc[key])
        return ExperimentConfig(**desc)


def build_problem(cfg: ExperimentConfig, p: float) -> tuple[LpBall, QuadraticObjective]:
    direction = "ones" if cfg.optimum_location == "curved" else "e1"
    feasible = LpBall(p=p, radius=cfg.radius, dim=cfg.dim)
    objective = quadratic_from_descriptor(
        dim=cfg.dim,
        cond=cfg.cond,
        x0_direction=direction,
        x0_scale=cfg.x0_scale_factor * cfg.radius,
    )
    return feasible, objective


def problem_constants(feasible: LpBall, f: QuadraticObjective) -> dict:
    """Theorem constants in the set's norm pair: gradient floor c (dual lp
    norm), catalog (alpha, q), and the lp-converted smoothness constant."""
    uc = feasible.uc_params()
    return {
        "c": grad_floor_quadratic(f, feasible),
        "alpha": uc.alpha,
        "q": uc.q,
        "L": lp_smoothness_from_l2(f.L, feasible.dim, feasible.p),
    }


def _heb_in_lp_norm(f: QuadraticObjective, feasible: LpBall):
    # ||.||_p <= d^{max(0, 1/p - 1/2)} ||.||_2, so scale mu_heb accordingly
    factor = feasible.dim ** max(0.0, 1.0 / feasible.p - 0.5)
    return f.heb.mu_heb * factor, f.heb.theta


def x_init_for(feasible: FeasibleSet, seed: int) -> np.ndarray:
    """Default start: the LMO vertex of a seeded random direction."""
    rng = np.random.default_rng(seed)
    return feasible.lmo(rng.standard_normal(feasible.dim))


def run_single(
    feasible: LpBall,
    f: QuadraticObjective,
    rule_name: str,
    T: int,
    seed: int,
    x_star=None,
    f_star=None,
    stop_gap: float = 1e-12,
):
    """One traced run plus the applicable bound-curve columns.

    Bound curves attach only to short-step / exact-line-search runs with
    primal gaps; the T2 curve anchors at the first iteration with h_t <= 1.
    """
    rule = STEP_RULES[rule_name]
    x_init = x_init_for(feasible, seed)
    trace = run_fw(feasible, f, x_init, rule, T, stop_gap=stop_gap, x_star=x_star, f_star=f_star)

    extra: dict[str, np.ndarray] = {}
    if rule_name in ("short", "exact") and trace.has_primal_gaps and len(trace) > 0:
        consts = problem_constants(feasible, f)
        h0 = float(trace.primal_gap[0])
        ts = trace.t.astype(float)
        if consts["c"] > 0.0 and h0 > 0.0:
            b1 = bnd.theorem1_bound(consts["c"], consts["alpha"], consts["q"], consts["L"], h0)
            extra["bound_t1"] = np.asarray(b1.evaluate(ts), dtype=float)
            burn = np.flatnonzero(trace.primal_gap <= 1.0)
            if len(burn):
                anchor = int(burn[0])
                b2 = bnd.theorem2_bound(
                    consts["c"], consts["alpha"], consts["q"], consts["L"],
                    float(trace.primal_gap[anchor]),
                )
                col = np.full_like(ts, np.inf)
                col[anchor:] = np.asarray(b2.evaluate(ts[anchor:] - anchor), dtype=float)
                extra["bound_t2"] = col
                trace.metadata["t2_anchor"] = anchor
        if f.heb is not None and h0 > 0.0:
            mu_p, theta = _heb_in_lp_norm(f, feasible)
            b3 = bnd.theorem3_bound(consts["alpha"], consts["q"], mu_p, theta, consts["L"], h0)
            extra["bound_t3"] = np.asarray(b3.evaluate(ts), dtype=float)
        trace.metadata["constants"] = consts
    return trace, extra


def run_solve(config: dict, out_dir) -> dict:
    """`solve --config` entry: one run from a JSON problem description."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        feasible = set_from_json(config["set"])
        objective = objective_from_json(config["objective"])
        rule_name = config.get("rule", "short")
        T = int(config.get("T", 1000))
        seed = int(config.get("seed", 0))
    except KeyError as exc:
        raise ConfigError(f"solve config missing field {exc}") from exc
    if rule_name not in STEP_RULES:
        raise ConfigError(f"unknown step rule {rule_name!r}")
    if not isinstance(feasible, LpBall):
        raise ConfigError("solve currently drives lp-ball problems")
    stop_gap = float(config.get("stop_gap", 1e-12))
    ref_mult = int(config.get("reference_multiplier", 50))

    x_init = x_init_for(feasible, seed)
    x_star, f_star = reference_optimum(
        feasible, objective, x_init, ref_mult * T, stop_gap=min(stop_gap, 1e-12)
    )
    trace, extra = run_single(
        feasible, objective, rule_name, T, seed, x_star=x_star, f_star=f_star, stop_gap=stop_gap
    )
    csv_path = out_dir / "trace.csv"
    trace.to_csv(csv_path, extra_columns=extra)
    trace.metadata["config"] = config
    trace.write_sidecar(out_dir / "trace.json")
    manifest = {
        "files": ["trace.csv", "trace.json"],
        "stopped_at": trace.metadata["stopped_at"],
        "final_min_fw_gap": float(trace.min_fw_gap[-1]),
    }
    _write_manifest(out_dir, manifest)
    return manifest


def run_experiment(cfg: ExperimentConfig, out_dir) -> dict:
    """One location of the curved-vs-flat protocol: every (step rule, p)
    pair, traces with bound overlays, and one SVG of running-min gaps per
    step rule."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"config": _cfg_to_dict(cfg), "files": [], "runs": []}

    references = {}
    for p in cfg.p_grid:
        feasible, objective = build_problem(cfg, p)
        x_init = x_init_for(feasible, cfg.seed)
        references[p] = reference_optimum(
            feasible, objective, x_init, cfg.reference_multiplier * cfg.horizon, stop_gap=1e-13
        )

    for rule_name in cfg.step_rules:
        series = []
        for p in cfg.p_grid:
            feasible, objective = build_problem(cfg, p)
            x_star, f_star = references[p]
            trace, extra = run_single(
                feasible, objective, rule_name, cfg.horizon, cfg.seed,
                x_star=x_star, f_star=f_star,
            )
            name = f"{cfg.optimum_location}_{rule_name}_p{p:g}"
            csv_name = f"{name}.csv"
            trace.to_csv(out_dir / csv_name, extra_columns=extra)
            trace.write_sidecar(out_dir / f"{name}.json")
            min_gap = trace.min_fw_gap
            manifest["files"].extend([csv_name, f"{name}.json"])
            manifest["runs"].append(
                {
                    "location": cfg.optimum_location,
                    "rule": rule_name,
                    "p": p,
                    "rows": len(trace),
                    "stopped_at": trace.metadata["stopped_at"],
                    "final_min_fw_gap": float(min_gap[-1]),
                    "min_gap_slope": fit_loglog_slope(trace.t, min_gap, 10, cfg.horizon),
                    "csv": csv_name,
                }
            )
            series.append((f"p={p:g}", trace.t[1:], min_gap[1:]))
        svg_name = f"{cfg.optimum_location}_{rule_name}.svg"
        svg = line_plot_svg(
            series,
            title=f"{cfg.optimum_location} optimum, {rule_name} step",
            xlabel="iteration",
            ylabel="min Frank-Wolfe gap",
        )
        (out_dir / svg_name).write_text(svg)
        manifest["files"].append(svg_name)
    _write_manifest(out_dir, manifest)
    return manifest


def run_fig2(out_dir, seed: int = 0, dim: int = 100, horizon: int = 1000) -> dict:
    """The full 2x3 grid (curved/flat x deterministic/short/exact) over the
    default p grid."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    combined: dict = {"suite": "fig2", "files": [], "runs": []}
    for location in ("curved", "flat"):
        cfg = ExperimentConfig(
            dim=dim, horizon=horizon, seed=seed, optimum_location=location
        )
        part = run_experiment(cfg, out_dir)
        combined["files"].extend(part["files"])
        combined["runs"].extend(part["runs"])
    _write_manifest(out_dir, combined)
    return combined


def run_online_suite(
    out_dir, seed: int = 0, T: int = 10000, p_grid=(2.0, 2.5, 3.0, 5.0), dim: int = 8
) -> dict:
    """FTL regret sweep over lp balls with an adversarial stream whose
    running gradient average stays bounded below."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"suite": "online", "files": [], "runs": []}
    base = np.zeros(dim)
    base[0] = 1.0
    for p in p_grid:
        feasible = LpBall(p=p, radius=1.0, dim=dim)
        stream = adversarial_stream(base, flip_scale=0.5, seed=seed)
        trace = run_ftl(feasible, stream, T)
        uc = feasible.uc_params()
        bound = trace.bound_curve(uc.alpha, uc.q)
        csv_name = f"online_p{p:g}.csv"
        trace.to_csv(out_dir / csv_name, bound=bound)
        manifest["files"].append(csv_name)
        manifest["runs"].append(
            {
                "p": p,
                "q": uc.q,
                "alpha": uc.alpha,
                "T": T,
                "M_loss": trace.M_loss,
                "L_T": trace.L_T,
                "final_regret": float(trace.regret[-1]),
                "final_bound": float(bound[-1]),
                "regret_ok": bool(np.all(trace.regret <= bound + 1e-9)),
                "csv": csv_name,
            }
        )
    _write_manifest(out_dir, manifest)
    return manifest


def run_bounds_grid(out_dir, steps: int = 100_000) -> dict:
    """Recursion-soundness grid: the brute-force worst-case trajectory
    against the closed-form envelope for every (eta, C, h0) combination."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    etas = np.round(np.linspace(0.1, 1.0, 10), 10)
    Cs = np.array([0.01, 0.1, 1.0])
    h0s = np.array([0.5, 1.0, 10.0])
    eg, cg, hg = np.meshgrid(etas, Cs, h0s, indexing="ij")
    traj = bnd.iterate_recursion(eg, cg, hg, steps)  # (steps+1, 10, 3, 3)
    t = np.arange(steps + 1, dtype=float)

    worst_excess = -np.inf
    results = []
    for i in range(eg.shape[0]):
        for j in range(eg.shape[1]):
            for m in range(eg.shape[2]):
                rc = bnd.recursion_bound(float(eg[i, j, m]), float(cg[i, j, m]), float(hg[i, j, m]))
                curve = rc.evaluate(t)
                excess = float(np.max(traj[:, i, j, m] - curve))
                worst_excess = max(worst_excess, excess)
                results.append(
                    {
                        "eta": float(eg[i, j, m]),
                        "C": float(cg[i, j, m]),
                        "h0": float(hg[i, j, m]),
                        "k": rc.k,
                        "M": rc.M_rate,
                        "max_excess": excess,
                    }
                )
    manifest = {
        "suite": "bounds_grid",
        "steps": steps,
        "grid_size": len(results),
        "worst_excess": worst_excess,
        "pass": bool(worst_excess < 1e-12),
        "results": results,
    }
    _write_manifest(out_dir, manifest)
    return manifest


# ---------------------------------------------------------------------------
# verification battery
# ---------------------------------------------------------------------------


def catalog_sets() -> list[tuple[str, FeasibleSet]]:
    return [
        ("lp_1.5_r1", LpBall(p=1.5, radius=1.0, dim=8)),
        ("lp_2_r1", LpBall(p=2.0, radius=1.0, dim=8)),
        ("lp_3_r1", LpBall(p=3.0, radius=1.0, dim=8)),
        ("lp_3_r5", LpBall(p=3.0, radius=5.0, dim=8)),
        ("lp_5_r1", LpBall(p=5.0, radius=1.0, dim=8)),
        ("schatten_2.5", SchattenBall(p=2.5, rows=3, cols=3, radius=1.0)),
        ("levelset_sqnorm_w4", sqnorm_level_set(w=4.0, dim=6)),
    ]


def _ball_quadratic(feasible: FeasibleSet) -> QuadraticObjective:
    dim = feasible.dim
    scale = 3.0 * getattr(feasible, "radius", 1.0)
    x0 = np.ones(dim) * (scale / np.sqrt(dim))
    return QuadraticObjective(A=np.ones(dim), x0=x0)


def run_verify_all(out_dir, seed: int = 0, n_pairs: int = 1000, n_directions: int = 50) -> dict:
    """Every positive check on the catalog plus the four negative controls
    (which must fail)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = vf.SamplerConfig(n_pairs=n_pairs, n_directions=n_directions, seed=seed)
    positives: list[vf.CheckReport] = []
    negatives: list[vf.CheckReport] = []

    for name, feasible in catalog_sets():
        rep = vf.check_definition1(feasible, feasible.uc_params(), cfg)
        rep.config["set"] = name
        positives.append(rep)

    for name, feasible in catalog_sets():
        if not isinstance(feasible, LpBall):
            continue
        f = _ball_quadratic(feasible)
        rep = vf.check_lemma1(feasible, feasible.uc_params(), f, cfg)
        rep.config["set"] = name
        positives.append(rep)

    # local scaling + distance control on a curved-optimum l3 problem
    ball3 = LpBall(p=3.0, radius=1.0, dim=8)
    f3 = _ball_quadratic(ball3)
    f3.grad_floor = grad_floor_quadratic(f3, ball3)
    x_init = x_init_for(ball3, seed)
    x_star, f_star = reference_optimum(ball3, f3, x_init, 50_000, stop_gap=1e-13)
    uc3 = ball3.uc_params()
    rep = vf.check_local_scaling(ball3, f3, x_star, uc3.alpha, uc3.q, cfg)
    rep.config["set"] = "lp_3_r1"
    positives.append(rep)

    trace3 = run_fw(ball3, f3, x_init, StepRule.short(), 2000, x_star=x_star, f_star=f_star)
    consts3 = problem_constants(ball3, f3)
    rep = vf.check_lemma3(trace3, consts3["c"], consts3["alpha"], consts3["q"], consts3["L"])
    rep.config["set"] = "lp_3_r1"
    positives.append(rep)

    # negative controls: each check with a configuration known to violate it
    neg_cfg = vf.SamplerConfig(n_pairs=n_pairs, n_directions=n_directions, seed=seed, boundary_bias=1.0)
    inflated = UCParams(alpha=2.0, q=3.0, norm_tag="lp:3.0")
    rep = vf.check_definition1(LpBall(p=3.0, radius=1.0, dim=8), inflated, neg_cfg)
    rep.config["control"] = "inflated_alpha_l3"
    negatives.append(rep)

    diamond = L1Ball(radius=1.0, dim=2)
    f_flat = QuadraticObjective(A=np.ones(2), x0=np.array([2.0, 2.0]))
    fake_uc = UCParams(alpha=0.1, q=2.0, norm_tag="l1")
    rep = vf.check_lemma1(diamond, fake_uc, f_flat, neg_cfg)
    rep.config["control"] = "l1_flat_face_lemma1"
    negatives.append(rep)

    xs_flat, fs_flat = reference_optimum(diamond, f_flat, np.array([1.0, 0.0]), 50_000)
    rep = vf.check_local_scaling(diamond, f_flat, xs_flat, 0.5, 2.0, neg_cfg)
    rep.config["control"] = "l1_flat_face_local_scaling"
    negatives.append(rep)

    trace_flat = run_fw(
        diamond, f_flat, np.array([1.0, 0.0]), StepRule.short(), 1500,
        x_star=xs_flat, f_star=fs_flat,
    )
    rep = vf.check_lemma3(trace_flat, c=1.0, alpha=0.25, q=2.0, L=1.0)
    rep.config["control"] = "l1_flat_face_lemma3"
    negatives.append(rep)

    report = {
        "suite": "verify_all",
        "positive": [json.loads(r.to_json()) for r in positives],
        "negative": [json.loads(r.to_json()) for r in negatives],
        "pass": bool(
            all(r.passed for r in positives) and all(not r.passed for r in negatives)
        ),
    }
    with open(out_dir / "verify_report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out_dir, {"suite": "verify_all", "files": ["verify_report.json"], "pass": report["pass"]})
    return report


def run_suite(tag: str, out_dir, seed: int = 0) -> dict:
    if tag == "fig2":
        return run_fig2(out_dir, seed=seed)
    if tag == "online":
        return run_online_suite(out_dir, seed=seed)
    if tag == "verify_all":
        return run_verify_all(out_dir, seed=seed)
    if tag == "bounds_grid":
        return run_bounds_grid(out_dir)
    raise ConfigError(f"unknown suite tag {tag!r}")


def run_online_config(config: dict, out_dir) -> dict:
    """`online --config` entry: one FTL run from JSON descriptors."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        feasible = set_from_json(config["set"])
        stream = stream_from_json(config["stream"])
        T = int(config.get("T", 1000))
    except KeyError as exc:
        raise ConfigError(f"online config missing field {exc}") from exc
    trace = run_ftl(feasible, stream, T)
    uc = feasible.uc
    bound = None
    if uc is not None and not trace.degenerate:
        bound = trace.bound_curve(uc.alpha, uc.q)
    trace.to_csv(out_dir / "online.csv", bound=bound)
    manifest = {
        "files": ["online.csv"],
        "final_regret": float(trace.regret[-1]),
        "L_T": trace.L_T,
        "M_loss": trace.M_loss,
        "degenerate": trace.degenerate,
    }
    if bound is not None:
        manifest["regret_ok"] = bool(np.all(trace.regret <= bound + 1e-9))
    _write_manifest(out_dir, manifest)
    return manifest


def _cfg_to_dict(cfg: ExperimentConfig) -> dict:
    return {
        "dim": cfg.dim,
        "cond": cfg.cond,
        "radius": cfg.radius,
        "p_grid": list(cfg.p_grid),
        "step_rules": list(cfg.step_rules),
        "horizon": cfg.horizon,
        "seed": cfg.seed,
        "optimum_location": cfg.optimum_location,
        "x0_scale_factor": cfg.x0_scale_factor,
        "reference_multiplier": cfg.reference_multiplier,
    }


def _write_manifest(out_dir: Path, manifest: dict) -> None:
    # written last so a complete manifest implies a complete bundle
    with open(Path(out_dir) / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
