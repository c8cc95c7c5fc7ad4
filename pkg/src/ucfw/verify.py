"""Sampling-based verification of the geometric inequalities behind the
rate theorems: uniform-convexity membership, the global and local scaling
inequalities, and the iterate-to-vertex distance control.

Checks are report-only and deterministic given (seed, config); reducers use
max/min only, so evaluation order cannot change a report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidParams, StaleOptimum
from .geometry import FeasibleSet, UCParams
from .objectives import SmoothObjective

__all__ = [
    "SamplerConfig",
    "CheckReport",
    "sample_feasible",
    "check_definition1",
    "check_lemma1",
    "check_local_scaling",
    "check_lemma3",
    "estimate_local_alpha",
]


@dataclass(frozen=True)
class SamplerConfig:
    n_pairs: int = 1000
    n_directions: int = 50
    seed: int = 0
    tol: float = 1e-9
    boundary_bias: float = 0.5

    def __post_init__(self) -> None:
        if self.n_pairs < 1 or self.n_directions < 1:
            raise InvalidParams("sample counts must be positive")
        if self.tol < 0.0 or not 0.0 <= self.boundary_bias <= 1.0:
            raise InvalidParams("tol must be >= 0 and boundary_bias in [0, 1]")


@dataclass
class CheckReport:
    check: str
    passed: bool
    worst_violation: float
    witness: Optional[dict] = None
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "check": self.check,
            "pass": self.passed,
            "worst_violation": self.worst_violation,
            "witness": self.witness,
            "config": self.config,
        }
        return json.dumps(payload, sort_keys=True)


def sample_feasible(
    feasible: FeasibleSet, n: int, rng: np.random.Generator, boundary_bias: float = 0.5
) -> np.ndarray:
    """n feasible points as flattened (n, dim) rows.

    Directions come from a spherically symmetric source and are scaled to
    the exact boundary; a (1 - boundary_bias) fraction is pulled inward by a
    random radial factor.  Violations of the curvature inequalities
    concentrate near the boundary, so interior-heavy sampling would be
    uninformative.
    """
    dim = feasible.dim
    out = np.empty((n, dim))
    n_boundary = int(round(boundary_bias * n))
    dirs = rng.standard_normal((n, dim))
    shrink = rng.random(n) ** (1.0 / max(dim, 1))
    for i in range(n):
        pt = feasible.boundary_point(dirs[i].reshape(_point_shape(feasible)))
        pt = np.asarray(pt, dtype=float).ravel()
        if i >= n_boundary:
            pt = pt * shrink[i]
        out[i] = pt
    return out


def _point_shape(feasible: FeasibleSet):
    rows = getattr(feasible, "rows", None)
    if rows is not None:
        return (feasible.rows, feasible.cols)
    return (feasible.dim,)


def _as_point(feasible: FeasibleSet, flat: np.ndarray) -> np.ndarray:
    return np.asarray(flat, dtype=float).reshape(_point_shape(feasible))


def check_definition1(
    feasible: FeasibleSet, uc: UCParams, cfg: SamplerConfig
) -> CheckReport:
    """Membership test of the uniform-convexity definition.

    For sampled feasible pairs (x, y), a grid of interpolation weights, and
    sampled unit perturbations z, the point
    ``eta x + (1-eta) y + eta (1-eta) alpha ||x-y||^q z``
    must stay in the set.  ``worst_violation`` is the largest membership
    excess observed.
    """
    rng = np.random.default_rng(cfg.seed)
    X = sample_feasible(feasible, cfg.n_pairs, rng, cfg.boundary_bias)
    Y = sample_feasible(feasible, cfg.n_pairs, rng, cfg.boundary_bias)
    Z = rng.standard_normal((cfg.n_directions, feasible.dim))
    Z /= feasible.batch_norm(Z)[:, None]
    etas = np.linspace(0.0, 1.0, 11)

    dist = feasible.batch_norm(X - Y)  # (n,)
    radial = (etas[:, None] * (1.0 - etas[:, None])) * uc.alpha * dist[None, :] ** uc.q
    combo = etas[:, None, None] * X[None, :, :] + (1.0 - etas[:, None, None]) * Y[None, :, :]
    points = combo[:, :, None, :] + radial[:, :, None, None] * Z[None, None, :, :]
    excess = feasible.batch_membership_excess(points)  # (11, n, m)

    worst = float(excess.max())
    witness = None
    if worst > cfg.tol:
        ie, ip, iz = np.unravel_index(int(np.argmax(excess)), excess.shape)
        witness = {
            "eta": float(etas[ie]),
            "pair_index": int(ip),
            "direction_index": int(iz),
            "chord_length": float(dist[ip]),
            "excess": worst,
        }
    return CheckReport(
        check="definition1",
        passed=worst <= cfg.tol,
        worst_violation=max(worst, 0.0),
        witness=witness,
        config={"alpha": uc.alpha, "q": uc.q, **_cfg_dict(cfg)},
    )


def check_lemma1(
    feasible: FeasibleSet, uc: UCParams, f: SmoothObjective, cfg: SamplerConfig
) -> CheckReport:
    """Global scaling inequality at sampled feasible points:
    <-grad f(x), v - x> >= (alpha/2) ||v - x||^q ||grad f(x)||_* with
    v = lmo(-grad f(x))."""
    rng = np.random.default_rng(cfg.seed)
    X = sample_feasible(feasible, cfg.n_pairs, rng, cfg.boundary_bias)
    worst = -np.inf
    witness = None
    for i in range(cfg.n_pairs):
        x = _as_point(feasible, X[i])
        g = f.gradient(X[i]).reshape(x.shape)
        if not np.any(g):
            continue
        v = feasible.lmo(-g)
        lhs = float(np.vdot(-g, v - x))
        rhs = 0.5 * uc.alpha * feasible.norm(v - x) ** uc.q * feasible.dual_norm(g)
        gap = rhs - lhs
        if gap > worst:
            worst = gap
            witness = {"sample_index": i, "lhs": lhs, "rhs": rhs}
    return CheckReport(
        check="lemma1_global_scaling",
        passed=worst <= cfg.tol,
        worst_violation=max(worst, 0.0),
        witness=witness if worst > cfg.tol else None,
        config={"alpha": uc.alpha, "q": uc.q, **_cfg_dict(cfg)},
    )


def check_local_scaling(
    feasible: FeasibleSet,
    f: SmoothObjective,
    x_star: np.ndarray,
    alpha: float,
    q: float,
    cfg: SamplerConfig,
) -> CheckReport:
    """Local scaling inequality at a reference optimum:
    <-grad f(x*), x* - x> >= (alpha/2) ||grad f(x*)||_* ||x* - x||^q."""
    x_star = np.asarray(x_star, dtype=float)
    g_star = f.gradient(x_star.ravel()).reshape(x_star.shape)
    gnorm = feasible.dual_norm(g_star)
    if gnorm <= 1e-10 and (f.grad_floor or 0.0) > 0.0:
        raise StaleOptimum(
            f"||grad f(x*)||_* = {gnorm:g} although a gradient floor "
            f"{f.grad_floor:g} was declared"
        )
    rng = np.random.default_rng(cfg.seed)
    X = sample_feasible(feasible, cfg.n_pairs, rng, cfg.boundary_bias)
    worst = -np.inf
    witness = None
    for i in range(cfg.n_pairs):
        x = _as_point(feasible, X[i])
        lhs = float(np.vdot(-g_star, x_star - x))
        rhs = 0.5 * alpha * gnorm * feasible.norm(x_star - x) ** q
        gap = rhs - lhs
        if gap > worst:
            worst = gap
            witness = {"sample_index": i, "lhs": lhs, "rhs": rhs}
    return CheckReport(
        check="local_scaling",
        passed=worst <= cfg.tol,
        worst_violation=max(worst, 0.0),
        witness=witness if worst > cfg.tol else None,
        config={"alpha": alpha, "q": q, **_cfg_dict(cfg)},
    )


def check_lemma3(trace, c: float, alpha: float, q: float, L: float, tol: float = 1e-9) -> CheckReport:
    """Iterate-to-vertex distance control past the burn-in:
    once h_t <= 1, ||x_t - v_t|| <= H h_t^(1/(q(q-1)))."""
    from .bounds import lemma3_distance_constant

    if not trace.has_primal_gaps:
        raise InvalidParams("trace has no primal gaps")
    H = lemma3_distance_constant(c, alpha, q, L)
    past = np.flatnonzero(trace.primal_gap <= 1.0)
    if len(past) == 0:
        return CheckReport(
            check="lemma3_distance",
            passed=True,
            worst_violation=0.0,
            config={"c": c, "alpha": alpha, "q": q, "L": L, "H": H, "note": "burn-in never completed"},
        )
    start = int(past[0])
    h = trace.primal_gap[start:]
    d = trace.dist_to_vertex[start:]
    rhs = H * h ** (1.0 / (q * (q - 1.0)))
    gap = d - rhs
    worst = float(gap.max())
    witness = None
    if worst > tol:
        i = int(np.argmax(gap))
        witness = {"t": int(trace.t[start + i]), "dist": float(d[i]), "allowed": float(rhs[i])}
    return CheckReport(
        check="lemma3_distance",
        passed=worst <= tol,
        worst_violation=max(worst, 0.0),
        witness=witness,
        config={"c": c, "alpha": alpha, "q": q, "L": L, "H": H, "burn_in": start},
    )


def estimate_local_alpha(
    feasible: FeasibleSet,
    f: SmoothObjective,
    x_star: np.ndarray,
    q: float,
    cfg: SamplerConfig,
    alpha_hi: float = 16.0,
    resolution: float = 1e-4,
) -> float:
    """Largest alpha for which the local scaling inequality survives the
    sampler, by bisection; an empirical curvature gauge, never asserted
    against a catalog value."""
    x_star = np.asarray(x_star, dtype=float)
    g_star = f.gradient(x_star.ravel()).reshape(x_star.shape)
    gnorm = feasible.dual_norm(g_star)
    rng = np.random.default_rng(cfg.seed)
    X = sample_feasible(feasible, cfg.n_pairs, rng, cfg.boundary_bias)
    lhs = np.array([float(np.vdot(-g_star, x_star - _as_point(feasible, X[i]))) for i in range(cfg.n_pairs)])
    dpow = np.array([feasible.norm(x_star - _as_point(feasible, X[i])) ** q for i in range(cfg.n_pairs)])

    def holds(alpha: float) -> bool:
        return bool(np.all(lhs + cfg.tol >= 0.5 * alpha * gnorm * dpow))

    lo, hi = 0.0, alpha_hi
    if holds(hi):
        return hi
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _cfg_dict(cfg: SamplerConfig) -> dict:
    return {
        "n_pairs": cfg.n_pairs,
        "n_directions": cfg.n_directions,
        "seed": cfg.seed,
        "tol": cfg.tol,
        "boundary_bias": cfg.boundary_bias,
    }
