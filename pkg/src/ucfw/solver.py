"""The Frank-Wolfe loop with pluggable step-size strategies and full
per-iteration tracing.

One run is sequential; traces are value-semantic, so independent runs can
execute concurrently without shared state.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InfeasibleStart, UCFWError, ZeroDirection
from .geometry import FeasibleSet
from .objectives import QuadraticObjective, SmoothObjective

__all__ = [
    "StepRule",
    "RunTrace",
    "short_step",
    "exact_line_search",
    "run_fw",
    "reference_optimum",
]

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class StepRule:
    """Step-size strategy.

    ``deterministic`` uses the schedule 1/(t+1) (the classic 2/(t+2) is
    available behind ``classic_schedule``), ``short`` the closed-form short
    step, ``exact`` exact line search.
    """

    tag: str  # "deterministic" | "short" | "exact"
    classic_schedule: bool = False

    def __post_init__(self) -> None:
        if self.tag not in ("deterministic", "short", "exact"):
            raise ValueError(f"unknown step rule {self.tag!r}")

    @staticmethod
    def deterministic(classic: bool = False) -> "StepRule":
        return StepRule("deterministic", classic_schedule=classic)

    @staticmethod
    def short() -> "StepRule":
        return StepRule("short")

    @staticmethod
    def exact() -> "StepRule":
        return StepRule("exact")


def short_step(fw_gap: float, L: float, d_sq: float) -> float:
    """gamma = min{1, g / (L ||x - v||^2)}, the minimizer of the smoothness
    upper bound over [0, 1]."""
    if fw_gap <= 0.0:
        return 0.0
    denom = L * d_sq
    if denom <= 0.0:
        # degenerate: positive gap with a (numerically) zero direction
        return 1.0
    return min(1.0, fw_gap / denom)


def exact_line_search(f: SmoothObjective, x: np.ndarray, d: np.ndarray) -> float:
    """argmin_{gamma in [0,1]} f(x + gamma d).

    Analytic for quadratics; golden-section/Brent on [0, 1] to width 1e-10
    otherwise.
    """
    if not np.any(d):
        return 0.0
    if isinstance(f, QuadraticObjective):
        curv = f.curvature_along(d)
        slope = -float(np.dot(f.gradient(x), d))
        if curv <= 0.0:
            return 1.0 if slope > 0.0 else 0.0
        return float(np.clip(slope / curv, 0.0, 1.0))
    res = minimize_scalar(
        lambda g: f.value(x + g * d), bounds=(0.0, 1.0), method="bounded",
        options={"xatol": 1e-10},
    )
    return float(np.clip(res.x, 0.0, 1.0))


@dataclass
class RunTrace:
    """Per-iteration record of a Frank-Wolfe run.

    ``primal_gap`` is NaN when no reference optimum was supplied.
    ``dist_to_vertex`` and ``grad_dual_norm`` are measured in the set's norm
    pair; the short step itself uses Euclidean quantities, matching the L2
    declaration of the smoothness constant.
    """

    t: np.ndarray
    gamma: np.ndarray
    fw_gap: np.ndarray
    primal_gap: np.ndarray
    dist_to_vertex: np.ndarray
    grad_dual_norm: np.ndarray
    iterates: np.ndarray
    vertices: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def min_fw_gap(self) -> np.ndarray:
        return np.minimum.accumulate(self.fw_gap)

    @property
    def has_primal_gaps(self) -> bool:
        return bool(np.all(np.isfinite(self.primal_gap)))

    def to_csv(self, path, extra_columns: Optional[dict] = None) -> None:
        """Write the canonical CSV; float cells use repr for byte stability."""
        extra = extra_columns or {}
        header = [
            "t", "gamma", "fw_gap", "min_fw_gap", "primal_gap",
            "dist_to_vertex", "grad_dual_norm", *extra.keys(),
        ]
        min_gap = self.min_fw_gap
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for i in range(len(self)):
                row = [
                    int(self.t[i]), repr(float(self.gamma[i])),
                    repr(float(self.fw_gap[i])), repr(float(min_gap[i])),
                    repr(float(self.primal_gap[i])),
                    repr(float(self.dist_to_vertex[i])),
                    repr(float(self.grad_dual_norm[i])),
                ]
                row.extend(repr(float(col[i])) for col in extra.values())
                writer.writerow(row)

    def write_sidecar(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")


def run_fw(
    feasible: FeasibleSet,
    f: SmoothObjective,
    x_init: np.ndarray,
    rule: StepRule,
    T: int,
    stop_gap: float = 1e-12,
    x_star: Optional[np.ndarray] = None,
    f_star: Optional[float] = None,
) -> RunTrace:
    """Run the Frank-Wolfe loop: LMO, step size, convex update.

    Stops after T iterations or as soon as the Frank-Wolfe gap drops to
    ``stop_gap``.  When ``x_star``/``f_star`` are given the trace carries
    primal gaps.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    x = np.array(x_init, dtype=float)
    if feasible.membership_excess(x) > FEASIBILITY_TOL:
        raise InfeasibleStart(f"x_init violates membership by {feasible.membership_excess(x):g}")
    if f_star is None and x_star is not None:
        f_star = f.value(x_star)

    ts, gammas, gaps, primals, dists, gnorms = [], [], [], [], [], []
    xs, vs = [], []
    for t in range(T + 1):
        g = f.gradient(x)
        try:
            v = feasible.lmo(-g)
            fw_gap = float(np.dot(g, x - v))
        except ZeroDirection:
            v = x.copy()
            fw_gap = 0.0
        # LMO optimality makes the gap non-negative; clip roundoff only
        fw_gap = max(fw_gap, 0.0)
        d = v - x
        ts.append(t)
        gaps.append(fw_gap)
        primals.append(f.value(x) - f_star if f_star is not None else np.nan)
        dists.append(feasible.norm(d))
        gnorms.append(feasible.dual_norm(g))
        xs.append(x.copy())
        vs.append(v.copy())

        if fw_gap <= stop_gap or t == T:
            gammas.append(0.0)
            break

        if rule.tag == "deterministic":
            gamma = 2.0 / (t + 2.0) if rule.classic_schedule else 1.0 / (t + 1.0)
        elif rule.tag == "short":
            gamma = short_step(fw_gap, f.L, float(np.dot(d, d)))
        else:
            gamma = exact_line_search(f, x, d)
        gammas.append(gamma)
        x = (1.0 - gamma) * x + gamma * v
        if feasible.membership_excess(x) > FEASIBILITY_TOL:
            raise UCFWError("iterate left the feasible set; numerical breakdown")

    trace = RunTrace(
        t=np.array(ts, dtype=int),
        gamma=np.array(gammas, dtype=float),
        fw_gap=np.array(gaps, dtype=float),
        primal_gap=np.array(primals, dtype=float),
        dist_to_vertex=np.array(dists, dtype=float),
        grad_dual_norm=np.array(gnorms, dtype=float),
        iterates=np.array(xs, dtype=float),
        vertices=np.array(vs, dtype=float),
        metadata={
            "set": feasible.descriptor(),
            "objective": f.descriptor(),
            "step_rule": rule.tag,
            "classic_schedule": rule.classic_schedule,
            "horizon": T,
            "stop_gap": stop_gap,
            "stopped_at": int(ts[-1]),
            "f_star": f_star,
        },
    )
    return trace


def reference_optimum(
    feasible: FeasibleSet,
    f: SmoothObjective,
    x_init: np.ndarray,
    horizon: int,
    stop_gap: float = 0.0,
) -> tuple[np.ndarray, float]:
    """High-accuracy solution: Frank-Wolfe with exact line search for an
    extended horizon, returning the best iterate seen.

    The experiment driver calls this with 50x the plotted horizon.
    """
    x = np.array(x_init, dtype=float)
    best_x, best_f = x.copy(), f.value(x)
    for _ in range(horizon):
        g = f.gradient(x)
        try:
            v = feasible.lmo(-g)
        except ZeroDirection:
            break
        d = v - x
        fw_gap = float(np.dot(g, -d))
        if fw_gap <= stop_gap:
            break
        gamma = exact_line_search(f, x, d)
        if gamma <= 0.0:
            break
        x = (1.0 - gamma) * x + gamma * v
        fx = f.value(x)
        if fx < best_f:
            best_f, best_x = fx, x.copy()
    return best_x, best_f
