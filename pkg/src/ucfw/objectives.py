"""Smooth convex objectives and the structural descriptors the rate
theorems consume: smoothness L, a gradient-norm floor c, strong convexity,
and Hoelderian error-bound parameters.

All smoothness constants are declared with respect to the Euclidean norm
and converted to a set's lp norm pair with the exact dimension-dependent
norm-equivalence exponents when the bound engine asks for them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, InvalidParams
from .geometry import FeasibleSet, L1Ball, LpBall, dual_exponent

__all__ = [
    "HEBDescriptor",
    "SmoothObjective",
    "QuadraticObjective",
    "heb_from_uniform_convexity",
    "grad_floor_quadratic",
    "lp_smoothness_from_l2",
    "dual_floor_factor",
    "objective_from_json",
]


@dataclass(frozen=True)
class HEBDescriptor:
    """||x - x*|| <= mu_heb * (f(x) - f(x*))^theta with theta in (0, 1/2]."""

    mu_heb: float
    theta: float

    def __post_init__(self) -> None:
        if not self.mu_heb > 0.0:
            raise InvalidParams(f"mu_heb must be positive, got {self.mu_heb}")
        if not 0.0 < self.theta <= 0.5:
            raise InvalidParams(f"theta must be in (0, 1/2], got {self.theta}")


def heb_from_uniform_convexity(mu_f: float, r: float) -> HEBDescriptor:
    """A (mu_f, r)-uniformly convex function satisfies a
    ((2/mu_f)^(1/r), 1/r) Hoelderian error bound."""
    if mu_f <= 0.0 or r < 2.0:
        raise InvalidParams("requires mu_f > 0 and r >= 2")
    return HEBDescriptor(mu_heb=(2.0 / mu_f) ** (1.0 / r), theta=1.0 / r)


class SmoothObjective:
    """Value/gradient oracle with an L2 smoothness constant and optional
    strong-convexity / HEB / gradient-floor descriptors.

    Immutable and pure; safe for concurrent evaluation.
    """

    L: float
    mu_sc: Optional[float] = None
    heb: Optional[HEBDescriptor] = None
    grad_floor: Optional[float] = None

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError


class QuadraticObjective(SmoothObjective):
    """f(x) = 1/2 (x - x0)^T A (x - x0) with symmetric positive definite A.

    ``A`` may be given as a 1-D array (diagonal) or a full matrix; ``x0`` is
    the unconstrained minimizer.
    """

    def __init__(self, A: np.ndarray, x0: np.ndarray):
        A = np.asarray(A, dtype=float)
        self.x0 = np.asarray(x0, dtype=float)
        self.diagonal = A.ndim == 1
        if self.diagonal:
            if np.any(A <= 0.0):
                raise InvalidParams("diagonal of A must be positive")
            self._eigs = np.sort(A)
        else:
            if A.shape[0] != A.shape[1] or not np.allclose(A, A.T):
                raise InvalidParams("A must be square symmetric")
            self._eigs = np.sort(np.linalg.eigvalsh(A))
            if self._eigs[0] <= 0.0:
                raise InvalidParams("A must be positive definite")
        self.A = A
        self.L = float(self._eigs[-1])
        self.mu_sc = float(self._eigs[0])
        self.heb = heb_from_uniform_convexity(self.mu_sc, 2.0)
        self.grad_floor = None

    @property
    def lambda_min(self) -> float:
        return float(self._eigs[0])

    @property
    def condition_number(self) -> float:
        return float(self._eigs[-1] / self._eigs[0])

    def _apply(self, d: np.ndarray) -> np.ndarray:
        return self.A * d if self.diagonal else self.A @ d

    def value(self, x: np.ndarray) -> float:
        d = np.asarray(x, dtype=float) - self.x0
        return 0.5 * float(np.dot(d, self._apply(d)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self._apply(np.asarray(x, dtype=float) - self.x0)

    def curvature_along(self, d: np.ndarray) -> float:
        """d^T A d, used by the analytic exact line search."""
        return float(np.dot(d, self._apply(d)))

    def descriptor(self) -> dict:
        return {
            "family": "quadratic",
            "dim": int(self.x0.shape[0]),
            "cond": self.condition_number,
            "diagonal": bool(self.diagonal),
        }


# ---------------------------------------------------------------------------
# norm conversions (L2 declarations -> lp norm pairs)
# ---------------------------------------------------------------------------


def _exponent_gap(a: float, b: float) -> float:
    """max(0, 1/a - 1/b) with the convention 1/inf = 0."""
    ia = 0.0 if np.isinf(a) else 1.0 / a
    ib = 0.0 if np.isinf(b) else 1.0 / b
    return max(0.0, ia - ib)


def lp_smoothness_from_l2(L2: float, d: int, p: float) -> float:
    """Valid smoothness constant w.r.t. (||.||_p, ||.||_{p*}) given the
    Euclidean one: L_p = L2 * d^{max(0,1/p*-1/2) + max(0,1/2-1/p)}."""
    pstar = dual_exponent(p)
    return L2 * d ** (_exponent_gap(pstar, 2.0) + _exponent_gap(2.0, p))


def dual_floor_factor(d: int, p: float) -> float:
    """Lower-bound factor: ||g||_{p*} >= factor * ||g||_2."""
    pstar = dual_exponent(p)
    return d ** (-_exponent_gap(2.0, pstar))


def grad_floor_quadratic(f: QuadraticObjective, feasible: FeasibleSet) -> float:
    """Analytic lower bound on inf_{x in C} ||grad f(x)||_* for an
    origin-centered lp-norm ball.

    ||grad f(x)||_2 >= lambda_min(A) ||x - x0||_2 >= lambda_min * dist_2(x0, C),
    then converted to the dual lp norm.  Returns 0 when x0 may be feasible.
    """
    if isinstance(feasible, LpBall):
        p = feasible.p
    elif isinstance(feasible, L1Ball):
        p = 1.0
    else:
        raise InvalidParams("grad_floor_quadratic expects an lp-norm ball")
    r = feasible.radius
    d = feasible.dim
    # the lp ball lies inside the l2 ball of radius r * d^{max(0, 1/2 - 1/p)}
    enclosing = r * d ** _exponent_gap(2.0, p)
    dist = max(0.0, float(np.linalg.norm(f.x0)) - enclosing)
    return f.lambda_min * dist * dual_floor_factor(d, p)


# ---------------------------------------------------------------------------
# JSON construction
# ---------------------------------------------------------------------------

_A_SHUFFLE_SEED = 20230517  # fixed: descriptors must rebuild identical objectives


def quadratic_from_descriptor(
    dim: int, cond: float, x0_direction, x0_scale: float
) -> QuadraticObjective:
    """Diagonal quadratic with eigenvalues logspace(1, cond) under a fixed
    seeded shuffle; x0 sits at distance x0_scale along the given direction.

    ``x0_direction`` is either "ones", "e1", or an explicit vector.
    """
    if dim < 1 or cond < 1.0 or x0_scale <= 0.0:
        raise ConfigError("need dim >= 1, cond >= 1, x0_scale > 0")
    diag = np.logspace(0.0, np.log10(cond), dim)
    rng = np.random.default_rng(_A_SHUFFLE_SEED)
    rng.shuffle(diag)
    if isinstance(x0_direction, str):
        if x0_direction == "ones":
            direction = np.ones(dim)
        elif x0_direction == "e1":
            direction = np.zeros(dim)
            direction[0] = 1.0
        else:
            raise ConfigError(f"unknown x0_direction {x0_direction!r}")
    else:
        direction = np.asarray(x0_direction, dtype=float)
        if direction.shape != (dim,) or not np.any(direction):
            raise ConfigError("explicit x0_direction must be a nonzero dim-vector")
    x0 = direction * (x0_scale / np.linalg.norm(direction))
    return QuadraticObjective(A=diag, x0=x0)


def objective_from_json(desc: dict) -> QuadraticObjective:
    try:
        if desc["family"] != "quadratic":
            raise ConfigError(f"unknown objective family {desc.get('family')!r}")
        return quadratic_from_descriptor(
            dim=int(desc["dim"]),
            cond=float(desc["cond"]),
            x0_direction=desc["x0_direction"],
            x0_scale=float(desc["x0_scale"]),
        )
    except KeyError as exc:
        raise ConfigError(f"objective descriptor missing field {exc}") from exc
