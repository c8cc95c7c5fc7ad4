"""Feasible sets: closed-form linear minimization oracles, membership
oracles, and the catalog of (alpha, q) uniform-convexity parameters.

Conventions
-----------
* ``lmo(phi)`` maximizes ``<phi, v>`` over the set.  A zero ``phi`` raises
  :class:`~ucfw.errors.ZeroDirection`; callers that reached a zero gradient
  interpret it as optimality.
* ``sign(0) = +1`` in every component formula, so oracles are deterministic.
* Ties on flat faces (l1 ball) break to the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidParams, NotUniformlyConvex, SVDFailure, ZeroDirection

__all__ = [
    "UCParams",
    "FeasibleSet",
    "LpBall",
    "L1Ball",
    "SchattenBall",
    "LevelSet",
    "lmo_lp",
    "lmo_l1",
    "lmo_schatten",
    "lp_norm",
    "dual_exponent",
    "lp_ball_uc_params",
    "levelset_uc_params",
    "set_from_json",
]


def _sign(x: np.ndarray) -> np.ndarray:
    # sign(0) = +1, unlike np.sign
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


def dual_exponent(p: float) -> float:
    """Hoelder conjugate p* with 1/p + 1/p* = 1 (p=1 -> inf, p=inf -> 1)."""
    if p == 1.0:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


def lp_norm(x: np.ndarray, p: float) -> float:
    x = np.asarray(x, dtype=float).ravel()
    if np.isinf(p):
        return float(np.max(np.abs(x))) if x.size else 0.0
    if p == 1.0:
        return float(np.sum(np.abs(x)))
    if p == 2.0:
        return float(np.linalg.norm(x))
    a = np.abs(x)
    m = a.max(initial=0.0)
    if m == 0.0:
        return 0.0
    # scale out the max to keep a**p in range for extreme p
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def _batch_lp_norm(X: np.ndarray, p: float) -> np.ndarray:
    """lp norms along the last axis of a stacked array."""
    X = np.asarray(X, dtype=float)
    a = np.abs(X)
    if np.isinf(p):
        return a.max(axis=-1)
    if p == 1.0:
        return a.sum(axis=-1)
    if p == 2.0:
        return np.sqrt((a * a).sum(axis=-1))
    m = a.max(axis=-1, keepdims=True)
    m_safe = np.where(m == 0.0, 1.0, m)
    s = ((a / m_safe) ** p).sum(axis=-1)
    return (m[..., 0]) * s ** (1.0 / p)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def lmo_lp(p: float, r: float, phi: np.ndarray) -> np.ndarray:
    """Maximize ``<phi, v>`` over the lp ball of radius ``r`` (p > 1).

    Closed form from Hoelder equality:
    ``v_i = r sign(phi_i) |phi_i|^(p*-1) / ||phi||_{p*}^(p*-1)``, which
    attains ``<phi, v> = r ||phi||_{p*}``.
    """
    if p <= 1.0:
        raise InvalidParams(f"lmo_lp requires p > 1, got {p}")
    phi = np.asarray(phi, dtype=float)
    a = np.abs(phi)
    m = a.max(initial=0.0)
    if m == 0.0:
        raise ZeroDirection("lmo_lp called with phi = 0")
    pstar = dual_exponent(p)
    # the formula is scale-invariant in phi; normalizing by the max entry
    # keeps the exponentials in range for extreme p
    w = (a / m) ** (pstar - 1.0)
    denom = float(np.sum(w**p) ** (1.0 / p))
    return (r / denom) * _sign(phi) * w


def lmo_l1(r: float, phi: np.ndarray) -> np.ndarray:
    """Maximize ``<phi, v>`` over the l1 ball: a signed scaled basis vector.

    Ties on ``|phi_i|`` break to the lowest index.
    """
    phi = np.asarray(phi, dtype=float)
    a = np.abs(phi)
    if a.max(initial=0.0) == 0.0:
        raise ZeroDirection("lmo_l1 called with phi = 0")
    i = int(np.argmax(a))  # argmax returns the first maximizer
    v = np.zeros_like(phi)
    v[i] = r * _sign(phi[i])
    return v


def lmo_schatten(p: float, r: float, G: np.ndarray) -> np.ndarray:
    """Maximize ``<G, V>`` (trace inner product) over the Schatten-p ball.

    Reduces to the vector oracle on the singular values: with
    ``G = U diag(sigma) V^T``, the maximizer is ``U diag(s) V^T`` where
    ``s = lmo_lp(p, r, sigma)``.
    """
    G = np.asarray(G, dtype=float)
    if not np.any(G):
        raise ZeroDirection("lmo_schatten called with G = 0")
    try:
        U, sigma, Vt = np.linalg.svd(G, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails
        raise SVDFailure(str(exc)) from exc
    s = lmo_lp(p, r, sigma)
    return (U * s) @ Vt


# ---------------------------------------------------------------------------
# uniform-convexity catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UCParams:
    """(alpha, q) uniform-convexity parameters, stated against ``norm_tag``."""

    alpha: float
    q: float
    norm_tag: str

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise InvalidParams(f"alpha must be positive, got {self.alpha}")
        if not self.q >= 2.0:
            raise InvalidParams(f"q must be >= 2, got {self.q}")


def lp_ball_uc_params(p: float, r: float, norm_tag: str) -> UCParams:
    """Catalog entry for lp / Schatten-p balls of radius r.

    Unit balls: ((p-1)/2, 2) for p in (1, 2] and (1/(p 2^(p-2)), p) for
    p > 2; a ball of radius r scales alpha by 1/r^(q-1).

    The p > 2 constant is the exact one for the membership definition: near
    an axis point the boundary deficit of a chord of length eps is
    eps^p/(p 2^p) at the midpoint, which caps alpha at 4/(p 2^p).  (It is
    continuous with the q = 2 branch at p = 2 and survives adversarial
    search for violations; larger folklore constants such as 1/p do not.)
    """
    if p <= 1.0:
        raise NotUniformlyConvex(f"p = {p} ball is not uniformly convex")
    if p <= 2.0:
        return UCParams(alpha=(p - 1.0) / (2.0 * r), q=2.0, norm_tag=norm_tag)
    return UCParams(
        alpha=1.0 / (p * 2.0 ** (p - 2.0) * r ** (p - 1.0)), q=p, norm_tag=norm_tag
    )


def levelset_uc_params(mu: float, r_exp: float, L: float, w: float) -> UCParams:
    """(alpha, q) parameters of the sublevel set {f <= w} of a non-negative,
    L-smooth, (mu, r_exp)-uniformly convex function.

    Uses the proof-backed constant ``alpha = mu / (2 sqrt(2 w L))``; the
    looser ``mu / sqrt(2 w L)`` does not survive the membership sampler.
    """
    if mu <= 0.0 or L <= 0.0 or w <= 0.0:
        raise InvalidParams("mu, L, w must all be positive")
    if r_exp < 2.0:
        raise InvalidParams(f"convexity power must be >= 2, got {r_exp}")
    return UCParams(alpha=mu / (2.0 * np.sqrt(2.0 * w * L)), q=r_exp, norm_tag="levelset")


# ---------------------------------------------------------------------------
# set objects
# ---------------------------------------------------------------------------


class FeasibleSet:
    """A compact convex body exposing an LMO, a membership oracle, and its
    declared uniform-convexity parameters.

    Instances are immutable after construction; all oracle calls are pure.
    """

    dim: int
    radius: float

    @property
    def uc(self) -> Optional[UCParams]:
        try:
            return self.uc_params()
        except NotUniformlyConvex:
            return None

    def uc_params(self) -> UCParams:
        raise NotUniformlyConvex(type(self).__name__)

    def norm(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def batch_norm(self, X: np.ndarray) -> np.ndarray:
        """Norms of points stacked along the first axes."""
        raise NotImplementedError

    def dual_norm(self, phi: np.ndarray) -> float:
        raise NotImplementedError

    def lmo(self, phi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def membership_excess(self, x: np.ndarray) -> float:
        """How far the defining inequality is exceeded (<= 0 means inside)."""
        raise NotImplementedError

    def batch_membership_excess(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        return self.membership_excess(x) <= tol

    def boundary_point(self, direction: np.ndarray) -> np.ndarray:
        """Scale a nonzero direction onto the boundary."""
        n = self.norm(direction)
        if n == 0.0:
            raise ZeroDirection("cannot scale the zero direction to the boundary")
        return np.asarray(direction, dtype=float) * (self.radius / n)

    def descriptor(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LpBall(FeasibleSet):
    """{x : ||x||_p <= r} for p > 1 (use :class:`L1Ball` for p = 1)."""

    p: float
    radius: float
    dim: int

    def __post_init__(self) -> None:
        if self.p <= 1.0:
            raise InvalidParams("LpBall requires p > 1; p = 1 is L1Ball")
        if self.radius <= 0.0 or self.dim < 1:
            raise InvalidParams("radius must be positive and dim >= 1")

    def uc_params(self) -> UCParams:
        return lp_ball_uc_params(self.p, self.radius, norm_tag=f"lp:{self.p}")

    def norm(self, x):
        return lp_norm(x, self.p)

    def batch_norm(self, X):
        return _batch_lp_norm(X, self.p)

    def dual_norm(self, phi):
        return lp_norm(phi, dual_exponent(self.p))

    def lmo(self, phi):
        return lmo_lp(self.p, self.radius, phi)

    def membership_excess(self, x):
        return self.norm(x) - self.radius

    def batch_membership_excess(self, X):
        return self.batch_norm(X) - self.radius

    def descriptor(self) -> dict:
        return {"family": "lp", "p": self.p, "radius": self.radius, "dim": self.dim}


@dataclass(frozen=True)
class L1Ball(FeasibleSet):
    """The cross-polytope {x : ||x||_1 <= r}; not uniformly convex."""

    radius: float
    dim: int

    def __post_init__(self) -> None:
        if self.radius <= 0.0 or self.dim < 1:
            raise InvalidParams("radius must be positive and dim >= 1")

    def norm(self, x):
        return lp_norm(x, 1.0)

    def batch_norm(self, X):
        return _batch_lp_norm(X, 1.0)

    def dual_norm(self, phi):
        return lp_norm(phi, np.inf)

    def lmo(self, phi):
        return lmo_l1(self.radius, phi)

    def membership_excess(self, x):
        return self.norm(x) - self.radius

    def batch_membership_excess(self, X):
        return self.batch_norm(X) - self.radius

    def descriptor(self) -> dict:
        return {"family": "l1", "radius": self.radius, "dim": self.dim}


@dataclass(frozen=True)
class SchattenBall(FeasibleSet):
    """Matrices with lp norm of the singular values at most r (p > 1)."""

    p: float
    rows: int
    cols: int
    radius: float

    def __post_init__(self) -> None:
        if self.p <= 1.0:
            raise InvalidParams("SchattenBall requires p > 1")
        if self.radius <= 0.0 or self.rows < 1 or self.cols < 1:
            raise InvalidParams("radius must be positive and shape nonempty")

    @property
    def dim(self) -> int:  # type: ignore[override]
        return self.rows * self.cols

    def _sv(self, x) -> np.ndarray:
        try:
            return np.linalg.svd(np.asarray(x, dtype=float), compute_uv=False)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise SVDFailure(str(exc)) from exc

    def uc_params(self) -> UCParams:
        return lp_ball_uc_params(self.p, self.radius, norm_tag=f"schatten:{self.p}")

    def norm(self, x):
        return lp_norm(self._sv(x), self.p)

    def batch_norm(self, X):
        X = np.asarray(X, dtype=float)
        lead = X.shape[:-1]
        sv = np.linalg.svd(X.reshape(-1, self.rows, self.cols), compute_uv=False)
        return _batch_lp_norm(sv, self.p).reshape(lead)

    def dual_norm(self, phi):
        return lp_norm(self._sv(phi), dual_exponent(self.p))

    def lmo(self, phi):
        return lmo_schatten(self.p, self.radius, phi)

    def membership_excess(self, x):
        return self.norm(x) - self.radius

    def batch_membership_excess(self, X):
        return self.batch_norm(X) - self.radius

    def descriptor(self) -> dict:
        return {
            "family": "schatten",
            "p": self.p,
            "rows": self.rows,
            "cols": self.cols,
            "radius": self.radius,
        }


@dataclass(frozen=True)
class LevelSet(FeasibleSet):
    """Sublevel set {x : f(x) <= w} of a non-negative uniformly convex
    smooth function.

    Only membership and the (alpha, q) parameters are supported; there is no
    closed-form LMO over a generic level set.
    """

    value_fn: Callable[[np.ndarray], float]
    w: float
    dim: int
    mu: float
    r_exp: float
    L: float
    batch_value_fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None)

    def __post_init__(self) -> None:
        if self.w <= 0.0:
            raise InvalidParams("LevelSet requires w > 0")

    @property
    def radius(self) -> float:  # type: ignore[override]
        # only meaningful for norm-like f; used by samplers as a scale hint
        return float(self.w)

    def uc_params(self) -> UCParams:
        return levelset_uc_params(self.mu, self.r_exp, self.L, self.w)

    def norm(self, x):
        return float(np.linalg.norm(np.asarray(x, dtype=float).ravel()))

    def batch_norm(self, X):
        X = np.asarray(X, dtype=float)
        return np.sqrt((X * X).sum(axis=-1))

    def dual_norm(self, phi):
        return float(np.linalg.norm(np.asarray(phi, dtype=float).ravel()))

    def lmo(self, phi):
        raise NotImplementedError("no closed-form LMO over a generic level set")

    def membership_excess(self, x):
        return float(self.value_fn(np.asarray(x, dtype=float))) - self.w

    def batch_membership_excess(self, X):
        X = np.asarray(X, dtype=float)
        if self.batch_value_fn is not None:
            return self.batch_value_fn(X) - self.w
        flat = X.reshape(-1, X.shape[-1])
        vals = np.array([self.value_fn(row) for row in flat])
        return vals.reshape(X.shape[:-1]) - self.w

    def boundary_point(self, direction):
        # scale the direction until f hits w by bisection on the ray
        d = np.asarray(direction, dtype=float)
        if not np.any(d):
            raise ZeroDirection("cannot scale the zero direction")
        hi = 1.0
        while self.value_fn(hi * d) < self.w:
            hi *= 2.0
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.value_fn(mid * d) <= self.w:
                lo = mid
            else:
                hi = mid
        return lo * d

    def descriptor(self) -> dict:
        return {"family": "levelset", "kind": "sqnorm", "w": self.w, "dim": self.dim}


def sqnorm_level_set(w: float, dim: int) -> LevelSet:
    """{x : ||x||_2^2 <= w}; f = ||.||^2 is 2-smooth and (2, 2)-uniformly convex."""
    return LevelSet(
        value_fn=lambda x: float(np.dot(x, x)),
        w=w,
        dim=dim,
        mu=2.0,
        r_exp=2.0,
        L=2.0,
        batch_value_fn=lambda X: (np.asarray(X, dtype=float) ** 2).sum(axis=-1),
    )


def set_from_json(desc: dict) -> FeasibleSet:
    """Build a set from its JSON descriptor.

    Families: ``lp`` (p, radius, dim), ``l1`` (radius, dim), ``schatten``
    (p, rows, cols, radius), ``levelset`` (kind="sqnorm", w, dim).
    """
    from .errors import ConfigError

    try:
        family = desc["family"]
        if family == "lp":
            return LpBall(p=float(desc["p"]), radius=float(desc["radius"]), dim=int(desc["dim"]))
        if family == "l1":
            return L1Ball(radius=float(desc["radius"]), dim=int(desc["dim"]))
        if family == "schatten":
            return SchattenBall(
                p=float(desc["p"]),
                rows=int(desc["rows"]),
                cols=int(desc["cols"]),
                radius=float(desc["radius"]),
            )
        if family == "levelset":
            if desc.get("kind", "sqnorm") != "sqnorm":
                raise ConfigError(f"unknown levelset kind {desc.get('kind')!r}")
            return sqnorm_level_set(w=float(desc["w"]), dim=int(desc["dim"]))
    except KeyError as exc:
        raise ConfigError(f"set descriptor missing field {exc}") from exc
    except (TypeError, ValueError, InvalidParams) as exc:
        raise ConfigError(f"bad set descriptor: {exc}") from exc
    raise ConfigError(f"unknown set family {desc.get('family')!r}")
