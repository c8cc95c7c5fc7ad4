"""Follow-The-Leader for online linear optimization over uniformly convex
decision sets, with exact regret accounting and regret bound curves.

Each round plays the minimizer of the cumulative past losses, one LMO call
per round; the best-in-hindsight comparator is likewise exact via a single
LMO on the negated cumulative loss vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, InvalidParams, ZeroDirection
from .geometry import FeasibleSet

__all__ = [
    "LossStream",
    "fixed_stream",
    "drifting_mean_stream",
    "adversarial_stream",
    "OnlineTrace",
    "ftl_step",
    "run_ftl",
    "theorem4_bound",
    "stream_from_json",
]

_X1_SEED = 71521  # first-action direction; FTL's x1 is unspecified, any O(1) choice works


@dataclass(frozen=True)
class LossStream:
    """Loss-vector generator for online linear optimization.

    ``materialize(T)`` returns the (T, dim) array of loss vectors c_t.
    ``drifting``: base mean plus seeded Gaussian noise.  ``adversarial``:
    base mean plus sign-flipped perpendicular kicks, the stream that makes
    FTL's regret actually track its upper-bound rate.
    """

    tag: str  # "fixed" | "drifting" | "adversarial"
    dim: int
    base: Optional[np.ndarray] = None
    noise_scale: float = 0.0
    seed: int = 0
    losses: Optional[np.ndarray] = None

    def materialize(self, T: int) -> np.ndarray:
        if self.tag == "fixed":
            if self.losses is None or len(self.losses) < T:
                raise InvalidParams(f"fixed stream holds {0 if self.losses is None else len(self.losses)} losses, need {T}")
            return np.asarray(self.losses, dtype=float)[:T]
        rng = np.random.default_rng(self.seed)
        base = np.asarray(self.base, dtype=float)
        if self.tag == "drifting":
            return base + self.noise_scale * rng.standard_normal((T, self.dim))
        if self.tag == "adversarial":
            # perpendicular kick direction with strictly alternating signs:
            # the cumulative average oscillates at amplitude ~ 1/t, which is
            # the regime where the regret bound is tight
            u = rng.standard_normal(self.dim)
            nb = np.linalg.norm(base)
            if nb > 0.0:
                u = u - (np.dot(u, base) / nb**2) * base
            u /= np.linalg.norm(u)
            start = 1.0 if rng.random() < 0.5 else -1.0
            signs = start * (-1.0) ** np.arange(T)
            return base + self.noise_scale * signs[:, None] * u
        raise InvalidParams(f"unknown stream tag {self.tag!r}")


def fixed_stream(losses: np.ndarray) -> LossStream:
    losses = np.asarray(losses, dtype=float)
    return LossStream(tag="fixed", dim=losses.shape[1], losses=losses)


def drifting_mean_stream(base, noise_scale: float, seed: int) -> LossStream:
    base = np.asarray(base, dtype=float)
    return LossStream(tag="drifting", dim=base.shape[0], base=base, noise_scale=noise_scale, seed=seed)


def adversarial_stream(base, flip_scale: float, seed: int) -> LossStream:
    base = np.asarray(base, dtype=float)
    return LossStream(tag="adversarial", dim=base.shape[0], base=base, noise_scale=flip_scale, seed=seed)


def stream_from_json(desc: dict) -> LossStream:
    try:
        tag = desc["tag"]
        if tag == "fixed":
            return fixed_stream(np.asarray(desc["losses"], dtype=float))
        if tag == "drifting":
            return drifting_mean_stream(desc["base"], float(desc["noise_scale"]), int(desc["seed"]))
        if tag == "adversarial":
            return adversarial_stream(desc["base"], float(desc["flip_scale"]), int(desc["seed"]))
    except KeyError as exc:
        raise ConfigError(f"stream descriptor missing field {exc}") from exc
    raise ConfigError(f"unknown stream tag {desc.get('tag')!r}")


def ftl_step(
    feasible: FeasibleSet,
    cumulative: np.ndarray,
    t: int,
    x1_policy: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, bool]:
    """The FTL action for round t given the cumulative loss vector of the
    previous rounds.

    Returns (action, fallback) where fallback marks a zero cumulative vector
    at t >= 2, resolved by the first-action policy.
    """
    if t < 1:
        raise InvalidParams("rounds start at t = 1")
    if x1_policy is None:
        rng = np.random.default_rng(_X1_SEED)
        x1_policy = feasible.lmo(rng.standard_normal(feasible.dim))
    if t == 1:
        return np.asarray(x1_policy, dtype=float), False
    try:
        return feasible.lmo(-np.asarray(cumulative, dtype=float)), False
    except ZeroDirection:
        return np.asarray(x1_policy, dtype=float), True


@dataclass
class OnlineTrace:
    """Per-round FTL record with exact running regret.

    ``regret[i]`` compares to the best fixed action in hindsight at round
    i+1 (it may be non-monotone).  ``L_T`` is the min over rounds of the
    dual norm of the running gradient average; ``degenerate`` is set when it
    vanishes and the regret bounds do not apply.
    """

    t: np.ndarray
    loss: np.ndarray
    cum_grad_dual_norm: np.ndarray
    regret: np.ndarray
    actions: np.ndarray
    losses_vectors: np.ndarray
    M_loss: float
    L_T: float
    degenerate: bool
    fallback_rounds: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    def bound_curve(self, alpha: float, q: float) -> np.ndarray:
        return theorem4_bound(alpha, q, self.M_loss, self.L_T, self.t)

    def to_csv(self, path, bound: Optional[np.ndarray] = None) -> None:
        import csv

        header = ["t", "loss", "cum_grad_dual_norm", "regret"]
        if bound is not None:
            header.append("bound")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for i in range(len(self)):
                row = [
                    int(self.t[i]), repr(float(self.loss[i])),
                    repr(float(self.cum_grad_dual_norm[i])), repr(float(self.regret[i])),
                ]
                if bound is not None:
                    row.append(repr(float(bound[i])))
                writer.writerow(row)


def run_ftl(
    feasible: FeasibleSet,
    stream: LossStream,
    T: int,
    x1_policy: Optional[np.ndarray] = None,
) -> OnlineTrace:
    """Play FTL for T rounds, recording losses, L_T, and exact regret at
    every round."""
    if T < 1:
        raise InvalidParams("T must be >= 1")
    C = stream.materialize(T)
    dual_norms = np.array([feasible.dual_norm(c) for c in C])
    M_loss = float(dual_norms.max())

    if x1_policy is None:
        rng = np.random.default_rng(_X1_SEED)
        x1_policy = feasible.lmo(rng.standard_normal(feasible.dim))
    x1_policy = np.asarray(x1_policy, dtype=float)

    actions = np.empty_like(C)
    losses = np.empty(T)
    avg_dual = np.empty(T)
    regret = np.empty(T)
    fallback_rounds: list[int] = []

    cumulative = np.zeros(stream.dim)
    cum_loss = 0.0
    for i in range(T):
        t = i + 1
        if t == 1:
            x = x1_policy
        else:
            try:
                x = feasible.lmo(-cumulative)
            except ZeroDirection:
                x = x1_policy
                fallback_rounds.append(t)
        c = C[i]
        actions[i] = x
        losses[i] = np.dot(c, x)
        cum_loss += losses[i]
        cumulative = cumulative + c
        avg_dual[i] = feasible.dual_norm(cumulative / t)
        try:
            hindsight = float(np.dot(cumulative, feasible.lmo(-cumulative)))
        except ZeroDirection:
            hindsight = 0.0
        regret[i] = cum_loss - hindsight

    L_T = float(avg_dual.min())
    return OnlineTrace(
        t=np.arange(1, T + 1),
        loss=losses,
        cum_grad_dual_norm=avg_dual,
        regret=regret,
        actions=actions,
        losses_vectors=C,
        M_loss=M_loss,
        L_T=L_T,
        degenerate=L_T <= 0.0,
        fallback_rounds=fallback_rounds,
        metadata={"set": feasible.descriptor(), "stream": stream.tag, "T": T},
    )


def theorem4_bound(alpha: float, q: float, M_loss: float, L_T: float, T):
    """FTL regret bound over an (alpha, q)-uniformly convex set.

    q = 2: (4 M^2 / (alpha L_T)) (1 + log T);
    q > 2: 2M (2M/(alpha L_T))^(1/(q-1)) ((q-1)/(q-2)) T^(1 - 1/(q-1)).
    The (q-1)/(q-2) blow-up as q -> 2+ is the theorem's own behavior and is
    surfaced, not masked.
    """
    if alpha <= 0.0 or M_loss <= 0.0:
        raise InvalidParams("alpha and M_loss must be positive")
    if L_T <= 0.0:
        raise InvalidParams("regret bounds require L_T > 0")
    if q < 2.0:
        raise InvalidParams(f"q must be >= 2, got {q}")
    T = np.asarray(T, dtype=float)
    if q == 2.0:
        out = (4.0 * M_loss**2 / (alpha * L_T)) * (1.0 + np.log(T))
    else:
        out = (
            2.0
            * M_loss
            * (2.0 * M_loss / (alpha * L_T)) ** (1.0 / (q - 1.0))
            * ((q - 1.0) / (q - 2.0))
            * T ** (1.0 - 1.0 / (q - 1.0))
        )
    if np.ndim(out) == 0:
        return float(out)
    return out
