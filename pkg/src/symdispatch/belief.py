"""Common-information belief over the agents' private urgencies.

The belief is kept per agent: ``b[i] = P(agent i is High | action history)``.
Because every agent's action depends only on its own urgency and the shared
prescription, the joint posterior stays a product of these marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .model import JointAction

BeliefPair = tuple[float, ...]

# Slack added before flooring when snapping, so that posteriors that should
# land exactly on a midpoint still round up despite representation error.
SNAP_EPS = 1e-9


class ZeroLikelihood(ArithmeticError):
    """An observed action has probability zero under the current belief and prescription."""


@dataclass(frozen=True)
class Prescription:
    """Dispatch probability for a High agent and for a Low agent."""

    gamma_high: float
    gamma_low: float

    def __post_init__(self) -> None:
        for name in ("gamma_high", "gamma_low"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")

    def __iter__(self):
        yield self.gamma_high
        yield self.gamma_low

    @property
    def uninformative(self) -> bool:
        return self.gamma_high == self.gamma_low


@dataclass(frozen=True)
class BeliefGrid:
    """Uniform grid ``{0, res, 2 res, ..., 1}`` on one belief axis."""

    resolution: float = 0.05

    def __post_init__(self) -> None:
        steps = 1.0 / self.resolution
        if self.resolution <= 0 or abs(steps - round(steps)) > 1e-9:
            raise ValueError(f"resolution must divide 1 evenly, got {self.resolution}")

    @cached_property
    def size(self) -> int:
        return int(round(1.0 / self.resolution)) + 1

    @property
    def points(self) -> np.ndarray:
        n = self.size - 1
        return np.arange(n + 1) / n

    def index(self, b: float) -> int:
        """Index of the nearest grid point; exact midpoints go up."""
        n = self.size - 1
        return min(n, max(0, math.floor(b * n + 0.5 + SNAP_EPS)))

    def point(self, index: int) -> float:
        return index / (self.size - 1)

    def snap(self, b: float) -> float:
        return self.point(self.index(b))


def check_belief(belief: Sequence[float]) -> BeliefPair:
    out = tuple(float(b) for b in belief)
    for b in out:
        if not 0.0 <= b <= 1.0:
            raise ValueError(f"belief entries must lie in [0, 1], got {belief}")
    return out


def dispatch_probability(belief_i: float, prescription: Prescription) -> float:
    """Coordinator's probability that an agent with High-belief ``belief_i`` dispatches."""
    return belief_i * prescription.gamma_high + (1.0 - belief_i) * prescription.gamma_low


def _require_pair(belief: Sequence[float]) -> None:
    if len(belief) != 2:
        raise ValueError(f"this operation is defined for two agents, got {len(belief)}")


def expected_stage_cost(belief: Sequence[float], prescription: Prescription) -> float:
    _require_pair(belief)
    r1 = dispatch_probability(belief[0], prescription)
    r2 = dispatch_probability(belief[1], prescription)
    return 1.0 - (r1 * (1.0 - r2) + r2 * (1.0 - r1))


def joint_observation_probability(
    belief: Sequence[float], prescription: Prescription, joint_action: JointAction
) -> float:
    _require_pair(belief)
    if len(joint_action) != 2:
        raise ValueError("joint action length must match the belief")
    p = 1.0
    for b, u in zip(belief, joint_action):
        r = dispatch_probability(b, prescription)
        p *= r if u else 1.0 - r
    return p


def bayes_update(
    belief_i: float, prescription: Prescription, observed_action: bool, strict: bool = True
) -> float:
    """Posterior High-probability for one agent after seeing its action.

    Raises :class:`ZeroLikelihood` if the observed action was impossible; with
    ``strict=False`` the prior is returned instead.
    """
    if observed_action:
        like_high, like_low = prescription.gamma_high, prescription.gamma_low
    else:
        like_high, like_low = 1.0 - prescription.gamma_high, 1.0 - prescription.gamma_low
    num = belief_i * like_high
    den = num + (1.0 - belief_i) * like_low
    if like_high == like_low and den > 0.0:
        # Uninformative observation; skip the division so the prior survives bit for bit.
        return belief_i
    if den <= 0.0:
        if strict:
            action = "dispatch" if observed_action else "wait"
            raise ZeroLikelihood(
                f"{action} has zero likelihood at belief {belief_i} under {prescription}"
            )
        return belief_i
    return num / den


def update_beliefs(
    belief: Sequence[float],
    prescriptions: Sequence[Prescription],
    joint_action: JointAction,
    strict: bool = True,
) -> BeliefPair:
    """Apply :func:`bayes_update` agent by agent, each with the prescription it followed."""
    return tuple(
        bayes_update(b, g, bool(u), strict=strict)
        for b, g, u in zip(belief, prescriptions, joint_action)
    )


def snap_to_grid(belief: Sequence[float], grid: BeliefGrid) -> BeliefPair:
    return tuple(grid.snap(b) for b in belief)
