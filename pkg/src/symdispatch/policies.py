"""Dispatch policies: the DP-optimal prescription and the baselines.

Every policy maps the stage and the common-information belief to one
prescription per agent.  Agents then randomize locally with :func:`act`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .belief import Prescription
from .model import Urgency
from .solver import UnsupportedAgentCount, ValueTable, prescription_at

DISPATCH = Prescription(1.0, 1.0)
WAIT = Prescription(0.0, 0.0)


class InvalidThresholds(ValueError):
    pass


class PolicyParseError(ValueError):
    pass


@dataclass(frozen=True)
class AlwaysDispatch:
    name = "always-dispatch"

    def prescribe(self, t: int, belief_about_others: float) -> Prescription:
        return DISPATCH


@dataclass(frozen=True)
class AlwaysWait:
    name = "always-wait"

    def prescribe(self, t: int, belief_about_others: float) -> Prescription:
        return WAIT


@dataclass(frozen=True)
class Threshold:
    """Wait above ``x``, dispatch below ``y``, otherwise dispatch with probability ``z``.

    Both comparisons are strict, so a belief equal to ``x`` or ``y`` takes the
    middle branch.  Own urgency is ignored.
    """

    x: float = 0.8
    y: float = 0.2
    z: float = 0.5

    def __post_init__(self) -> None:
        for key in ("x", "y", "z"):
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise InvalidThresholds(f"{key}={value} outside [0, 1]")
        if self.y > self.x:
            raise InvalidThresholds(f"need y <= x, got x={self.x}, y={self.y}")

    @property
    def name(self) -> str:
        return f"threshold:x={self.x:g},y={self.y:g},z={self.z:g}"

    def prescribe(self, t: int, belief_about_others: float) -> Prescription:
        if belief_about_others > self.x:
            return WAIT
        if belief_about_others < self.y:
            return DISPATCH
        return Prescription(self.z, self.z)


@dataclass(frozen=True, eq=False)
class Optimal:
    """Prescriptions read from a solved :class:`ValueTable` (two agents only)."""

    table: ValueTable
    source: str = ""

    @property
    def name(self) -> str:
        return f"optimal:{self.source}" if self.source else "optimal"

    def prescribe(self, t: int, belief_pair: Sequence[float]) -> Prescription:
        return prescription_at(self.table, t, belief_pair)


PolicySpec = Union[Optimal, Threshold, AlwaysDispatch, AlwaysWait]


def others_high_probability(beliefs: Sequence[float], agent: int) -> float:
    """Probability that at least one agent other than ``agent`` is High."""
    if len(beliefs) == 2:
        # Exact, so that threshold comparisons at the prior are not perturbed.
        return float(beliefs[1 - agent])
    p_none = 1.0
    for j, b in enumerate(beliefs):
        if j != agent:
            p_none *= 1.0 - b
    return 1.0 - p_none


def prescribe(
    policy: PolicySpec,
    t: int,
    belief_about_others: float,
    belief_pair: Optional[Sequence[float]] = None,
) -> Prescription:
    if isinstance(policy, Optimal):
        if belief_pair is None:
            raise ValueError("the optimal policy needs the full belief pair")
        return policy.prescribe(t, belief_pair)
    return policy.prescribe(t, belief_about_others)


def prescriptions_for(policy: PolicySpec, t: int, beliefs: Sequence[float]) -> list[Prescription]:
    """One prescription per agent given the current common belief."""
    if isinstance(policy, Optimal):
        if len(beliefs) != 2:
            raise UnsupportedAgentCount("the optimal policy is solved for two agents")
        g = policy.prescribe(t, beliefs)
        return [g, g]
    return [policy.prescribe(t, others_high_probability(beliefs, i)) for i in range(len(beliefs))]


def act(prescription: Prescription, own_state: Urgency, rng: np.random.Generator) -> bool:
    """Draw one uniform from ``rng`` and dispatch if it falls below the urgency's probability."""
    p = prescription.gamma_high if own_state is Urgency.HIGH else prescription.gamma_low
    return bool(rng.random() < p)


_THRESHOLD_KEY = re.compile(r"^([xyz])=(.*)$")


def parse_policy(
    spec: str,
    load_table: Optional[Callable[[str], ValueTable]] = None,
    solve_table: Optional[Callable[[], ValueTable]] = None,
) -> PolicySpec:
    """Parse ``optimal:<table>``, ``threshold:x=..,y=..,z=..``, ``always-dispatch`` or ``always-wait``.

    A bare ``optimal`` solves a fresh table through ``solve_table``; a bare
    ``threshold`` (or one with missing keys) uses x=0.8, y=0.2, z=0.5.
    """
    spec = spec.strip()
    if spec in ("always-dispatch", "always-wait"):
        return AlwaysDispatch() if spec == "always-dispatch" else AlwaysWait()
    head, sep, rest = spec.partition(":")
    if head == "optimal":
        if not sep:
            if solve_table is None:
                raise PolicyParseError("'optimal' needs a table file: optimal:<table-file>")
            return Optimal(solve_table())
        if not rest:
            raise PolicyParseError("empty table path in 'optimal:'")
        if load_table is None:
            from .solver import read_table as load_table
        return Optimal(load_table(rest), source=rest)
    if head == "threshold":
        params: dict[str, float] = {}
        if sep:
            for token in rest.split(","):
                m = _THRESHOLD_KEY.match(token.strip())
                if not m:
                    raise PolicyParseError(f"bad threshold parameter {token!r} (expected x=, y= or z=)")
                key, raw = m.groups()
                if key in params:
                    raise PolicyParseError(f"duplicate threshold parameter {token!r}")
                try:
                    value = float(raw)
                except ValueError:
                    raise PolicyParseError(f"bad number in threshold parameter {token!r}") from None
                if not math.isfinite(value):
                    raise PolicyParseError(f"bad number in threshold parameter {token!r}")
                params[key] = value
        return Threshold(**params)
    raise PolicyParseError(f"unknown policy {head!r}")


def split_policy_list(text: str) -> list[str]:
    """Split a comma-separated policy list, keeping ``threshold`` parameters together."""
    out: list[str] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise PolicyParseError(f"empty entry in policy list {text!r}")
        if _THRESHOLD_KEY.match(token) and out and out[-1].startswith("threshold"):
            out[-1] += "," + token
        else:
            out.append(token)
    return out
