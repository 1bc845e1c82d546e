"""Static problem data: urgency states, scenarios, joint actions and the slot cost."""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .rng import MASK64


class ConfigError(ValueError):
    """Raised for malformed or out-of-range scenario configuration."""


class Urgency(enum.Enum):
    HIGH = "H"
    LOW = "L"

    @property
    def is_high(self) -> bool:
        return self is Urgency.HIGH

    def __str__(self) -> str:
        return "High" if self is Urgency.HIGH else "Low"


JointAction = Sequence[bool]
"""One dispatch flag per agent, ``True`` meaning the agent uses the slot."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One experiment instance.

    ``load_probability`` is the prior probability that each agent is High
    urgency, independently across agents.
    """

    num_agents: int = 2
    horizon: int = 10
    load_probability: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.num_agents, bool) or int(self.num_agents) != self.num_agents:
            raise ConfigError(f"num_agents must be an integer, got {self.num_agents!r}")
        if self.num_agents < 2:
            raise ConfigError(f"num_agents must be >= 2, got {self.num_agents}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ConfigError(f"horizon must be a positive integer, got {self.horizon!r}")
        if not 0.0 <= self.load_probability <= 1.0:
            raise ConfigError(f"load_probability must lie in [0, 1], got {self.load_probability}")
        if int(self.seed) != self.seed or not 0 <= self.seed <= MASK64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "num_agents", int(self.num_agents))
        object.__setattr__(self, "horizon", int(self.horizon))
        object.__setattr__(self, "load_probability", float(self.load_probability))
        object.__setattr__(self, "seed", int(self.seed))

    def with_(self, **changes) -> "ScenarioConfig":
        fields = {
            "num_agents": self.num_agents,
            "horizon": self.horizon,
            "load_probability": self.load_probability,
            "seed": self.seed,
        }
        fields.update(changes)
        return ScenarioConfig(**fields)


_CONFIG_KEYS = {
    "num_agents": int,
    "horizon": int,
    "load_probability": float,
    "seed": int,
}


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    """Parse ``key = value`` lines (``:`` also accepted, ``#`` starts a comment).

    All four keys are optional and default to the :class:`ScenarioConfig`
    defaults; unknown or repeated keys are errors.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split(sep, 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = _CONFIG_KEYS[key](value)
        except ValueError:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {value!r}") from None
    return ScenarioConfig(**values)


def load_config(path: str | os.PathLike) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def format_config(config: ScenarioConfig) -> str:
    return (
        f"num_agents = {config.num_agents}\n"
        f"horizon = {config.horizon}\n"
        f"load_probability = {config.load_probability!r}\n"
        f"seed = {config.seed}\n"
    )


def stage_cost(joint_action: JointAction) -> int:
    """0 when exactly one agent dispatches, 1 for an idle slot or a collision."""
    return 0 if sum(bool(u) for u in joint_action) == 1 else 1


def sample_private_states(config: ScenarioConfig, rng: np.random.Generator) -> tuple[Urgency, ...]:
    # One uniform per agent, drawn in agent order; High iff u < load.
    draws = rng.random(config.num_agents)
    return tuple(Urgency.HIGH if u < config.load_probability else Urgency.LOW for u in draws)


def resolve_collision(joint_action: JointAction, rng: np.random.Generator) -> Optional[int]:
    """Index of the agent whose shipment goes through, or ``None`` for an idle slot.

    With several dispatchers the winner is uniform among them.  The stream is
    only consumed when there is an actual collision.
    """
    dispatchers = [i for i, u in enumerate(joint_action) if u]
    if not dispatchers:
        return None
    if len(dispatchers) == 1:
        return dispatchers[0]
    return dispatchers[int(rng.integers(len(dispatchers)))]
