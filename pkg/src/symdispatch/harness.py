"""Experiment presets and the commands that produce each output table.

Each ``cmd_*`` function writes a CSV file plus a ``<out>.manifest.json``
sidecar recording the arguments, seed and package version.  Nothing
time-dependent goes into either file, so repeated runs are byte-identical.
"""

from __future__ import annotations

import io
import logging
import os
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .io import atomic_write, write_manifest
from .model import ScenarioConfig, load_config
from .policies import Optimal, PolicySpec, parse_policy
from .simulator import EpisodeTrace, MonteCarloSummary, format_trace, run_episode, run_monte_carlo
from .solver import DEFAULT_MODE, ValueTable, export_policy_map, read_table, solve, write_table

log = logging.getLogger(__name__)

DEFAULT_EPISODES = 10_000


@dataclass(frozen=True)
class LoadPreset:
    name: str
    load_probability: float


PRESETS = {
    "light": LoadPreset("light", 0.2),
    "moderate": LoadPreset("moderate", 0.5),
    "heavy": LoadPreset("heavy", 0.8),
}


def get_preset(name: str) -> LoadPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown load preset {name!r}; choose from {', '.join(PRESETS)}") from None


@dataclass(frozen=True)
class ComparisonRow:
    preset: str
    load_probability: float
    policy: str
    mean_total_cost: float
    standard_error: float
    num_episodes: int


COMPARISON_COLUMNS = (
    "preset",
    "load_probability",
    "policy",
    "mean_total_cost",
    "standard_error",
    "num_episodes",
)


def format_comparison(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    buf.write(",".join(COMPARISON_COLUMNS) + "\n")
    for r in rows:
        policy = f'"{r.policy}"' if "," in r.policy else r.policy
        buf.write(
            f"{r.preset},{r.load_probability:.6f},{policy},{r.mean_total_cost:.6f},"
            f"{r.standard_error:.6f},{r.num_episodes}\n"
        )
    return buf.getvalue()


def _manifest(command: str, **args) -> dict:
    return {"command": command, "arguments": args, "version": __version__}


def cmd_solve(
    config_path: str | os.PathLike, out: str | os.PathLike, interp: str = DEFAULT_MODE
) -> tuple[ValueTable, float]:
    """Solve the scenario in ``config_path`` and write the table to ``out``.

    Returns the table and ``V_1`` at the scenario's initial belief.
    """
    config = load_config(config_path)
    table = solve(config, mode=interp)
    write_table(table, out)
    p = config.load_probability
    return table, table.value_at(1, (p, p))


def _policy_loader(horizon: int):
    cache: dict[str, ValueTable] = {}

    def solve_table() -> ValueTable:
        if "" not in cache:
            cache[""] = solve(horizon)
        return cache[""]

    def load_table(path: str) -> ValueTable:
        if path not in cache:
            cache[path] = read_table(path)
        return cache[path]

    return load_table, solve_table


def resolve_policies(specs: Sequence[str], horizon: int) -> list[PolicySpec]:
    load_table, solve_table = _policy_loader(horizon)
    return [parse_policy(s, load_table=load_table, solve_table=solve_table) for s in specs]


def cmd_compare(
    policies: Sequence[str],
    presets: Sequence[str],
    episodes: int = DEFAULT_EPISODES,
    seed: int = 0,
    out: Optional[str | os.PathLike] = None,
    horizon: int = 10,
    num_agents: int = 2,
    workers: int = 1,
) -> tuple[list[ComparisonRow], list[str]]:
    """Monte Carlo every (preset, policy) pair.

    Returns the rows that ran and one message per failed run; failed pairs
    are left out of the written table.
    """
    resolved = resolve_policies(policies, horizon)
    loads = [get_preset(p) for p in presets]
    rows: list[ComparisonRow] = []
    errors: list[str] = []
    for preset in loads:
        config = ScenarioConfig(num_agents, horizon, preset.load_probability, seed)
        for policy in resolved:
            try:
                s: MonteCarloSummary = run_monte_carlo(
                    config, policy, episodes, workers=workers, scenario=preset.name
                )
            except Exception as exc:  # reported per run; the rest still execute
                msg = f"{preset.name}/{policy.name}: {exc}"
                log.error(msg)
                errors.append(msg)
                continue
            rows.append(
                ComparisonRow(
                    preset.name,
                    preset.load_probability,
                    policy.name,
                    s.mean_total_cost,
                    s.standard_error,
                    s.num_episodes,
                )
            )
    if out is not None:
        atomic_write(out, format_comparison(rows))
        write_manifest(
            out,
            _manifest(
                "compare",
                policies=list(policies),
                presets=list(presets),
                episodes=episodes,
                seed=seed,
                horizon=horizon,
                num_agents=num_agents,
                errors=errors,
            ),
        )
    return rows, errors


def cmd_trace(
    config: ScenarioConfig | str | os.PathLike,
    policy: str | PolicySpec,
    seed: Optional[int] = None,
    out: Optional[str | os.PathLike] = None,
    episode: int = 0,
    keys: bool = False,
) -> EpisodeTrace:
    """Simulate one episode and write its per-step records.

    ``seed`` overrides the seed in the configuration when given.
    """
    if not isinstance(config, ScenarioConfig):
        config = load_config(config)
    if seed is not None:
        config = config.with_(seed=seed)
    if isinstance(policy, str):
        spec = policy
        policy = resolve_policies([policy], config.horizon)[0]
    else:
        spec = policy.name
    trace = run_episode(config, policy, episode)
    if out is not None:
        atomic_write(out, format_trace(trace, keys=keys))
        write_manifest(
            out,
            _manifest(
                "trace",
                policy=spec,
                seed=config.seed,
                episode=episode,
                num_agents=config.num_agents,
                horizon=config.horizon,
                load_probability=config.load_probability,
                true_states=[str(s) for s in trace.true_states],
            ),
        )
    return trace


POLICY_MAP_COLUMNS = ("own_urgency", "other_belief", "dispatch_probability")


def format_policy_map(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(POLICY_MAP_COLUMNS) + "\n")
    for urgency, belief, prob in rows:
        buf.write(f"{urgency},{belief:.6f},{prob:.6f}\n")
    return buf.getvalue()


def cmd_policy_map(
    table: ValueTable | str | os.PathLike, stage: int, out: Optional[str | os.PathLike] = None
):
    source = None
    if not isinstance(table, ValueTable):
        source = os.fspath(table)
        table = read_table(table)
    rows = export_policy_map(table, stage)
    if out is not None:
        atomic_write(out, format_policy_map(rows))
        write_manifest(out, _manifest("policy-map", table=source, stage=stage, snap_mode=table.mode))
    return rows


def optimal_policy(horizon: int = 10, mode: str = DEFAULT_MODE) -> Optimal:
    return Optimal(solve(horizon, mode=mode))
