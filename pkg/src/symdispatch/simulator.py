"""Episode simulation and Monte Carlo policy evaluation."""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from . import rng as rngmod
from .belief import BeliefPair, Prescription, bayes_update
from .io import atomic_write
from .model import ScenarioConfig, Urgency, resolve_collision, sample_private_states, stage_cost
from .policies import Optimal, PolicySpec, prescriptions_for
from .solver import UnsupportedAgentCount


class HorizonMismatch(ValueError):
    pass


class Step(NamedTuple):
    t: int
    prescriptions: tuple[Prescription, ...]
    joint_action: tuple[bool, ...]
    cost: int
    winner: Optional[int]
    belief_before: BeliefPair
    belief_after: BeliefPair
    lookup_key: Optional[BeliefPair] = None

    @property
    def prescription(self) -> Prescription:
        return self.prescriptions[0]


@dataclass(frozen=True)
class EpisodeTrace:
    """One simulated episode.

    Beliefs are the exact Bayes posteriors.  For the optimal policy each
    step also records ``lookup_key``, the grid point the table was read at.
    """

    config: ScenarioConfig
    policy: str
    episode: int
    true_states: tuple[Urgency, ...]
    steps: tuple[Step, ...]
    total_cost: int


@dataclass(frozen=True)
class MonteCarloSummary:
    policy: str
    scenario: str
    num_episodes: int
    mean_total_cost: float
    standard_error: float
    per_slot_mean_cost: tuple[float, ...]
    successes: tuple[int, ...]
    traces: Optional[tuple[EpisodeTrace, ...]] = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class FairnessReport:
    successes: tuple[int, ...]
    shares: tuple[float, ...]
    num_slots: int


def _check(config: ScenarioConfig, policy: PolicySpec) -> None:
    if isinstance(policy, Optimal):
        if config.num_agents != 2:
            raise UnsupportedAgentCount(
                f"the optimal policy is solved for two agents, scenario has {config.num_agents}"
            )
        if policy.table.horizon != config.horizon:
            raise HorizonMismatch(
                f"table horizon {policy.table.horizon} != scenario horizon {config.horizon}"
            )


def run_episode(
    config: ScenarioConfig,
    policy: PolicySpec,
    episode: int = 0,
    strict: bool = True,
    stream_order: Optional[Sequence[int]] = None,
) -> EpisodeTrace:
    """Simulate one episode; fully determined by ``(config.seed, episode)``.

    ``stream_order[j]`` names the agent substream that drives agent ``j``'s
    dispatch draws (identity by default).
    """
    _check(config, policy)
    n = config.num_agents
    order = range(n) if stream_order is None else stream_order
    if sorted(order) != list(range(n)):
        raise ValueError(f"stream_order must be a permutation of 0..{n - 1}")
    T = config.horizon
    # Row j holds agent j's T uniforms: the same numbers act() would draw one
    # at a time from that agent's stream.
    uniforms = [rngmod.agent_stream(config.seed, episode, k).random(T).tolist() for k in order]
    states = sample_private_states(config, rngmod.state_stream(config.seed, episode, n))
    high = [s is Urgency.HIGH for s in states]
    winner_rng = rngmod.collision_stream(config.seed, episode, n)
    table = policy.table if isinstance(policy, Optimal) else None

    belief: BeliefPair = (config.load_probability,) * n
    steps = []
    total = 0
    for t in range(1, T + 1):
        if table is None:
            key = None
            gammas = tuple(prescriptions_for(policy, t, belief))
        else:
            key = (table.belief_grid.snap(belief[0]), table.belief_grid.snap(belief[1]))
            gammas = (table.prescription_at(t, key),) * 2
        joint = tuple(
            uniforms[j][t - 1] < (g.gamma_high if high[j] else g.gamma_low)
            for j, g in enumerate(gammas)
        )
        cost = stage_cost(joint)
        winner = resolve_collision(joint, winner_rng)
        after = tuple(
            bayes_update(b, g, u, strict=strict) for b, g, u in zip(belief, gammas, joint)
        )
        steps.append(Step(t, gammas, joint, cost, winner, belief, after, key))
        total += cost
        belief = after
    return EpisodeTrace(config, policy.name, episode, states, tuple(steps), total)


def _run_chunk(args) -> list[EpisodeTrace]:
    config, policy, episodes, strict, stream_order = args
    return [run_episode(config, policy, i, strict, stream_order) for i in episodes]


def scenario_label(config: ScenarioConfig) -> str:
    return f"N={config.num_agents},T={config.horizon},load={config.load_probability:g}"


def run_monte_carlo(
    config: ScenarioConfig,
    policy: PolicySpec,
    num_episodes: int,
    workers: int = 1,
    keep_traces: bool = False,
    scenario: Optional[str] = None,
    stream_order: Optional[Sequence[int]] = None,
) -> MonteCarloSummary:
    """Evaluate ``policy`` over episodes ``0..num_episodes-1`` of ``config``.

    Episodes draw from their own seed-derived streams and the reduction runs
    over totals in episode order, so the summary is identical for any
    ``workers``.
    """
    if num_episodes < 1:
        raise ValueError("num_episodes must be >= 1")
    _check(config, policy)
    if workers <= 1:
        traces = _run_chunk((config, policy, range(num_episodes), True, stream_order))
    else:
        chunk = math.ceil(num_episodes / (workers * 4))
        jobs = [
            (config, policy, range(lo, min(lo + chunk, num_episodes)), True, stream_order)
            for lo in range(0, num_episodes, chunk)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = [tr for part in pool.map(_run_chunk, jobs) for tr in part]

    totals = np.array([tr.total_cost for tr in traces], dtype=np.float64)
    slot_costs = np.array([[s.cost for s in tr.steps] for tr in traces], dtype=np.float64)
    stderr = float(totals.std(ddof=1) / math.sqrt(num_episodes)) if num_episodes > 1 else 0.0
    return MonteCarloSummary(
        policy=policy.name,
        scenario=scenario or scenario_label(config),
        num_episodes=num_episodes,
        mean_total_cost=float(totals.mean()),
        standard_error=stderr,
        per_slot_mean_cost=tuple(float(x) for x in slot_costs.mean(axis=0)),
        successes=fairness_report(traces).successes,
        traces=tuple(traces) if keep_traces else None,
    )


def fairness_report(traces: Iterable[EpisodeTrace]) -> FairnessReport:
    """Successful dispatches per agent: unique dispatcher or collision winner."""
    traces = list(traces)
    if not traces:
        raise ValueError("fairness_report needs at least one trace")
    n = traces[0].config.num_agents
    counts = [0] * n
    slots = 0
    for tr in traces:
        for step in tr.steps:
            slots += 1
            if step.winner is not None:
                counts[step.winner] += 1
    total = sum(counts)
    shares = tuple(c / total for c in counts) if total else (0.0,) * n
    return FairnessReport(tuple(counts), shares, slots)


# ---------------------------------------------------------------------------
# Trace export
# ---------------------------------------------------------------------------


def trace_columns(num_agents: int, keys: bool = False) -> list[str]:
    agents = range(1, num_agents + 1)
    cols = ["t"]
    cols += [f"b{i}_before" for i in agents]
    cols += ["gamma_high", "gamma_low"]
    cols += [f"u{i}" for i in agents]
    cols += ["cost", "winner"]
    cols += [f"b{i}_after" for i in agents]
    if keys:
        cols += [f"b{i}_key" for i in agents]
    return cols


def _step_row(step: Step, keys: bool) -> list[str]:
    g = step.prescription
    row = [str(step.t)]
    row += [f"{b:.6f}" for b in step.belief_before]
    row += [f"{g.gamma_high:.6f}", f"{g.gamma_low:.6f}"]
    row += [str(int(u)) for u in step.joint_action]
    row += [str(step.cost), "" if step.winner is None else str(step.winner + 1)]
    row += [f"{b:.6f}" for b in step.belief_after]
    if keys:
        key = step.lookup_key or step.belief_before
        row += [f"{b:.6f}" for b in key]
    return row


def format_trace(trace: EpisodeTrace, keys: bool = False) -> str:
    """Per-step CSV; ``winner`` is 1-based to match ``u1``/``u2`` and empty for idle slots.

    The prescription columns report agent 1's prescription.  ``keys`` appends
    the grid point the policy table was read at (the raw belief for
    baselines).
    """
    buf = io.StringIO()
    buf.write(",".join(trace_columns(trace.config.num_agents, keys)) + "\n")
    for step in trace.steps:
        buf.write(",".join(_step_row(step, keys)) + "\n")
    return buf.getvalue()


def format_traces(traces: Sequence[EpisodeTrace], keys: bool = False) -> str:
    """Concatenated stream of several episodes, with a leading ``episode`` column."""
    if not traces:
        raise ValueError("no traces to format")
    buf = io.StringIO()
    buf.write(",".join(["episode"] + trace_columns(traces[0].config.num_agents, keys)) + "\n")
    for tr in traces:
        for step in tr.steps:
            buf.write(",".join([str(tr.episode)] + _step_row(step, keys)) + "\n")
    return buf.getvalue()


def write_trace(trace: EpisodeTrace, path: str | os.PathLike, keys: bool = False) -> None:
    atomic_write(path, format_trace(trace, keys))
