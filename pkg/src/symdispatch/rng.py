"""Deterministic seed splitting for reproducible, schedule-independent runs.

Every random draw in a Monte Carlo run comes from a stream keyed by a path
of integers ``(root_seed, episode, substream)``.  The path is folded into a
single 64-bit seed with the SplitMix64 finalizer, and that seed initializes
a numpy PCG64 generator.  Episode ``i`` therefore sees the same numbers no
matter which worker runs it or in what order.

Substream layout inside episode ``i`` of an ``N``-agent scenario:

* ``j`` for ``0 <= j < N`` -- agent ``j``'s dispatch draws
* ``N``                   -- private urgency sampling
* ``N + 1``               -- collision winner selection
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche on 64-bit integers."""
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(root_seed: int, *path: int) -> int:
    """Fold ``path`` into ``root_seed``, one :func:`mix64` round per element."""
    if not 0 <= root_seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {root_seed}")
    h = mix64(root_seed)
    for k in path:
        h = mix64(h ^ (k & MASK64))
    return h


def stream(root_seed: int, *path: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(root_seed, *path)))


def agent_stream(root_seed: int, episode: int, agent: int) -> np.random.Generator:
    return stream(root_seed, episode, agent)


def state_stream(root_seed: int, episode: int, num_agents: int) -> np.random.Generator:
    return stream(root_seed, episode, num_agents)


def collision_stream(root_seed: int, episode: int, num_agents: int) -> np.random.Generator:
    return stream(root_seed, episode, num_agents + 1)
