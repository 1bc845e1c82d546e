"""Independent reference computations for the tests.

Everything here uses exact rationals and explicit enumeration; none of it
touches the package's vectorized tables or stage kernels.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np


def levels(k: int) -> list[Fraction]:
    return [Fraction(i, k) for i in range(k + 1)]


def snap_exact(b: Fraction, steps: int) -> Fraction:
    """Nearest multiple of 1/steps, halves rounding up."""
    return Fraction(math.floor(b * steps + Fraction(1, 2)), steps)


def posterior_exact(b: Fraction, g_high: Fraction, g_low: Fraction, dispatched: bool) -> Fraction | None:
    like_h = g_high if dispatched else 1 - g_high
    like_l = g_low if dispatched else 1 - g_low
    den = b * like_h + (1 - b) * like_l
    if den == 0:
        return None
    return b * like_h / den


def prob_exactly_one(r1, r2):
    # Enumerate the four joint actions explicitly.
    total = 0
    for u1, u2 in itertools.product((0, 1), repeat=2):
        p = (r1 if u1 else 1 - r1) * (r2 if u2 else 1 - r2)
        if u1 + u2 == 1:
            total += p
    return total


class TreeOracle:
    """Exhaustive search over grid-restricted coordination strategies.

    A strategy picks a prescription at every node of the observation tree;
    since all branch probabilities are non-negative, minimizing over whole
    strategies equals minimizing node by node, which is what ``value`` does.
    After each observation the belief is mapped back to the belief grid:
    ``"nearest"`` snaps it, ``"linear"`` splits the continuation bilinearly
    over the four surrounding grid points.
    """

    def __init__(self, horizon: int, belief_steps: int = 20, prescription_steps: int = 4, mode: str = "nearest"):
        self.horizon = horizon
        self.belief_steps = belief_steps
        self.gammas = [(h, l) for h in levels(prescription_steps) for l in levels(prescription_steps)]
        self.mode = mode

    def _continuation(self, p1: Fraction, p2: Fraction, t: int) -> Fraction:
        n = self.belief_steps
        if self.mode == "nearest":
            return self.value(snap_exact(p1, n), snap_exact(p2, n), t)
        x, y = p1 * n, p2 * n
        i, j = min(math.floor(x), n - 1), min(math.floor(y), n - 1)
        fx, fy = x - i, y - j
        total = Fraction(0)
        for di, wx in ((0, 1 - fx), (1, fx)):
            for dj, wy in ((0, 1 - fy), (1, fy)):
                w = wx * wy
                if w:
                    total += w * self.value(Fraction(i + di, n), Fraction(j + dj, n), t)
        return total

    @lru_cache(maxsize=None)
    def value(self, b1: Fraction, b2: Fraction, t: int = 1) -> Fraction:
        if t > self.horizon:
            return Fraction(0)
        best = None
        for gh, gl in self.gammas:
            r1 = b1 * gh + (1 - b1) * gl
            r2 = b2 * gh + (1 - b2) * gl
            q = 1 - prob_exactly_one(r1, r2)
            for u1, u2 in itertools.product((False, True), repeat=2):
                p = (r1 if u1 else 1 - r1) * (r2 if u2 else 1 - r2)
                if p == 0:
                    continue
                p1 = posterior_exact(b1, gh, gl, u1)
                p2 = posterior_exact(b2, gh, gl, u2)
                q += p * self._continuation(p1, p2, t + 1)
            if best is None or q < best:
                best = q
        return best


def enumerate_two_stage_strategies(b1: float, b2: float, gammas, belief_steps: int = 20) -> float:
    """Literal minimum over every two-stage strategy (first prescription plus
    one second-stage prescription per first-stage observation), in floats.

    With ``m`` candidates this evaluates ``m ** 5`` strategies.
    """
    gammas = np.asarray(gammas, dtype=float)
    m = len(gammas)
    n = belief_steps

    def snap(x):
        return math.floor(x * n + 0.5 + 1e-9) / n

    def stage_cost(c1, c2, g):
        r1 = c1 * g[:, 0] + (1 - c1) * g[:, 1]
        r2 = c2 * g[:, 0] + (1 - c2) * g[:, 1]
        return 1 - (r1 * (1 - r2) + r2 * (1 - r1))

    best = math.inf
    for gh, gl in gammas:
        r1 = b1 * gh + (1 - b1) * gl
        r2 = b2 * gh + (1 - b2) * gl
        first = 1 - (r1 * (1 - r2) + r2 * (1 - r1))
        branch = []  # (probability, cost of each second-stage candidate)
        for u1, u2 in itertools.product((False, True), repeat=2):
            p = (r1 if u1 else 1 - r1) * (r2 if u2 else 1 - r2)
            post = []
            for b, u in ((b1, u1), (b2, u2)):
                lh, ll = (gh, gl) if u else (1 - gh, 1 - gl)
                den = b * lh + (1 - b) * ll
                post.append(snap(b * lh / den) if den > 0 else b)
            branch.append(p * stage_cost(post[0], post[1], gammas))
        # Every combination of second-stage choices, one per branch.
        total = (
            branch[0][:, None, None, None]
            + branch[1][None, :, None, None]
            + branch[2][None, None, :, None]
            + branch[3][None, None, None, :]
        )
        assert total.size == m**4
        best = min(best, first + float(total.min()))
    return best
