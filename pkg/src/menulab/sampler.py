"""Seeded sampling of incentivized rounds.

A round consists of a money value per prize for the human participant, a
priority order per prize, and a ranking for each computerized agent, drawn
jointly as follows:

* Values: one draw from each of the four tiers 90..99, 50..89, 10..49 and
  0..9 (integer hundredths of the currency unit), assigned to the prize
  labels by a uniform random bijection.
* Priorities: for each prize, agents are drawn sequentially without
  replacement from highest priority to lowest.  At the highest-valued prize
  every remaining computerized agent carries weight ``r1`` against weight 1
  for the human, at every step; all other prizes use equal weights.
* Computerized rankings: independently per agent, built top-down; at each
  step a remaining prize is selected with weight ``r2 ** (P - 1)`` where P
  is its ordinal position among the remaining prizes ordered by the human's
  value, highest first.  P is recomputed as prizes are removed.

RNG contract: all draws come from numpy's PCG64 generator seeded through
``numpy.random.SeedSequence([seed, *indices])``.  Identical (seed, indices)
produce identical rounds on every platform for a fixed numpy version.  Each
sampling call owns its generator; no state is shared, so sampling different
rounds in parallel is safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .market import COMPUTERIZED, HUMAN, PRIZES, OthersMarket

#: Value tiers in integer hundredths, highest first: (low, high) inclusive.
VALUE_TIERS = ((90, 99), (50, 89), (10, 49), (0, 9))


def rng_for(seed: int, *indices: int) -> np.random.Generator:
    """The package-wide generator for a seed and a stream index path."""
    return np.random.default_rng([seed, *indices])


@dataclass(frozen=True)
class SamplerConfig:
    r1: float = 1.7
    r2: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if not self.r1 > 0:
            raise ValueError("r1 must be positive")
        if not 0 < self.r2 <= 1:
            raise ValueError("r2 must be in (0, 1]")


@dataclass(frozen=True)
class ValueProfile:
    """Money value per prize, in integer hundredths."""

    values: Mapping[str, int]

    def __post_init__(self):
        if set(self.values) != set(PRIZES):
            raise ValueError(f"values must cover exactly {PRIZES}")
        tiers = sorted(self.values.values(), reverse=True)
        for v, (lo, hi) in zip(tiers, VALUE_TIERS):
            if not lo <= v <= hi:
                raise ValueError(
                    f"values must hit one point in every tier {VALUE_TIERS}, got {self.values}")

    def best_prize(self) -> str:
        return max(PRIZES, key=lambda p: self.values[p])

    def value_order(self) -> tuple[str, ...]:
        """Prizes from highest to lowest value (the straightforward ranking)."""
        return tuple(sorted(PRIZES, key=lambda p: -self.values[p]))


@dataclass(frozen=True)
class RoundSpec:
    """One incentivized round: the environment minus the human's ranking."""

    values: ValueProfile
    priorities: Mapping[str, tuple[str, ...]]
    rankings: Mapping[str, tuple[str, ...]]  # R, S, T
    seed: tuple[int, ...] = ()  # seed-sequence entropy that produced the draw

    def others(self) -> OthersMarket:
        return OthersMarket(rankings=self.rankings, priorities=self.priorities)


def _weighted_pick(rng: np.random.Generator, items: Sequence, weights: Sequence[float]):
    """One sequential draw: a single uniform against cumulative weights."""
    total = 0.0
    cum = []
    for w in weights:
        total += w
        cum.append(total)
    u = rng.random() * total
    for item, c in zip(items, cum):
        if u < c:
            return item
    return items[-1]


def sample_values(rng: np.random.Generator) -> ValueProfile:
    """Draw one value per tier and assign them to prizes uniformly."""
    draws = [int(rng.integers(lo, hi + 1)) for lo, hi in VALUE_TIERS]
    order = rng.permutation(4)
    return ValueProfile(values={PRIZES[int(j)]: draws[i] for i, j in enumerate(order)})


def sample_priorities(
    rng: np.random.Generator, values: ValueProfile, r1: float = 1.7,
) -> dict[str, tuple[str, ...]]:
    """Sequential without-replacement priority draw for every prize.

    The highest-valued prize tilts each step against the human: every
    remaining computerized agent has an ``r1``-times higher chance than the
    human of being picked for the next-highest priority position.
    """
    best = values.best_prize()
    priorities = {}
    for prize in PRIZES:
        remaining = ["Y", "R", "S", "T"]
        order = []
        while len(remaining) > 1:
            if prize == best:
                weights = [1.0 if a == HUMAN else r1 for a in remaining]
            else:
                weights = [1.0] * len(remaining)
            pick = _weighted_pick(rng, remaining, weights)
            remaining.remove(pick)
            order.append(pick)
        order.append(remaining[0])
        priorities[prize] = tuple(order)
    return priorities


def sample_computerized_rankings(
    rng: np.random.Generator, values: ValueProfile, r2: float = 0.5,
) -> dict[str, tuple[str, ...]]:
    """Top-down ranking draw for each computerized agent.

    Weights follow ``r2 ** (P - 1)`` with P the prize's current position
    among the remaining prizes sorted by the human's value, highest first,
    recomputed after every removal.  Small r2 therefore drags computerized
    rankings toward the human's value order.
    """
    rankings = {}
    for agent in COMPUTERIZED:
        remaining = list(values.value_order())
        order = []
        while len(remaining) > 1:
            weights = [r2 ** pos for pos in range(len(remaining))]
            pick = _weighted_pick(rng, remaining, weights)
            remaining.remove(pick)
            order.append(pick)
        order.append(remaining[0])
        rankings[agent] = tuple(order)
    return rankings


def sample_round(config: SamplerConfig, index: int = 0) -> RoundSpec:
    """Compose the three samplers; deterministic in (config.seed, index)."""
    rng = rng_for(config.seed, index)
    values = sample_values(rng)
    priorities = sample_priorities(rng, values, config.r1)
    rankings = sample_computerized_rankings(rng, values, config.r2)
    return RoundSpec(
        values=values, priorities=priorities, rankings=rankings,
        seed=(config.seed, index))


def sample_session_rounds(config: SamplerConfig, n: int = 10) -> list[RoundSpec]:
    """The round sequence a session plays: stream indices 0 .. n-1."""
    return [sample_round(config, i) for i in range(n)]
