"""Core combinatorics of the 4x4 matching environment.

One human participant ("You", label Y) and three computerized participants
(R, S, T) are matched to four prizes (A, B, C, D) by deferred acceptance.
This module implements DA in both directions, the menu of obtainable prizes,
brute-force oracles used to cross-check the direct computations, and
validation of step-by-step GUI calculations against a canonical execution
schedule.

Everything here is a pure function of its inputs; all values are immutable
after construction, so unrestricted concurrent use is safe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

PRIZES = ("A", "B", "C", "D")
AGENTS = ("Y", "R", "S", "T")
COMPUTERIZED = ("R", "S", "T")
HUMAN = "Y"

#: Board-row key for the unpaired prize in the prize-proposing direction.
UNPAIRED_ROW = "U.P."

PARTICIPANT_PROPOSING = "participant-proposing"
PRIZE_PROPOSING_EXCLUDING = "prize-proposing-excluding"

Ranking = tuple[str, ...]
PriorityOrder = tuple[str, ...]

#: All 24 strict rankings of the four prizes, in lexicographic order.
ALL_RANKINGS: tuple[Ranking, ...] = tuple(itertools.permutations(PRIZES))


def _as_permutation(seq: Iterable[str], universe: Sequence[str], what: str) -> tuple[str, ...]:
    out = tuple(seq)
    if sorted(out) != sorted(universe):
        raise ValueError(f"{what} must be a permutation of {universe}, got {out!r}")
    return out


@dataclass(frozen=True, eq=True)
class Market:
    """Complete DA input: one ranking per agent, one priority order per prize.

    ``rankings`` maps each agent label to its strict ranking of the prizes,
    most preferred first.  ``priorities`` maps each prize label to its strict
    order over the agents, highest priority first.
    """

    rankings: Mapping[str, Ranking]
    priorities: Mapping[str, PriorityOrder]

    def __post_init__(self):
        if set(self.rankings) != set(AGENTS):
            raise ValueError(f"rankings must cover exactly {AGENTS}")
        if set(self.priorities) != set(PRIZES):
            raise ValueError(f"priorities must cover exactly {PRIZES}")
        object.__setattr__(self, "rankings", {
            a: _as_permutation(self.rankings[a], PRIZES, f"ranking of {a}") for a in AGENTS})
        object.__setattr__(self, "priorities", {
            p: _as_permutation(self.priorities[p], AGENTS, f"priority order of {p}") for p in PRIZES})

    def others(self) -> "OthersMarket":
        """Drop the human ranking, keeping the rest of the environment."""
        return OthersMarket(
            rankings={a: self.rankings[a] for a in COMPUTERIZED},
            priorities=self.priorities,
        )


@dataclass(frozen=True, eq=True)
class OthersMarket:
    """The environment without the human ranking: rankings for R, S, T only.

    Priority orders stay complete over all four agents; the prize-proposing
    direction restricts them to the computerized agents on the fly.
    """

    rankings: Mapping[str, Ranking]
    priorities: Mapping[str, PriorityOrder]

    def __post_init__(self):
        if set(self.rankings) != set(COMPUTERIZED):
            raise ValueError(f"rankings must cover exactly {COMPUTERIZED}")
        if set(self.priorities) != set(PRIZES):
            raise ValueError(f"priorities must cover exactly {PRIZES}")
        object.__setattr__(self, "rankings", {
            a: _as_permutation(self.rankings[a], PRIZES, f"ranking of {a}") for a in COMPUTERIZED})
        object.__setattr__(self, "priorities", {
            p: _as_permutation(self.priorities[p], AGENTS, f"priority order of {p}") for p in PRIZES})

    def with_ranking(self, y_ranking: Iterable[str]) -> Market:
        """Complete the market with a ranking for the human participant."""
        rankings = dict(self.rankings)
        rankings[HUMAN] = tuple(y_ranking)
        return Market(rankings=rankings, priorities=self.priorities)

    def restricted_priority(self, prize: str) -> tuple[str, ...]:
        """The prize's priority order with the human deleted."""
        return tuple(a for a in self.priorities[prize] if a != HUMAN)


@dataclass(frozen=True)
class ProposalEvent:
    """One proposal, in the order proposals are made under the canonical
    schedule.  ``accepted`` records the final disposition: True when the pair
    is still held at the end of the run, False when the proposal was
    (eventually) rejected."""

    proposer: str
    proposee: str
    accepted: bool


@dataclass(frozen=True)
class ProposalTrace:
    events: tuple[ProposalEvent, ...]

    @property
    def count(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class TempAllocation:
    """Outcome of prize-proposing DA among the computerized agents only:
    three prizes paired, exactly one prize left unpaired."""

    pairs: Mapping[str, str]  # prize -> agent
    unpaired: str

    def __post_init__(self):
        if set(self.pairs) | {self.unpaired} != set(PRIZES) or self.unpaired in self.pairs:
            raise ValueError("pairs plus the unpaired prize must partition the prizes")
        if sorted(self.pairs.values()) != sorted(COMPUTERIZED):
            raise ValueError("paired agents must be exactly the computerized agents")


#: receiver -> proposers currently targeting it (canonical proposer order).
BoardState = Mapping[str, tuple[str, ...]]


@dataclass(frozen=True)
class StepValidation:
    valid: bool
    cell: str | None = None
    reason: str | None = None


# ---------------------------------------------------------------------------
# Canonical schedule engine
#
# Step 0 pairs every proposer with its top choice simultaneously.  Each later
# step resolves exactly one conflict (a receiver holding two or more
# proposers): the lowest-labeled conflicted receiver keeps its best proposer
# and rejects the rest, and every rejected proposer immediately re-targets
# the next entry of its own list within the same step's aftermath.  A
# proposer whose list is exhausted moves to the unpaired row (prize-proposing
# direction only).  Conflicts created by re-targeting are resolved at later
# steps.  The final matching and the total proposal count do not depend on
# this scheduling choice; the schedule exists so that step-by-step GUI
# submissions have a well-defined right answer.
# ---------------------------------------------------------------------------


def _schedule_run(
    proposers: Sequence[str],
    receivers: Sequence[str],
    pref: Mapping[str, Sequence[str]],
    recv_rank: Mapping[str, Mapping[str, int]],
    track_unpaired: bool,
):
    """Run DA under the canonical schedule.

    Returns (states, events, holdings) where ``states`` is the board state
    after step 0, 1, ..., ``events`` the proposals in the order made as
    (proposer, receiver) pairs, and ``holdings`` the final receiver ->
    proposer map.
    """
    nxt = {p: 1 for p in proposers}
    target: dict[str, str | None] = {}
    events: list[tuple[str, str]] = []
    for p in proposers:
        target[p] = pref[p][0]
        events.append((p, pref[p][0]))

    def board() -> dict[str, tuple[str, ...]]:
        state = {r: tuple(p for p in proposers if target[p] == r) for r in receivers}
        if track_unpaired:
            state[UNPAIRED_ROW] = tuple(p for p in proposers if target[p] is None)
        return state

    states = [board()]
    while True:
        conflict = None
        for r in receivers:
            if sum(1 for p in proposers if target[p] == r) >= 2:
                conflict = r
                break
        if conflict is None:
            break
        holders = [p for p in proposers if target[p] == conflict]
        keep = min(holders, key=lambda p: recv_rank[conflict][p])
        for p in holders:
            if p is keep:
                continue
            if nxt[p] == len(pref[p]):
                if not track_unpaired:
                    raise AssertionError("proposer exhausted a complete list")
                target[p] = None
            else:
                nxt_receiver = pref[p][nxt[p]]
                nxt[p] += 1
                target[p] = nxt_receiver
                events.append((p, nxt_receiver))
        states.append(board())

    holdings = {r: p for p in proposers for r in receivers if target[p] == r}
    return states, events, holdings


def _trace(events: list[tuple[str, str]], holdings: Mapping[str, str]) -> ProposalTrace:
    final = {(p, r) for r, p in holdings.items()}
    return ProposalTrace(tuple(
        ProposalEvent(p, r, (p, r) in final) for p, r in events))


def _pp_inputs(market: Market):
    recv_rank = {p: {a: i for i, a in enumerate(market.priorities[p])} for p in PRIZES}
    return AGENTS, PRIZES, market.rankings, recv_rank


def _ppe_inputs(others: OthersMarket):
    pref = {p: others.restricted_priority(p) for p in PRIZES}
    recv_rank = {a: {p: i for i, p in enumerate(others.rankings[a])} for a in COMPUTERIZED}
    return PRIZES, COMPUTERIZED, pref, recv_rank


def run_da_participant_proposing(market: Market) -> tuple[dict[str, str], ProposalTrace]:
    """Participant-proposing DA: agents propose to prizes in ranking order.

    Returns the proposer-optimal stable matching as an agent -> prize map,
    together with the proposal trace of the canonical schedule.
    """
    proposers, receivers, pref, recv_rank = _pp_inputs(market)
    _, events, holdings = _schedule_run(proposers, receivers, pref, recv_rank, False)
    matching = {agent: prize for prize, agent in holdings.items()}
    return matching, _trace(events, holdings)


def run_da_prize_proposing_excluding(others: OthersMarket) -> tuple[TempAllocation, ProposalTrace]:
    """Prize-proposing DA with the human deleted from every priority order.

    The four prizes propose to the three computerized agents; each agent
    tentatively holds the proposing prize it ranks highest.  Exactly one
    prize ends unpaired after proposing to all three agents.
    """
    proposers, receivers, pref, recv_rank = _ppe_inputs(others)
    _, events, holdings = _schedule_run(proposers, receivers, pref, recv_rank, True)
    pairs = {prize: agent for agent, prize in holdings.items()}
    (unpaired,) = [p for p in PRIZES if p not in pairs]
    return TempAllocation(pairs=pairs, unpaired=unpaired), _trace(events, holdings)


def canonical_schedule(scenario: Market | OthersMarket, direction: str) -> list[dict[str, tuple[str, ...]]]:
    """Board states of the canonical schedule, index 0 through the final step."""
    if direction == PARTICIPANT_PROPOSING:
        if isinstance(scenario, OthersMarket):
            raise ValueError("participant-proposing direction needs the complete market")
        states, _, _ = _schedule_run(*_pp_inputs(scenario), False)
    elif direction == PRIZE_PROPOSING_EXCLUDING:
        others = scenario.others() if isinstance(scenario, Market) else scenario
        states, _, _ = _schedule_run(*_ppe_inputs(others), True)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return states


def validate_gui_step(
    scenario: Market | OthersMarket,
    direction: str,
    submitted: Mapping[str, Iterable[str]],
    step_index: int,
) -> StepValidation:
    """Check a submitted board state against the canonical schedule.

    ``submitted`` maps receiver rows to the proposers placed there; missing
    rows count as empty, and order within a row does not matter.  Raises
    IndexError when ``step_index`` is outside the schedule.
    """
    schedule = canonical_schedule(scenario, direction)
    if not 0 <= step_index < len(schedule):
        raise IndexError(
            f"step index {step_index} outside schedule of length {len(schedule)}")
    expected = schedule[step_index]
    known = set(expected)
    for row in submitted:
        if row not in known:
            return StepValidation(False, cell=row, reason=f"unknown row {row!r}")
    for row in expected:  # canonical receiver order, unpaired row last
        want = set(expected[row])
        got = set(submitted.get(row, ()))
        if want != got:
            return StepValidation(
                False, cell=row,
                reason=f"row {row} holds {sorted(got)}, expected {sorted(want)}")
    return StepValidation(True)


# ---------------------------------------------------------------------------
# Menus
# ---------------------------------------------------------------------------


def compute_menu(temp: TempAllocation, priorities: Mapping[str, PriorityOrder]) -> frozenset[str]:
    """Obtainable prizes: the unpaired prize, plus every prize whose priority
    order places the human above the agent it is temporarily paired to."""
    menu = {temp.unpaired}
    for prize, holder in temp.pairs.items():
        order = priorities[prize]
        if order.index(HUMAN) < order.index(holder):
            menu.add(prize)
    return frozenset(menu)


def menu_best(menu: Iterable[str], ranking: Sequence[str]) -> str:
    """The menu element the ranking places highest."""
    chosen = set(menu)
    if not chosen:
        raise ValueError("menu must be nonempty")
    for prize in ranking:
        if prize in chosen:
            return prize
    raise ValueError(f"menu {sorted(chosen)} disjoint from ranking {ranking!r}")


def menu_of(others: OthersMarket) -> frozenset[str]:
    """Menu computed through the prize-proposing temporary allocation."""
    temp, _ = run_da_prize_proposing_excluding(others)
    return compute_menu(temp, others.priorities)


# ---------------------------------------------------------------------------
# Fast integer core and brute-force oracles
#
# The schedule engine above is the readable reference path.  The oracle
# workloads (24 counterfactual rankings per market, tens of thousands of
# markets) use a compact integer-indexed DA; tests assert the two paths
# agree on every market they touch.
# ---------------------------------------------------------------------------

_PERM4 = tuple(itertools.permutations(range(4)))
_PRIZE_INDEX = {p: i for i, p in enumerate(PRIZES)}
_AGENT_INDEX = {a: i for i, a in enumerate(AGENTS)}


def _da_int(pref, recv_rank, n_receivers):
    """DA on integer indices.  ``pref[p]`` lists receiver indices in proposal
    order; ``recv_rank[r][p]`` ranks proposers from the receiver's side.
    Returns (held, count) with ``held[r]`` the winning proposer (-1 never
    happens for complete lists) and ``count`` the number of proposals."""
    nxt = [0] * len(pref)
    held = [-1] * n_receivers
    free = list(range(len(pref) - 1, -1, -1))
    count = 0
    while free:
        p = free.pop()
        if nxt[p] == len(pref[p]):
            continue  # exhausted: stays unpaired
        r = pref[p][nxt[p]]
        nxt[p] += 1
        count += 1
        h = held[r]
        if h < 0:
            held[r] = p
        elif recv_rank[r][p] < recv_rank[r][h]:
            held[r] = p
            free.append(h)
        else:
            free.append(p)
    return held, count


def _pp_tables(others: OthersMarket):
    """Integer tables for participant-proposing DA with a variable Y ranking."""
    base_pref = [None] * 4
    for a in COMPUTERIZED:
        base_pref[_AGENT_INDEX[a]] = tuple(_PRIZE_INDEX[p] for p in others.rankings[a])
    recv_rank = []
    for p in PRIZES:
        row = [0] * 4
        for pos, a in enumerate(others.priorities[p]):
            row[_AGENT_INDEX[a]] = pos
        recv_rank.append(tuple(row))
    return base_pref, tuple(recv_rank)


def all_y_outcomes(others: OthersMarket) -> dict[Ranking, str]:
    """Y's prize under participant-proposing DA for each of the 24 rankings."""
    base_pref, recv_rank = _pp_tables(others)
    out = {}
    for perm in _PERM4:
        pref = list(base_pref)
        pref[0] = perm
        held, _ = _da_int(pref, recv_rank, 4)
        out[tuple(PRIZES[i] for i in perm)] = PRIZES[held.index(0)]
    return out


def achievable_set_bruteforce(others: OthersMarket) -> frozenset[str]:
    """Prizes the human can reach across all 24 rankings, by full DA runs."""
    return frozenset(all_y_outcomes(others).values())


def is_stable(matching: Mapping[str, str], market: Market) -> bool:
    """True when no agent-prize pair blocks the matching."""
    holder = {prize: agent for agent, prize in matching.items()}
    for agent in AGENTS:
        ranking = market.rankings[agent]
        matched_pos = ranking.index(matching[agent])
        for pos in range(matched_pos):
            prize = ranking[pos]
            order = market.priorities[prize]
            if order.index(agent) < order.index(holder[prize]):
                return False
    return True


def run_da_random_order(market_or_others, direction: str, rng) -> tuple[dict[str, str] | TempAllocation, int]:
    """Execute DA processing free proposers in an arbitrary (seeded) order.

    Used to demonstrate that matchings and proposal counts are invariant to
    the execution schedule.  Returns (outcome, proposal count).
    """
    if direction == PARTICIPANT_PROPOSING:
        proposers, receivers, pref, recv_rank = _pp_inputs(market_or_others)
    elif direction == PRIZE_PROPOSING_EXCLUDING:
        others = (market_or_others.others()
                  if isinstance(market_or_others, Market) else market_or_others)
        proposers, receivers, pref, recv_rank = _ppe_inputs(others)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    nxt = {p: 0 for p in proposers}
    held: dict[str, str] = {}
    free = list(proposers)
    count = 0
    while free:
        p = free.pop(int(rng.integers(len(free))))
        if nxt[p] == len(pref[p]):
            continue
        r = pref[p][nxt[p]]
        nxt[p] += 1
        count += 1
        h = held.get(r)
        if h is None:
            held[r] = p
        elif recv_rank[r][p] < recv_rank[r][h]:
            held[r] = p
            free.append(h)
        else:
            free.append(p)
    if direction == PARTICIPANT_PROPOSING:
        return {agent: prize for prize, agent in held.items()}, count
    pairs = {prize: agent for agent, prize in held.items()}
    (unpaired,) = [p for p in PRIZES if p not in pairs]
    return TempAllocation(pairs=pairs, unpaired=unpaired), count


def proposal_count_identity(market_or_others, direction: str) -> int:
    """The sum-of-ranks proposal count: every proposer contributes the rank of
    its final partner in its own list, and an unpaired prize contributes the
    full length of its restricted list."""
    if direction == PARTICIPANT_PROPOSING:
        matching, _ = run_da_participant_proposing(market_or_others)
        return sum(
            market_or_others.rankings[a].index(matching[a]) + 1 for a in AGENTS)
    others = (market_or_others.others()
              if isinstance(market_or_others, Market) else market_or_others)
    temp, _ = run_da_prize_proposing_excluding(others)
    total = len(COMPUTERIZED)  # the unpaired prize proposed to everyone
    for prize, agent in temp.pairs.items():
        total += others.restricted_priority(prize).index(agent) + 1
    return total
