"""Behavior analysis over event logs, plus synthetic populations.

The unit of input is a serialized event log (list of record dicts, as
produced by Session.serialized_log or read back from a JSONL file).  Round
environments are not stored in logs; they are re-derived from the header's
seed and sampler settings, so analysis can never drift from what the engine
showed the participant.

Strategy classification follows the value-rank convention: position i of a
pattern is the value-rank of the prize ranked i-th, so (1, 2, 3, 4) is the
straightforward ranking and (2, 1, 3, 4) flips the two highest-earning
prizes.

Standard errors: fractions get the plug-in binomial formula sqrt(p(1-p)/n),
bin means get the sample-standard-deviation formula, and the round-trend
slope gets an HC1 heteroskedasticity-robust squared-residual sandwich.
"""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .content import TREATMENTS
from .market import PRIZES
from .questions import QuestionBank, ScoreReport, expected_answer, score_event_log
from .sampler import RoundSpec, SamplerConfig, ValueProfile, rng_for, sample_session_rounds
from .session import Session, SessionConfig

SF_PATTERN = (1, 2, 3, 4)


def classify_pattern(ranking: Sequence[str], values: ValueProfile) -> tuple[int, ...]:
    """Map a submitted ranking to value-rank space."""
    value_rank = {p: i + 1 for i, p in enumerate(values.value_order())}
    return tuple(value_rank[p] for p in ranking)


def is_sf(ranking: Sequence[str], values: ValueProfile) -> bool:
    return classify_pattern(ranking, values) == SF_PATTERN


# ---------------------------------------------------------------------------
# Round conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoundFlags:
    """Conditions under which non-straightforward play is often rationalized.

    low_value_gap needs a corpus-wide threshold and is None when the flags
    were computed for a single round in isolation.
    """

    not_top_priority_at_best: bool
    lower_than_some_other_priority: bool
    low_value_gap: bool | None = None


def value_gap(spec: RoundSpec) -> int:
    """Value difference between the two highest-earning prizes, hundredths."""
    order = spec.values.value_order()
    return spec.values.values[order[0]] - spec.values.values[order[1]]


def gap_median(specs: Iterable[RoundSpec]) -> float:
    gaps = [value_gap(s) for s in specs]
    if not gaps:
        raise ValueError("gap median over an empty corpus")
    return float(np.median(gaps))


def round_condition_flags(spec: RoundSpec,
                          gap_threshold: float | None = None) -> RoundFlags:
    best = spec.values.best_prize()
    at_best = spec.priorities[best].index("Y")
    elsewhere = [spec.priorities[p].index("Y") for p in PRIZES if p != best]
    return RoundFlags(
        not_top_priority_at_best=at_best != 0,
        lower_than_some_other_priority=any(pos < at_best for pos in elsewhere),
        # Ties go low: a gap exactly at the median counts as a low gap.
        low_value_gap=(None if gap_threshold is None
                       else value_gap(spec) <= gap_threshold),
    )


def corpus_round_flags(specs: Sequence[RoundSpec]) -> list[RoundFlags]:
    """Two-pass flags: the low-gap threshold is this corpus's median gap."""
    threshold = gap_median(specs)
    return [round_condition_flags(s, threshold) for s in specs]


# ---------------------------------------------------------------------------
# Log ingestion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoundPlay:
    session: str
    treatment: str
    round: int
    ranking: tuple[str, ...]
    spec: RoundSpec
    pattern: tuple[int, ...]
    sf: bool
    prize: str
    earned: int


def _header(records: Sequence[Mapping[str, Any]]) -> Mapping[str, Any]:
    if not records or records[0].get("kind") != "session-created":
        raise ValueError("log must start with a session-created record")
    return records[0]


def rounds_for_log(records: Sequence[Mapping[str, Any]]) -> tuple[RoundSpec, ...]:
    header = _header(records)["response"]
    config = header.get("config", {})
    sampler = SamplerConfig(
        r1=config.get("r1", 1.7), r2=config.get("r2", 0.5),
        seed=header["seed"])
    return sample_session_rounds(sampler, config.get("n_real_rounds", 10))


def round_plays(records: Sequence[Mapping[str, Any]]) -> list[RoundPlay]:
    header = _header(records)
    rounds = rounds_for_log(records)
    plays = []
    for record in records:
        if record.get("kind") != "ranking":
            continue
        number = int(record["screen"].rsplit("-", 1)[1])
        spec = rounds[number - 1]
        ranking = tuple(record["response"]["ranking"])
        pattern = classify_pattern(ranking, spec.values)
        plays.append(RoundPlay(
            session=record["session"], treatment=header["response"]["treatment"],
            round=number, ranking=ranking, spec=spec, pattern=pattern,
            sf=pattern == SF_PATTERN, prize=record["outcome"]["prize"],
            earned=record["outcome"]["earned"]))
    return plays


# ---------------------------------------------------------------------------
# Participant metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParticipantMetrics:
    participant: str
    treatment: str
    sf: float
    spu: float
    abstract: float
    practical: float
    tr: float
    cognitive: int
    attention: int

    def __post_init__(self):
        for name in ("sf", "spu", "abstract", "practical", "tr"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a fraction, got {value}")


def participant_metrics(records: Sequence[Mapping[str, Any]],
                        bank: QuestionBank,
                        report: ScoreReport | None = None) -> ParticipantMetrics:
    header = _header(records)
    if report is None:
        report = score_event_log(records, bank)
    plays = round_plays(records)
    n_rounds = header["response"].get("config", {}).get("n_real_rounds", 10)
    return ParticipantMetrics(
        participant=header["session"],
        treatment=header["response"]["treatment"],
        sf=sum(p.sf for p in plays) / n_rounds,
        spu=report.spu,
        abstract=report.abstract,
        practical=report.practical,
        tr=report.tr,
        cognitive=report.cognitive_correct,
        attention=report.attention_correct,
    )


def aggregate_metrics(logs: Iterable[Sequence[Mapping[str, Any]]],
                      bank: QuestionBank) -> list[ParticipantMetrics]:
    return [participant_metrics(log, bank) for log in logs]


# ---------------------------------------------------------------------------
# Aggregate tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SFBin:
    spu: float
    count: int
    mean_sf: float | None
    se: float | None


def conditional_sf_by_spu(metrics: Sequence[ParticipantMetrics],
                          n_items: int = 18) -> list[SFBin]:
    """Mean %SF at each attainable understanding score (0/n .. n/n)."""
    by_bin: dict[int, list[float]] = defaultdict(list)
    for m in metrics:
        by_bin[round(m.spu * n_items)].append(m.sf)
    table = []
    for k in range(n_items + 1):
        values = by_bin.get(k, [])
        if not values:
            table.append(SFBin(k / n_items, 0, None, None))
            continue
        se = (float(np.std(values, ddof=1)) / len(values) ** 0.5
              if len(values) > 1 else None)
        table.append(SFBin(k / n_items, len(values),
                           float(np.mean(values)), se))
    return table


def sf_by_spu_split(metrics: Sequence[ParticipantMetrics],
                    threshold: float = 0.75) -> tuple[float, float]:
    """Mean %SF for participants below / at-or-above the %SP-U threshold."""
    below = [m.sf for m in metrics if m.spu < threshold]
    above = [m.sf for m in metrics if m.spu >= threshold]
    if not below or not above:
        raise ValueError("both sides of the split need participants")
    return float(np.mean(below)), float(np.mean(above))


QUADRANTS = ("low-low", "low-high", "high-low", "high-high")


@dataclass(frozen=True)
class QuadrantTable:
    """Population split by (%SP-U, %SF) at a common threshold; the quadrant
    key names the SP-U side first and "high" means at or above."""

    threshold: float
    counts: dict[str, int]
    fractions: dict[str, float]
    ses: dict[str, float]


def quadrant_fractions(metrics: Sequence[ParticipantMetrics],
                       threshold: float = 0.75) -> QuadrantTable:
    if not metrics:
        raise ValueError("quadrants over an empty population")
    counts = {q: 0 for q in QUADRANTS}
    for m in metrics:
        key = ("high" if m.spu >= threshold else "low",
               "high" if m.sf >= threshold else "low")
        counts["-".join(key)] += 1
    n = len(metrics)
    fractions = {q: counts[q] / n for q in QUADRANTS}
    ses = {q: (fractions[q] * (1 - fractions[q]) / n) ** 0.5 for q in QUADRANTS}
    return QuadrantTable(threshold, counts, fractions, ses)


def pattern_histogram(plays: Iterable[RoundPlay | tuple[int, ...]]) -> dict[tuple[int, ...], float]:
    patterns = Counter(
        p.pattern if isinstance(p, RoundPlay) else tuple(p) for p in plays)
    total = sum(patterns.values())
    if total == 0:
        raise ValueError("histogram over an empty play list")
    return {pattern: count / total for pattern, count in patterns.items()}


@dataclass(frozen=True)
class TrendFit:
    slope: float
    se: float
    n_obs: int


def _ols_hc1(x: np.ndarray, y: np.ndarray) -> TrendFit:
    X = np.column_stack([np.ones_like(x), x])
    xtx_inv = np.linalg.inv(X.T @ X)
    beta = xtx_inv @ (X.T @ y)
    resid = y - X @ beta
    n, k = X.shape
    meat = (X * (resid ** 2)[:, None]).T @ X * (n / (n - k))
    cov = xtx_inv @ meat @ xtx_inv
    return TrendFit(float(beta[1]), float(np.sqrt(cov[1, 1])), n)


def sf_round_trend(plays: Sequence[RoundPlay]) -> dict[str, TrendFit]:
    """Per-treatment OLS slope of the SF indicator on round number."""
    by_treatment: dict[str, list[RoundPlay]] = defaultdict(list)
    for play in plays:
        by_treatment[play.treatment].append(play)
    fits = {}
    for treatment, group in sorted(by_treatment.items()):
        x = np.array([p.round for p in group], dtype=float)
        y = np.array([1.0 if p.sf else 0.0 for p in group])
        fits[treatment] = _ols_hc1(x, y)
    return fits


# ---------------------------------------------------------------------------
# Synthetic populations
# ---------------------------------------------------------------------------

POLICY_KINDS = ("always-sf", "flip-top-two", "uniform-random", "fixed", "trend")


@dataclass(frozen=True)
class PolicyGroup:
    """One stratum of a synthetic population.

    "fixed" plays straightforwardly in exactly sf_rounds of the rounds and
    answers exactly spu_correct of the understanding items; "trend" plays SF
    in round r when the member's quantile is below base + slope*(r-1);
    "flip-top-two" misreports by swapping the two highest-earning prizes
    whenever the participant lacks top priority at the best prize.
    """

    name: str
    kind: str
    count: int | None = None
    weight: float | None = None
    sf_rounds: int = 10
    spu_correct: int = 18
    base: float = 0.4
    slope: float = 0.02

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.count is None and self.weight is None:
            raise ValueError("give either count or weight")


def _group_sizes(policies: Sequence[PolicyGroup], n: int) -> list[int]:
    if all(p.count is not None for p in policies):
        sizes = [p.count for p in policies]
        if sum(sizes) != n:
            raise ValueError(f"group counts sum to {sum(sizes)}, expected {n}")
        return sizes
    weights = [p.weight if p.weight is not None else 0.0 for p in policies]
    total = sum(weights)
    raw = [w / total * n for w in weights]
    sizes = [int(r) for r in raw]
    remainders = sorted(range(len(raw)), key=lambda i: raw[i] - sizes[i],
                        reverse=True)
    for i in remainders[: n - sum(sizes)]:
        sizes[i] += 1
    return sizes


def _flip_top_two(order: tuple[str, ...]) -> tuple[str, ...]:
    return (order[1], order[0]) + order[2:]


def _policy_ranking(group: PolicyGroup, member: int, group_size: int,
                    round_no: int, spec: RoundSpec, rng,
                    sf_set: frozenset[int]) -> tuple[str, ...]:
    order = spec.values.value_order()
    if group.kind == "always-sf":
        return order
    if group.kind == "uniform-random":
        return tuple(str(p) for p in rng.permutation(list(PRIZES)))
    if group.kind == "flip-top-two":
        flags = round_condition_flags(spec)
        return _flip_top_two(order) if flags.not_top_priority_at_best else order
    if group.kind == "fixed":
        return order if round_no in sf_set else _flip_top_two(order)
    quantile = (member + 0.5) / group_size
    threshold = group.base + group.slope * (round_no - 1)
    return order if quantile <= threshold else _flip_top_two(order)


def _drive_session(session: Session, group: PolicyGroup, member: int,
                   group_size: int, rng, sf_set: frozenset[int]) -> None:
    spu_remaining = group.spu_correct
    while session.status == "active":
        screen = session.current_screen()
        if screen.kind == "real-round":
            number = screen.payload["round"]
            ranking = _policy_ranking(
                group, member, group_size, number,
                session.rounds[number - 1], rng, sf_set)
            session.submit_response({"ranking": list(ranking)})
            continue
        questions = screen.payload.get("questions", ())
        if not questions:
            session.submit_response({"ack": True})
            continue
        for shown in questions:
            question = session.bank.get(shown["id"])
            good = expected_answer(question, session.scenarios)
            scored_spu = (screen.kind == "spu-screen"
                          and question.kind != "attention")
            if scored_spu and spu_remaining <= 0:
                wrong = {"Yes": "No", "No": "Yes",
                         "True": "False", "False": "True"}[good]
                session.submit_response({"question": shown["id"],
                                         "answer": wrong})
                continue
            if scored_spu:
                spu_remaining -= 1
            session.submit_response({"question": shown["id"], "answer": good})


def simulate_population(
    policies: Sequence[PolicyGroup],
    n: int,
    seed: int,
    treatments: Sequence[str] = TREATMENTS,
    config: SessionConfig | None = None,
    bank: QuestionBank | None = None,
) -> list[list[dict]]:
    """Drive n synthetic participants through real sessions; returns their
    serialized event logs, deterministically in (policies, n, seed)."""
    config = config or SessionConfig()
    sizes = _group_sizes(policies, n)
    logs: list[list[dict]] = []
    participant = 0
    for group, size in zip(policies, sizes):
        for member in range(size):
            session_seed = int(rng_for(seed, 3, participant).integers(2 ** 31))
            rng = rng_for(seed, 9, participant)
            sf_positions = rng_for(seed, 5, participant).permutation(
                config.n_real_rounds)[: group.sf_rounds]
            sf_set = frozenset(int(r) + 1 for r in sf_positions)
            session = Session(
                treatments[participant % len(treatments)], config,
                session_seed, bank=bank, clock=_step_clock(),
                session_id=f"sim-{seed}-{participant:04d}")
            _drive_session(session, group, member, size, rng, sf_set)
            logs.append(session.serialized_log())
            participant += 1
    return logs


def _step_clock():
    """Deterministic timestamps so simulated logs are byte-stable."""
    t = [0.0]

    def tick() -> float:
        t[0] += 1.0
        return t[0]

    return tick


# ---------------------------------------------------------------------------
# File outputs
# ---------------------------------------------------------------------------

METRICS_COLUMNS = ("participant", "treatment", "sf", "spu", "abstract",
                   "practical", "tr", "cognitive", "attention", "ebrd")


def write_metrics_csv(path: str | Path,
                      metrics: Sequence[ParticipantMetrics]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_COLUMNS)
        for m in metrics:
            # The alternative-classification column awaits an external
            # predicate; it is emitted so downstream schemas are stable.
            writer.writerow([
                m.participant, m.treatment, f"{m.sf:.3f}", f"{m.spu:.4f}",
                f"{m.abstract:.4f}", f"{m.practical:.4f}", f"{m.tr:.4f}",
                m.cognitive, m.attention, "unclassified"])


def write_conditional_csv(path: str | Path, table: Sequence[SFBin]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("spu", "count", "mean_sf", "se"))
        for row in table:
            writer.writerow([
                f"{row.spu:.4f}", row.count,
                "" if row.mean_sf is None else f"{row.mean_sf:.4f}",
                "" if row.se is None else f"{row.se:.4f}"])


def render_report(metrics: Sequence[ParticipantMetrics],
                  plays: Sequence[RoundPlay]) -> str:
    """Plain-text summary of a corpus: per-treatment means, quadrants at
    0.75, the most common misreport pattern, and round trends."""
    lines = [f"participants: {len(metrics)}   round plays: {len(plays)}", ""]
    by_treatment: dict[str, list[ParticipantMetrics]] = defaultdict(list)
    for m in metrics:
        by_treatment[m.treatment].append(m)
    lines.append("treatment        n    %SF    %SP-U  %TR")
    for treatment in sorted(by_treatment):
        ms = by_treatment[treatment]
        lines.append(
            f"{treatment:<15}{len(ms):>4}"
            f"{np.mean([m.sf for m in ms]):>8.3f}"
            f"{np.mean([m.spu for m in ms]):>8.3f}"
            f"{np.mean([m.tr for m in ms]):>6.3f}")
    quadrants = quadrant_fractions(metrics)
    lines.append("")
    lines.append("quadrants (SP-U, SF at 0.75): " + "  ".join(
        f"{q}={quadrants.fractions[q]:.3f}" for q in QUADRANTS))
    histogram = pattern_histogram(plays)
    nsf = {p: f for p, f in histogram.items() if p != SF_PATTERN}
    if nsf:
        top = max(nsf, key=nsf.get)
        lines.append(f"most common misreport pattern: {list(top)}"
                     f" ({nsf[top]:.3f} of plays)")
    for treatment, fit in sf_round_trend(plays).items():
        lines.append(
            f"SF-by-round slope, {treatment}: {fit.slope:+.4f}"
            f" (robust SE {fit.se:.4f}, n={fit.n_obs})")
    return "\n".join(lines) + "\n"
