"""Question grading: the consistent-menu oracle, banks, and scoring.

The abstract understanding questions put the grader in the participant's
information set: having submitted a ranking and received a prize, which
menus of obtainable prizes are consistent with that observation?  A
counterfactual ("had I submitted L' instead...") is *possible* when some
consistent menu produces the target under L', and *certain* when every one
does.  Grading over menus rather than over full environments is exactly as
strong: tests cross-check that any concrete environment consistent with the
observation yields a counterfactual outcome inside the grader's possible
set.

Scoring implements the comprehension-bonus rules: most questions pay their
full value on a correct first attempt only; whole-calculation GUI questions
pay 5 on the first attempt and 2 on the second.  The headline fractions
(%TR, %SP-U with its Abstract/Practical split) count first-attempt-correct
answers over fixed banks, so an unanswered question counts as incorrect.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .market import (
    PRIZES,
    Market,
    OthersMarket,
    canonical_schedule,
    menu_best,
    validate_gui_step,
)

#: All nonempty prize subsets, smallest first, used by the menu oracle.
_ALL_MENUS = tuple(
    frozenset(combo)
    for r in range(1, 5)
    for combo in itertools.combinations(PRIZES, r)
)

POSSIBLE = "possible"
CERTAIN = "certain"


@dataclass(frozen=True)
class Observation:
    """What the participant knows after a round: own ranking and own prize."""

    submitted: tuple[str, ...]
    received: str

    def __post_init__(self):
        object.__setattr__(self, "submitted", tuple(self.submitted))
        if sorted(self.submitted) != sorted(PRIZES):
            raise ValueError(f"submitted must be a ranking of {PRIZES}")
        if self.received not in self.submitted:
            raise ValueError(f"received prize {self.received!r} not in the ranking")


@dataclass(frozen=True)
class CounterfactualQuery:
    observation: Observation
    alternative: tuple[str, ...]
    target: str
    modality: str

    def __post_init__(self):
        object.__setattr__(self, "alternative", tuple(self.alternative))
        if sorted(self.alternative) != sorted(PRIZES):
            raise ValueError(f"alternative must be a ranking of {PRIZES}")
        _check_target_and_modality(self.target, self.modality)


@dataclass(frozen=True)
class ExistentialQuery:
    observation: Observation
    target: str
    modality: str

    def __post_init__(self):
        _check_target_and_modality(self.target, self.modality)


def _check_target_and_modality(target: str, modality: str) -> None:
    if target not in PRIZES:
        raise ValueError(f"unknown prize {target!r}")
    if modality not in (POSSIBLE, CERTAIN):
        raise ValueError(f"modality must be {POSSIBLE!r} or {CERTAIN!r}")


def consistent_menus(obs: Observation) -> frozenset[frozenset[str]]:
    """Every nonempty menu that reproduces the observation.

    Equivalently: menus containing the received prize and nothing the
    participant ranked above it (the lower-ranked prizes are free).
    """
    return frozenset(
        m for m in _ALL_MENUS if menu_best(m, obs.submitted) == obs.received)


def counterfactual_outcomes(obs: Observation, alternative: Sequence[str]) -> frozenset[str]:
    """Prizes the alternative ranking could have produced, over all
    consistent menus."""
    return frozenset(menu_best(m, alternative) for m in consistent_menus(obs))


def grade_counterfactual(q: CounterfactualQuery) -> bool:
    outcomes = counterfactual_outcomes(q.observation, q.alternative)
    if q.modality == POSSIBLE:
        return q.target in outcomes
    return outcomes == {q.target}


def grade_existential(q: ExistentialQuery) -> bool:
    menus = consistent_menus(q.observation)
    if q.modality == POSSIBLE:
        return any(q.target in m for m in menus)
    return all(q.target in m for m in menus)


# ---------------------------------------------------------------------------
# Question bank
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointRule:
    """Points for a correct answer by attempt number; attempts beyond the
    second never pay."""

    first: int
    second: int = 0


#: Attempt policies enforced by the session engine.
SINGLE = "single"            # one recorded attempt, advance regardless
UNTIL_CORRECT = "until-correct"  # blocks until the right answer arrives
THREE_REVEAL = "three-reveal"    # three attempts, then reveal and advance

#: Question kinds.  "counterfactual" and "existential" carry a query payload
#: and get their key computed by the oracle at bank-build time.
KINDS = (
    "info", "tf", "mc", "practical", "attention", "counterfactual",
    "existential", "menu-select", "gui-step", "gui-full", "cognitive",
    "demographics",
)


@dataclass(frozen=True)
class Question:
    id: str
    kind: str
    prompt: str
    options: tuple[str, ...] = ()
    key: Any = None
    points: PointRule = PointRule(1)
    attempts: str = UNTIL_CORRECT
    screen: str = ""
    treatment: str | None = None
    payload: Mapping[str, Any] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown question kind {self.kind!r}")
        object.__setattr__(self, "options", tuple(self.options))


def _query_from_payload(payload: Mapping[str, Any]):
    obs = Observation(
        submitted=tuple(payload["observation"]["submitted"]),
        received=payload["observation"]["received"])
    if "alternative" in payload:
        return CounterfactualQuery(
            observation=obs, alternative=tuple(payload["alternative"]),
            target=payload["target"], modality=payload["modality"])
    return ExistentialQuery(
        observation=obs, target=payload["target"], modality=payload["modality"])


def computed_key(question: Question) -> Any:
    """The oracle-derived key for query-backed questions; stored keys
    otherwise."""
    if question.kind in ("counterfactual", "existential"):
        q = _query_from_payload(question.payload)
        graded = (grade_counterfactual(q) if isinstance(q, CounterfactualQuery)
                  else grade_existential(q))
        return "Yes" if graded else "No"
    return question.key


class ScenarioLookup:
    """Resolves the scenario references inside GUI question payloads."""

    def __init__(self, scenarios: Mapping[str, Market | OthersMarket]):
        self._scenarios = dict(scenarios)

    def __getitem__(self, ref: str) -> Market | OthersMarket:
        return self._scenarios[ref]


def grade_answer(
    question: Question,
    answer: Any,
    scenarios: ScenarioLookup | None = None,
) -> bool:
    """Grade one answer.  GUI kinds need a scenario lookup; board answers are
    receiver -> proposers mappings as accepted by validate_gui_step."""
    kind = question.kind
    if kind in ("info", "demographics"):
        return True
    if kind in ("gui-step", "gui-full"):
        if scenarios is None:
            raise ValueError("GUI questions need a scenario lookup to grade")
        scenario = scenarios[question.payload["scenario"]]
        direction = question.payload["direction"]
        if kind == "gui-step":
            step = question.payload["step"]
        else:
            step = len(canonical_schedule(scenario, direction)) - 1
        if not isinstance(answer, Mapping):
            return False
        return validate_gui_step(scenario, direction, answer, step).valid
    if kind == "menu-select":
        if isinstance(answer, (str, bytes)) or not isinstance(answer, Iterable):
            return False
        return set(answer) == set(question.key)
    if kind == "cognitive":
        try:
            return int(str(answer).strip()) == int(question.key)
        except (TypeError, ValueError):
            return False
    key = computed_key(question)
    return isinstance(answer, str) and answer.strip() == key


def expected_answer(question: Question, scenarios: ScenarioLookup | None = None) -> Any:
    """The canonical answer, in the shape a submission would take.  Used for
    the reveal after a third failed GUI attempt."""
    kind = question.kind
    if kind in ("gui-step", "gui-full"):
        scenario = scenarios[question.payload["scenario"]]
        direction = question.payload["direction"]
        schedule = canonical_schedule(scenario, direction)
        step = question.payload["step"] if kind == "gui-step" else len(schedule) - 1
        return {row: list(holders) for row, holders in schedule[step].items()}
    if kind == "menu-select":
        return sorted(question.key)
    return computed_key(question)


class QuestionBank:
    """Immutable collection of questions with id lookup and metric slices."""

    def __init__(self, questions: Iterable[Question]):
        self._questions = tuple(questions)
        self._by_id = {}
        for q in self._questions:
            if q.id in self._by_id:
                raise ValueError(f"duplicate question id {q.id!r}")
            self._by_id[q.id] = q

    def __iter__(self):
        return iter(self._questions)

    def __len__(self):
        return len(self._questions)

    def __contains__(self, question_id: str) -> bool:
        return question_id in self._by_id

    def get(self, question_id: str) -> Question:
        try:
            return self._by_id[question_id]
        except KeyError:
            raise KeyError(f"unknown question id {question_id!r}") from None

    def for_treatment(self, treatment: str | None) -> tuple[Question, ...]:
        """Questions a session of this treatment can encounter."""
        return tuple(
            q for q in self._questions
            if q.treatment is None or q.treatment == treatment)

    def training_questions(self, treatment: str | None) -> tuple[Question, ...]:
        """The %TR bank: treatment training-round questions, attention
        checks excluded."""
        return tuple(
            q for q in self.for_treatment(treatment)
            if q.screen.startswith("training-") and q.kind not in ("attention", "info"))

    def spu_abstract(self) -> tuple[Question, ...]:
        return tuple(
            q for q in self._questions
            if q.screen.startswith("spu-") and q.kind in ("counterfactual", "existential"))

    def spu_practical(self) -> tuple[Question, ...]:
        return tuple(
            q for q in self._questions
            if q.screen.startswith("spu-") and q.kind == "practical")

    def cognitive_questions(self) -> tuple[Question, ...]:
        return tuple(q for q in self._questions if q.kind == "cognitive")

    def attention_questions(self) -> tuple[Question, ...]:
        """The two planted attention checks common to every treatment."""
        return tuple(
            q for q in self._questions
            if q.kind == "attention" and q.treatment is None)


def grade_practical(bank: QuestionBank, statement_id: str, response: str) -> bool:
    """Compare a True/False response against a practical statement's key."""
    question = bank.get(statement_id)
    if question.kind != "practical":
        raise ValueError(f"{statement_id!r} is not a practical statement")
    return grade_answer(question, response)


def random_benchmark(questions: Iterable[Question]) -> float:
    """Expected first-attempt score of answering uniformly at random."""
    qs = list(questions)
    if not qs:
        raise ValueError("benchmark over an empty question list")
    total = 0.0
    for q in qs:
        if not q.options:
            raise ValueError(f"question {q.id!r} has no finite option set")
        total += 1 / len(q.options)
    return total / len(qs)


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoreReport:
    """Counts behind the three headline fractions plus the earned bonus.

    Denominators are bank sizes, not answered counts, so skipped questions
    count as incorrect and the decomposition identity
    spu = (13 * abstract + 5 * practical) / 18 is exact for the default bank.
    """

    tr_correct: int
    tr_total: int
    abstract_correct: int
    abstract_total: int
    practical_correct: int
    practical_total: int
    cognitive_correct: int
    cognitive_total: int
    attention_correct: int
    attention_total: int
    points_earned: int
    points_max: int
    bonus: int  # hundredths of the currency unit

    @property
    def tr(self) -> float:
        return self.tr_correct / self.tr_total if self.tr_total else 0.0

    @property
    def abstract(self) -> float:
        return self.abstract_correct / self.abstract_total if self.abstract_total else 0.0

    @property
    def practical(self) -> float:
        return self.practical_correct / self.practical_total if self.practical_total else 0.0

    @property
    def spu(self) -> float:
        total = self.abstract_total + self.practical_total
        return (self.abstract_correct + self.practical_correct) / total if total else 0.0

    @property
    def spu_exact(self) -> Fraction:
        total = self.abstract_total + self.practical_total
        return Fraction(self.abstract_correct + self.practical_correct, total) if total else Fraction(0)


def _round_half_up(numerator: int, denominator: int) -> int:
    """Round numerator/denominator to the nearest integer, halves upward."""
    return (2 * numerator + denominator) // (2 * denominator)


def round_bonus(budget: int, earned: int, maximum: int) -> int:
    """Bonus in hundredths: budget scaled by the earned-points fraction,
    rounded half-up to a hundredth."""
    if maximum <= 0 or earned <= 0:
        return 0
    return _round_half_up(budget * earned, maximum)


def points_for(rule: PointRule, correct_attempt: int | None) -> int:
    if correct_attempt == 1:
        return rule.first
    if correct_attempt == 2:
        return rule.second
    return 0


def score_event_log(
    records: Iterable[Mapping[str, Any]],
    bank: QuestionBank,
    bonus_budget: int = 450,
    treatment: str | None = None,
) -> ScoreReport:
    """Recompute a ScoreReport from serialized event records.

    Uses only (question id, attempt, correct) triples plus the session
    header's treatment, so replaying a log always reproduces the report.
    Raises on ids outside the bank, non-ascending attempt numbers, and
    answers arriving after a question was already answered correctly.
    """
    first_correct: dict[str, int | None] = {}
    last_attempt: dict[str, int] = {}
    for rec in records:
        if rec.get("kind") == "session-created" and treatment is None:
            treatment = rec.get("response", {}).get("treatment")
        qid = rec.get("question")
        if qid is None or rec.get("correct") is None:
            continue
        question = bank.get(qid)
        attempt = rec.get("attempt")
        if attempt is None or attempt <= last_attempt.get(qid, 0):
            raise ValueError(f"attempt numbers for {qid!r} must ascend")
        if first_correct.get(qid) is not None:
            raise ValueError(f"{qid!r} answered again after a correct answer")
        last_attempt[qid] = attempt
        if rec["correct"]:
            first_correct[qid] = attempt
        else:
            first_correct.setdefault(qid, None)

    def first_attempt_correct(question: Question) -> bool:
        return first_correct.get(question.id) == 1

    tr_bank = bank.training_questions(treatment)
    abstract = bank.spu_abstract()
    practical = bank.spu_practical()
    cognitive = bank.cognitive_questions()
    attention = bank.attention_questions()

    points_earned = 0
    for qid, attempt in first_correct.items():
        points_earned += points_for(bank.get(qid).points, attempt)
    points_max = sum(q.points.first for q in bank.for_treatment(treatment))

    return ScoreReport(
        tr_correct=sum(first_attempt_correct(q) for q in tr_bank),
        tr_total=len(tr_bank),
        abstract_correct=sum(first_attempt_correct(q) for q in abstract),
        abstract_total=len(abstract),
        practical_correct=sum(first_attempt_correct(q) for q in practical),
        practical_total=len(practical),
        cognitive_correct=sum(first_attempt_correct(q) for q in cognitive),
        cognitive_total=len(cognitive),
        attention_correct=sum(first_attempt_correct(q) for q in attention),
        attention_total=len(attention),
        points_earned=points_earned,
        points_max=points_max,
        bonus=round_bonus(bonus_budget, points_earned, points_max),
    )
