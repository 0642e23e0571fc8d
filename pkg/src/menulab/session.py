"""Treatment session state machine with an append-only event log.

A session walks a fixed screen sequence: consent, the game description, two
practice-question rounds, the treatment's mechanism description, three
training rounds, ten incentivized rounds, the four understanding-test
screens, and the exit battery.  Every submission appends one or more event
records; replaying the driving records through a fresh engine reproduces the
log exactly (timestamps aside), which is what makes logs the storage format
of record.

Information discipline: training screens disclose the whole scenario, real
rounds serialize only prize values and priorities.  The computerized
rankings, and anything derived from them, never leave the engine during an
incentivized round; the participant learns their own prize and nothing else.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import asdict, dataclass
from typing import Any, Callable, Iterable, Mapping

from .content import (
    CONSENT_TEXT,
    DESCRIPTIONS,
    NULL_DESCRIPTION,
    NULL_TRAINING_SCENARIO,
    TRAINING_SCENARIOS,
    TREATMENT_DIRECTION,
    TREATMENTS,
    default_bank,
    scenario_lookup,
)
from .market import PRIZES, run_da_participant_proposing
from .questions import (
    SINGLE,
    THREE_REVEAL,
    Question,
    QuestionBank,
    ScoreReport,
    expected_answer,
    grade_answer,
    points_for,
    round_bonus,
    score_event_log,
)
from .sampler import SamplerConfig, sample_session_rounds
from .serialize import (
    LOG_SCHEMA,
    bank_fingerprint,
    market_to_dict,
    question_to_dict,
)


class SessionError(Exception):
    """Base for session-flow violations."""


class OutOfOrderError(SessionError):
    """The response does not address the current screen, question, or
    sequence number."""


class CompletedError(SessionError):
    """The session has already reached its end screen."""


class ReplayError(SessionError):
    """A log did not reproduce itself through a fresh engine."""


@dataclass(frozen=True)
class SessionConfig:
    currency: str = "$"
    bonus_budget: int = 450  # hundredths
    n_real_rounds: int = 10
    r1: float = 1.7
    r2: float = 0.5

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SessionConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True)
class ScreenSpec:
    id: str
    kind: str
    payload: Mapping[str, Any]


@dataclass(frozen=True)
class Feedback:
    correct: bool | None = None
    points: int = 0
    reveal: Any = None
    prize: str | None = None
    earned: int | None = None
    cumulative_earnings: int | None = None
    advanced: bool = False
    completed: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EventRecord:
    session: str
    seq: int
    ts: float
    kind: str
    screen: str
    question: str | None = None
    attempt: int | None = None
    response: Any = None
    correct: bool | None = None
    points: int = 0
    outcome: Mapping[str, Any] | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def screen_ids(n_real_rounds: int) -> tuple[str, ...]:
    return (
        "consent", "null-description", "null-training-1", "null-training-2",
        "description", "training-1", "training-2", "training-3",
        *(f"real-{k}" for k in range(1, n_real_rounds + 1)),
        "spu-1", "spu-2", "spu-3", "spu-4", "exit", "end",
    )


def screen_kind(screen_id: str) -> str:
    if screen_id.startswith("null-training-"):
        return "null-training"
    if screen_id.startswith("training-"):
        return "training-round"
    if screen_id.startswith("real-"):
        return "real-round"
    if screen_id.startswith("spu-"):
        return "spu-screen"
    return {
        "consent": "consent",
        "null-description": "null-description",
        "description": "treatment-description",
        "exit": "exit",
        "end": "end",
    }[screen_id]


def _scenario_payload(scenario) -> dict:
    data = market_to_dict(scenario.market)
    data["values"] = dict(scenario.values.values)
    data["id"] = scenario.id
    return data


class Session:
    """One participant's run through a treatment.

    All mutation goes through submit_response under the session lock; the
    event list is append-only and iterating a snapshot of it is safe while
    another thread writes.
    """

    def __init__(
        self,
        treatment: str,
        config: SessionConfig | None = None,
        seed: int = 0,
        bank: QuestionBank | None = None,
        clock: Callable[[], float] | None = None,
        session_id: str | None = None,
    ):
        if treatment not in TREATMENTS:
            raise ValueError(f"unknown treatment {treatment!r}")
        self.id = session_id or uuid.uuid4().hex[:12]
        self.treatment = treatment
        self.config = config or SessionConfig()
        self.seed = seed
        self.bank = bank if bank is not None else default_bank()
        self.clock = clock or time.time
        self.rounds = sample_session_rounds(
            SamplerConfig(r1=self.config.r1, r2=self.config.r2, seed=seed),
            self.config.n_real_rounds)
        self.scenarios = scenario_lookup()
        self.status = "active"
        self._screens = screen_ids(self.config.n_real_rounds)
        self._cursor = 0
        self._attempts: dict[str, int] = {}
        self._points: dict[str, int] = {}
        self._resolved: set[str] = set()
        self._events: list[EventRecord] = []
        self._replies: dict[int, tuple[Any, Feedback]] = {}
        self._earnings: list[int] = []
        self._lock = threading.RLock()
        self._append(
            "session-created",
            response={
                "treatment": treatment,
                "seed": seed,
                "schema": LOG_SCHEMA,
                "config": self.config.to_dict(),
                "bank": bank_fingerprint(self.bank),
            })

    # -- projections --------------------------------------------------------

    @property
    def cursor(self) -> int:
        return self._cursor

    @property
    def points_earned(self) -> int:
        return sum(self._points.values())

    @property
    def points_max(self) -> int:
        return sum(q.points.first for q in self.bank.for_treatment(self.treatment))

    @property
    def round_earnings(self) -> tuple[int, ...]:
        return tuple(self._earnings)

    @property
    def cumulative_earnings(self) -> int:
        return sum(self._earnings)

    @property
    def bonus(self) -> int:
        return round_bonus(
            self.config.bonus_budget, self.points_earned, self.points_max)

    def attempts_used(self, question_id: str) -> int:
        return self._attempts.get(question_id, 0)

    def event_log(self) -> list[EventRecord]:
        return list(self._events)

    def serialized_log(self) -> list[dict]:
        return [record.to_dict() for record in self._events]

    @property
    def next_seq(self) -> int:
        return len(self._events)

    def score_report(self) -> ScoreReport:
        return score_event_log(
            self.serialized_log(), self.bank,
            bonus_budget=self.config.bonus_budget, treatment=self.treatment)

    def _screen_questions(self, screen_id: str) -> tuple[Question, ...]:
        return tuple(
            q for q in self.bank.for_treatment(self.treatment)
            if q.screen == screen_id)

    def current_screen(self) -> ScreenSpec:
        screen_id = self._screens[self._cursor]
        return ScreenSpec(screen_id, screen_kind(screen_id),
                          self._payload_for(screen_id))

    def _public_questions(self, screen_id: str) -> list[dict]:
        return [
            dict(question_to_dict(q, include_key=False),
                 resolved=q.id in self._resolved,
                 attempts_used=self.attempts_used(q.id))
            for q in self._screen_questions(screen_id)
        ]

    def _payload_for(self, screen_id: str) -> dict:
        kind = screen_kind(screen_id)
        if kind == "consent":
            return {"text": CONSENT_TEXT}
        if kind == "null-description":
            return {"paragraphs": list(NULL_DESCRIPTION)}
        if kind == "treatment-description":
            return {"treatment": self.treatment,
                    "paragraphs": list(DESCRIPTIONS[self.treatment])}
        if kind == "null-training":
            return {"scenario": _scenario_payload(NULL_TRAINING_SCENARIO),
                    "questions": self._public_questions(screen_id)}
        if kind == "training-round":
            rnd = int(screen_id.rsplit("-", 1)[1])
            return {
                "round": rnd,
                "scenario": _scenario_payload(TRAINING_SCENARIOS[f"s{rnd}"]),
                "direction": TREATMENT_DIRECTION[self.treatment],
                "reminder": list(DESCRIPTIONS[self.treatment]),
                "questions": self._public_questions(screen_id),
            }
        if kind == "real-round":
            rnd = int(screen_id.rsplit("-", 1)[1])
            spec = self.rounds[rnd - 1]
            return {
                "round": rnd,
                "values": dict(spec.values.values),
                "priorities": {p: list(o) for p, o in spec.priorities.items()},
                "currency": self.config.currency,
                "cumulative_earnings": self.cumulative_earnings,
                "reminder": list(DESCRIPTIONS[self.treatment]),
            }
        if kind == "spu-screen":
            return {"questions": self._public_questions(screen_id)}
        if kind == "exit":
            return {"questions": self._public_questions(screen_id)}
        return {"summary": self._summary()}

    def _summary(self) -> dict:
        return {
            "points_earned": self.points_earned,
            "points_max": self.points_max,
            "bonus": self.bonus,
            "round_earnings": self.cumulative_earnings,
            "total": self.cumulative_earnings + self.bonus,
            "currency": self.config.currency,
        }

    # -- mutation -----------------------------------------------------------

    def _append(self, kind: str, **fields) -> EventRecord:
        record = EventRecord(
            session=self.id, seq=len(self._events), ts=self.clock(),
            kind=kind, screen=self._screens[self._cursor], **fields)
        self._events.append(record)
        return record

    def _advance(self) -> bool:
        self._cursor += 1
        if self._screens[self._cursor] == "end":
            self._append("session-completed", response=self._summary())
            self.status = "completed"
            return True
        return False

    def submit_response(self, response: Mapping[str, Any],
                        client_seq: int | None = None) -> Feedback:
        """Apply one response to the current screen.

        ``client_seq`` is the caller's view of the next event sequence
        number.  A repeat of an already-applied (seq, response) pair returns
        the original feedback without reapplying, so network retries are
        harmless; any other disagreement raises OutOfOrderError.
        """
        if not isinstance(response, Mapping):
            raise ValueError("response must be a mapping")
        with self._lock:
            if client_seq is not None:
                if client_seq < self.next_seq:
                    stored = self._replies.get(client_seq)
                    if stored is not None and stored[0] == dict(response):
                        return stored[1]
                    raise OutOfOrderError(
                        f"sequence {client_seq} already consumed")
                if client_seq > self.next_seq:
                    raise OutOfOrderError(
                        f"sequence {client_seq} is ahead of the log")
            applied_at = self.next_seq
            feedback = self._apply(response)
            if client_seq is not None:
                self._replies[applied_at] = (dict(response), feedback)
            return feedback

    def _apply(self, response: Mapping[str, Any]) -> Feedback:
        if self.status != "active":
            raise CompletedError("session already completed")
        screen_id = self._screens[self._cursor]
        kind = screen_kind(screen_id)
        if kind == "real-round":
            return self._apply_ranking(screen_id, response)
        questions = self._screen_questions(screen_id)
        if kind in ("consent", "null-description", "treatment-description") \
                or not questions:
            return self._apply_ack(response)
        return self._apply_answer(screen_id, questions, response)

    def _apply_ack(self, response: Mapping[str, Any]) -> Feedback:
        if response.get("ack") is not True:
            raise ValueError("this screen expects {'ack': true}")
        self._append("ack", response={"ack": True})
        completed = self._advance()
        return Feedback(advanced=True, completed=completed)

    def _apply_answer(self, screen_id: str, questions: tuple[Question, ...],
                      response: Mapping[str, Any]) -> Feedback:
        qid = response.get("question")
        by_id = {q.id: q for q in questions}
        if qid not in by_id:
            raise OutOfOrderError(
                f"question {qid!r} is not on screen {screen_id!r}")
        if qid in self._resolved:
            raise OutOfOrderError(f"question {qid!r} was already answered")
        if "answer" not in response:
            raise ValueError("missing 'answer'")
        question = by_id[qid]
        answer = response["answer"]
        attempt = self._attempts.get(qid, 0) + 1
        self._attempts[qid] = attempt
        correct = grade_answer(question, answer, self.scenarios)
        awarded = points_for(question.points, attempt) if correct else 0
        if awarded:
            self._points[qid] = awarded
        self._append(
            "answer", question=qid, attempt=attempt,
            response={"answer": _plain(answer)}, correct=correct,
            points=awarded)
        reveal = None
        if correct:
            self._resolved.add(qid)
        elif question.attempts == SINGLE:
            self._resolved.add(qid)
        elif question.attempts == THREE_REVEAL and attempt >= 3:
            reveal = expected_answer(question, self.scenarios)
            self._resolved.add(qid)
            self._append("reveal", question=qid,
                         response={"answer": _plain(reveal)})
        advanced = all(q.id in self._resolved for q in questions)
        completed = self._advance() if advanced else False
        return Feedback(correct=correct, points=awarded, reveal=reveal,
                        advanced=advanced, completed=completed)

    def _apply_ranking(self, screen_id: str,
                       response: Mapping[str, Any]) -> Feedback:
        ranking = response.get("ranking")
        if (not isinstance(ranking, (list, tuple))
                or sorted(ranking) != sorted(PRIZES)):
            raise ValueError(f"ranking must order the prizes {PRIZES}")
        ranking = tuple(ranking)
        rnd = int(screen_id.rsplit("-", 1)[1])
        spec = self.rounds[rnd - 1]
        market = spec.others().with_ranking(ranking)
        matching, _ = run_da_participant_proposing(market)
        prize = matching["Y"]
        earned = spec.values.values[prize]
        self._earnings.append(earned)
        self._append(
            "ranking", response={"ranking": list(ranking)},
            outcome={"prize": prize, "earned": earned})
        completed = self._advance()
        return Feedback(prize=prize, earned=earned,
                        cumulative_earnings=self.cumulative_earnings,
                        advanced=True, completed=completed)


def create_session(treatment: str, config: SessionConfig | None = None,
                   seed: int = 0, **kwargs) -> Session:
    return Session(treatment, config, seed, **kwargs)


def current_screen(session: Session) -> ScreenSpec:
    return session.current_screen()


def submit_response(session: Session, response: Mapping[str, Any],
                    client_seq: int | None = None) -> Feedback:
    return session.submit_response(response, client_seq)


def event_log(session: Session) -> list[EventRecord]:
    return session.event_log()


#: Event kinds that drive state; the rest are emitted by the engine.
DRIVING_KINDS = ("ack", "answer", "ranking")


def driving_response(record: Mapping[str, Any]) -> dict:
    """The submit_response payload that produced an event record."""
    kind = record["kind"]
    if kind == "ack":
        return {"ack": True}
    if kind == "answer":
        return {"question": record["question"],
                "answer": record["response"]["answer"]}
    if kind == "ranking":
        return {"ranking": record["response"]["ranking"]}
    raise ValueError(f"{kind!r} records do not drive state")


def logs_equal(a: Iterable[Mapping[str, Any]], b: Iterable[Mapping[str, Any]],
               ignore: tuple[str, ...] = ("ts",)) -> bool:
    strip = lambda rec: {k: v for k, v in rec.items() if k not in ignore}
    a, b = list(a), list(b)
    return len(a) == len(b) and all(strip(x) == strip(y) for x, y in zip(a, b))


def replay(records: Iterable[Mapping[str, Any]],
           bank: QuestionBank | None = None) -> Session:
    """Rebuild a session from its serialized log, verifying every step.

    Raises ReplayError when the log was not produced by this engine and
    bank: wrong header, diverging records, or a bank whose fingerprint does
    not match the one the header pinned.
    """
    records = [dict(r) for r in records]
    if not records or records[0].get("kind") != "session-created":
        raise ReplayError("log must start with a session-created record")
    header = records[0]["response"]
    session = Session(
        header["treatment"], SessionConfig.from_dict(header["config"]),
        header["seed"], bank=bank, session_id=records[0].get("session"))
    if header.get("bank") != bank_fingerprint(session.bank):
        raise ReplayError("question bank does not match the log header")
    for record in records:
        if record["kind"] in DRIVING_KINDS:
            try:
                session.submit_response(driving_response(record))
            except (SessionError, ValueError, KeyError) as exc:
                raise ReplayError(
                    f"record {record['seq']} failed to apply: {exc}") from exc
    if not logs_equal(session.serialized_log(), records):
        raise ReplayError("replayed log diverges from the recorded log")
    return session


def _plain(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_plain(v) for v in value]
    return value
