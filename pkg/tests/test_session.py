import json

import pytest

from menulab.content import TREATMENTS, default_bank
from menulab.market import run_da_participant_proposing
from menulab.questions import QuestionBank, expected_answer
from menulab.session import (
    CompletedError,
    OutOfOrderError,
    ReplayError,
    Session,
    SessionConfig,
    create_session,
    logs_equal,
    replay,
    screen_ids,
)

BANK = default_bank()


def fixed_clock():
    t = [1000.0]

    def tick():
        t[0] += 1.0
        return t[0]

    return tick


def make_session(treatment="Trad-DA", seed=5, **kwargs):
    kwargs.setdefault("bank", BANK)
    kwargs.setdefault("clock", fixed_clock())
    return create_session(treatment, SessionConfig(), seed, **kwargs)


def answer_current_questions(session, wrong_first=()):
    """Resolve every question on the current screen, optionally flubbing the
    first attempt of the given question ids."""
    screen = session.current_screen()
    for q in list(screen.payload["questions"]):
        if q["resolved"]:
            continue
        question = session.bank.get(q["id"])
        good = expected_answer(question, session.scenarios)
        if q["id"] in wrong_first:
            bad = "No" if good == "Yes" else "wrong-on-purpose"
            session.submit_response({"question": q["id"], "answer": bad})
            if question.attempts == "single":
                continue
        session.submit_response({"question": q["id"], "answer": good})


def autopilot(session, ranking_for=None, wrong_first=()):
    """Drive a session to completion; rankings default to truthful."""
    while session.status == "active":
        screen = session.current_screen()
        if screen.kind == "real-round":
            rnd = screen.payload["round"]
            if ranking_for is not None:
                ranking = ranking_for(session, rnd)
            else:
                ranking = session.rounds[rnd - 1].values.value_order()
            session.submit_response({"ranking": list(ranking)})
        elif "questions" in screen.payload and screen.payload["questions"]:
            answer_current_questions(session, wrong_first)
        else:
            session.submit_response({"ack": True})
    return session


def test_screen_sequence():
    assert screen_ids(2) == (
        "consent", "null-description", "null-training-1", "null-training-2",
        "description", "training-1", "training-2", "training-3",
        "real-1", "real-2", "spu-1", "spu-2", "spu-3", "spu-4", "exit", "end")


def test_fresh_session_starts_at_consent():
    session = make_session()
    screen = session.current_screen()
    assert (screen.id, screen.kind) == ("consent", "consent")
    assert session.current_screen() == screen  # pure projection
    assert session.event_log()[0].kind == "session-created"


def test_unknown_treatment_rejected():
    with pytest.raises(ValueError):
        make_session(treatment="Shuffle")


def test_header_determinism():
    a = make_session(seed=9, session_id="fixed")
    b = make_session(seed=9, session_id="fixed")
    assert logs_equal(a.serialized_log(), b.serialized_log())


def test_rounds_identical_across_treatments():
    rounds = [make_session(treatment=t, seed=21).rounds for t in TREATMENTS]
    assert all(r == rounds[0] for r in rounds[1:])


def test_training_payload_carries_direction_and_scenario():
    session = autopilot_to(make_session("Menu-DA"), "training-1")
    payload = session.current_screen().payload
    assert payload["direction"] == "prize-proposing-excluding"
    assert payload["scenario"]["id"] == "s1"
    assert "rankings" in payload["scenario"]  # training is fully disclosed
    assert all("key" not in q for q in payload["questions"])


def autopilot_to(session, screen_id):
    while session.current_screen().id != screen_id:
        screen = session.current_screen()
        if screen.kind == "real-round":
            order = session.rounds[screen.payload["round"] - 1].values.value_order()
            session.submit_response({"ranking": list(order)})
        elif screen.payload.get("questions"):
            answer_current_questions(session)
        else:
            session.submit_response({"ack": True})
    return session


def test_null_training_third_round_has_no_questions():
    session = autopilot_to(make_session("Null"), "training-3")
    screen = session.current_screen()
    assert screen.payload["questions"] == []
    feedback = session.submit_response({"ack": True})
    assert feedback.advanced
    assert session.current_screen().id == "real-1"


def test_null_description_repeats_for_null_treatment():
    session = make_session("Null")
    session.submit_response({"ack": True})
    null_desc = session.current_screen()
    session.submit_response({"ack": True})
    autopilot_to(session, "description")
    assert session.current_screen().payload["paragraphs"] == null_desc.payload["paragraphs"]


def test_until_correct_blocks_until_correct():
    session = autopilot_to(make_session(), "null-training-1")
    feedback = session.submit_response({"question": "nt1/q1", "answer": "False"})
    assert feedback.correct is False and not feedback.advanced
    assert session.current_screen().id == "null-training-1"
    feedback = session.submit_response({"question": "nt1/q1", "answer": "True"})
    assert feedback.correct is True and feedback.points == 0  # second attempt
    assert session.attempts_used("nt1/q1") == 2


def test_three_reveal_gui_question():
    session = autopilot_to(make_session("Trad-DA"), "training-1")
    bad = {"A": ["Y"], "B": ["R"], "C": ["S"], "D": ["T"]}
    first = session.submit_response({"question": "trad-da/tr1/step0", "answer": bad})
    assert first.correct is False and first.reveal is None
    second = session.submit_response({"question": "trad-da/tr1/step0", "answer": bad})
    assert second.reveal is None
    third = session.submit_response({"question": "trad-da/tr1/step0", "answer": bad})
    assert third.correct is False
    assert third.reveal == expected_answer(
        session.bank.get("trad-da/tr1/step0"), session.scenarios)
    assert session.attempts_used("trad-da/tr1/step0") == 3
    with pytest.raises(OutOfOrderError):
        session.submit_response({"question": "trad-da/tr1/step0", "answer": bad})
    kinds = [r.kind for r in session.event_log()[-4:]]
    assert kinds == ["answer", "answer", "answer", "reveal"]


def test_whole_gui_points_five_then_two():
    session = autopilot_to(make_session("Trad-DA"), "training-2")
    qid = "trad-da/tr2/full"
    good = expected_answer(session.bank.get(qid), session.scenarios)
    session.submit_response({"question": qid, "answer": {"A": ["Y", "R", "S", "T"]}})
    feedback = session.submit_response({"question": qid, "answer": good})
    assert feedback.correct is True and feedback.points == 2


def test_spu_questions_are_single_shot():
    session = autopilot_to(make_session("Menu-SP"), "spu-1")
    feedback = session.submit_response({"question": "spu/a1", "answer": "Yes"})
    assert feedback.correct is False and feedback.points == 0
    with pytest.raises(OutOfOrderError):
        session.submit_response({"question": "spu/a1", "answer": "No"})
    feedback = session.submit_response({"question": "spu/a2", "answer": "Yes"})
    assert feedback.correct is True and feedback.points == 2


def test_real_round_outcome_and_earnings():
    session = autopilot_to(make_session(seed=13), "real-1")
    payload = session.current_screen().payload
    assert set(payload) == {"round", "values", "priorities", "currency",
                            "cumulative_earnings", "reminder"}
    spec = session.rounds[0]
    ranking = spec.values.value_order()
    market = spec.others().with_ranking(tuple(ranking))
    expected_prize = run_da_participant_proposing(market)[0]["Y"]
    feedback = session.submit_response({"ranking": list(ranking)})
    assert feedback.prize == expected_prize
    assert feedback.earned == spec.values.values[expected_prize]
    assert feedback.cumulative_earnings == feedback.earned
    assert session.current_screen().id == "real-2"
    assert session.current_screen().payload["cumulative_earnings"] == feedback.earned


def all_keys(obj):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield k
            yield from all_keys(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            yield from all_keys(v)


def test_real_round_payload_never_mentions_rankings():
    for treatment in ("Trad-DA", "Menu-DA"):
        session = autopilot_to(make_session(treatment, seed=3), "real-1")
        for rnd in range(1, 11):
            payload = session.current_screen().payload
            assert not {"rankings", "menu"} & set(all_keys(payload))
            order = session.rounds[rnd - 1].values.value_order()
            session.submit_response({"ranking": list(order)})


def test_malformed_inputs():
    session = make_session()
    with pytest.raises(ValueError):
        session.submit_response({"nod": True})
    session.submit_response({"ack": True})
    autopilot_to(session, "null-training-1")
    with pytest.raises(OutOfOrderError):
        session.submit_response({"question": "spu/a1", "answer": "No"})
    with pytest.raises(ValueError):
        session.submit_response({"question": "nt1/q1"})
    autopilot_to(session, "real-1")
    with pytest.raises(ValueError):
        session.submit_response({"ranking": ["A", "B", "C"]})
    with pytest.raises(ValueError):
        session.submit_response({"ranking": ["A", "A", "B", "C"]})


def test_full_run_and_reconciliation():
    session = autopilot(make_session("Menu-DA", seed=8),
                        wrong_first=("nt1/q2", "spu/a3"))
    assert session.status == "completed"
    log = session.event_log()
    assert [r.kind for r in log][-1] == "session-completed"
    assert sum(r.kind == "ranking" for r in log) == 10
    assert len(session.round_earnings) == 10
    assert session.cumulative_earnings <= 990
    report = session.score_report()
    assert report.points_earned == session.points_earned
    assert report.points_max == session.points_max == 68
    assert report.bonus == session.bonus
    # one flubbed until-correct training answer and one flubbed test answer
    assert report.tr_correct == report.tr_total == 13  # nt1/q2 is not %TR
    assert report.abstract_correct == 12
    summary = session.current_screen().payload["summary"]
    assert summary["total"] == session.cumulative_earnings + session.bonus


def test_submitting_after_completion_raises():
    session = autopilot(make_session("Textbook-SP"))
    assert session.current_screen().id == "end"
    with pytest.raises(CompletedError):
        session.submit_response({"ack": True})


def test_replay_reproduces_all_treatments():
    for treatment in TREATMENTS:
        session = autopilot(make_session(treatment, seed=17),
                            wrong_first=("spu/a5",))
        rebuilt = replay(session.serialized_log(), bank=BANK)
        assert logs_equal(rebuilt.serialized_log(), session.serialized_log())
        assert rebuilt.points_earned == session.points_earned
        assert rebuilt.cumulative_earnings == session.cumulative_earnings
        assert rebuilt.status == "completed"


def test_replay_round_trips_through_json():
    session = autopilot(make_session(seed=2))
    text = "\n".join(json.dumps(r) for r in session.serialized_log())
    rebuilt = replay(json.loads(line) for line in text.splitlines())
    assert logs_equal(rebuilt.serialized_log(), session.serialized_log())


def test_replay_rejects_tampered_logs():
    session = autopilot(make_session(seed=4))
    records = session.serialized_log()
    with pytest.raises(ReplayError):
        replay(records[1:])  # missing header
    doctored = [dict(r) for r in records]
    for record in doctored:
        if record["kind"] == "answer":
            record["correct"] = not record["correct"]
            break
    with pytest.raises(ReplayError):
        replay(doctored)


def test_replay_rejects_wrong_bank():
    session = autopilot(make_session(seed=6))
    with pytest.raises(ReplayError):
        replay(session.serialized_log(), bank=QuestionBank([]))


def test_idempotent_retry_by_sequence_number():
    session = make_session()
    seq = session.next_seq
    first = session.submit_response({"ack": True}, client_seq=seq)
    again = session.submit_response({"ack": True}, client_seq=seq)
    assert again == first
    with pytest.raises(OutOfOrderError):
        session.submit_response({"question": "nt1/q1", "answer": "True"},
                                client_seq=seq)
    with pytest.raises(OutOfOrderError):
        session.submit_response({"ack": True}, client_seq=session.next_seq + 5)
