"""The default instrument is data; these tests freeze its load-bearing
facts so an accidental edit to a scenario or a key shows up as a failure."""

import pytest

from menulab.content import (
    DESCRIPTIONS,
    NULL_DESCRIPTION,
    TRAINING_SCENARIOS,
    TREATMENT_DIRECTION,
    TREATMENTS,
    default_bank,
    scenario_lookup,
)
from menulab.market import (
    PARTICIPANT_PROPOSING,
    PRIZE_PROPOSING_EXCLUDING,
    canonical_schedule,
    menu_best,
    menu_of,
    run_da_participant_proposing,
    run_da_prize_proposing_excluding,
)
from menulab.questions import computed_key, expected_answer, grade_answer


@pytest.fixture(scope="module")
def bank():
    return default_bank()


def test_scenario_shapes():
    expected = {
        "s1": (9, 9, {"B", "D"}, "D"),
        "s2": (8, 8, {"A"}, "A"),
        "s3": (10, 8, {"A", "C", "D"}, "A"),
    }
    for sid, (pp, ppe, menu, outcome) in expected.items():
        scenario = TRAINING_SCENARIOS[sid]
        _, trace_pp = run_da_participant_proposing(scenario.market)
        _, trace_ppe = run_da_prize_proposing_excluding(scenario.market.others())
        assert trace_pp.count == pp
        assert trace_ppe.count == ppe
        assert menu_of(scenario.market.others()) == menu
        assert menu_best(menu, scenario.y_ranking) == outcome


def test_scenario_outcomes_agree_across_directions():
    for scenario in TRAINING_SCENARIOS.values():
        matching, _ = run_da_participant_proposing(scenario.market)
        menu = menu_of(scenario.market.others())
        assert matching["Y"] == menu_best(menu, scenario.y_ranking)


def test_scenario_values_are_distinct_and_tiered():
    # ValueProfile validates tiers on construction; here we only pin which
    # prize tops each scenario since outcome questions lean on it.
    assert TRAINING_SCENARIOS["s1"].values.best_prize() == "D"
    assert TRAINING_SCENARIOS["s2"].values.best_prize() == "A"
    assert TRAINING_SCENARIOS["s3"].values.best_prize() == "A"


def test_treatment_tables_cover_each_other():
    assert set(TREATMENTS) == set(DESCRIPTIONS) == set(TREATMENT_DIRECTION)
    assert DESCRIPTIONS["Null"] == NULL_DESCRIPTION
    assert TREATMENT_DIRECTION["Trad-DA"] == PARTICIPANT_PROPOSING
    assert TREATMENT_DIRECTION["Menu-DA"] == PRIZE_PROPOSING_EXCLUDING


def test_bank_slice_sizes(bank):
    assert len(bank.spu_abstract()) == 13
    assert len(bank.spu_practical()) == 5
    assert len(bank.cognitive_questions()) == 4
    assert [q.id for q in bank.attention_questions()] == ["nt2/att", "spu/att"]


def test_training_bank_sizes(bank):
    sizes = {t: len(bank.training_questions(t)) for t in TREATMENTS}
    assert sizes == {
        "Trad-DA": 10, "Menu-DA": 13, "Menu-SP": 9, "Textbook-SP": 9,
        "Null": 8,
    }


def test_points_maxima(bank):
    maxima = {
        t: sum(q.points.first for q in bank.for_treatment(t))
        for t in TREATMENTS
    }
    assert maxima == {
        "Trad-DA": 65, "Menu-DA": 68, "Menu-SP": 56, "Textbook-SP": 56,
        "Null": 56,
    }


def test_abstract_keys_frozen(bank):
    keys = {q.id: computed_key(q) for q in bank.spu_abstract()}
    assert keys == {
        "spu/a1": "No", "spu/a2": "Yes", "spu/a3": "Yes", "spu/a4": "No",
        "spu/a5": "Yes", "spu/a6": "Yes", "spu/a7": "No", "spu/a8": "No",
        "spu/a9": "Yes", "spu/a10": "Yes", "spu/a11": "Yes", "spu/a12": "No",
        "spu/a13": "No",
    }


def test_practical_keys_frozen(bank):
    assert [q.key for q in bank.spu_practical()] == [
        "False", "True", "False", "False", "False"]


def test_abstract_items_are_single_attempt_two_points(bank):
    for q in bank.spu_abstract() + bank.spu_practical():
        assert q.attempts == "single"
        assert (q.points.first, q.points.second) == (2, 0)


def test_whole_calculation_questions_pay_five_then_two(bank):
    fulls = [q for q in bank if q.kind == "gui-full"]
    assert len(fulls) == 4  # rounds 2 and 3 in each GUI treatment
    for q in fulls:
        assert (q.points.first, q.points.second) == (5, 2)
        assert q.attempts == "three-reveal"


def test_first_round_walks_the_schedule_stepwise(bank):
    scenarios = scenario_lookup()
    for treatment, direction in (("Trad-DA", PARTICIPANT_PROPOSING),
                                 ("Menu-DA", PRIZE_PROPOSING_EXCLUDING)):
        steps = [q for q in bank.training_questions(treatment)
                 if q.kind == "gui-step"]
        n = len(canonical_schedule(scenarios["s1"], direction))
        assert [q.payload["step"] for q in steps] == list(range(n))
        assert all(q.screen == "training-1" for q in steps)


def test_every_question_self_grades(bank):
    scenarios = scenario_lookup()
    for q in bank:
        if q.kind in ("info", "demographics"):
            continue
        assert grade_answer(q, expected_answer(q, scenarios), scenarios), q.id


def test_cognitive_battery_keys(bank):
    assert [q.key for q in bank.cognitive_questions()] == [5, 5, 47, 25]
    assert all(q.points.first == 0 for q in bank.cognitive_questions())


def test_null_treatment_repeats_practice_under_fresh_ids(bank):
    null_training = bank.training_questions("Null")
    shared = [q for q in bank if q.screen.startswith("null-training-")
              and q.kind != "attention"]
    assert [q.prompt for q in null_training] == [q.prompt for q in shared]
    assert not {q.id for q in null_training} & {q.id for q in shared}
