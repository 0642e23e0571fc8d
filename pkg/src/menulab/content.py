"""Default experiment content: descriptions, training scenarios, questions.

Everything in this module is replaceable data, not mechanism.  The shipped
question bank is a working default instrument wired to the same grading
oracles as any custom bank; swap it out through the bank file format (see
serialize.load_bank) to field your own questions.  The three training
scenarios are fixed markets chosen so the two calculation directions have
instructive shapes: 9 and 9 proposals with menu {B, D}, then 8 and 8 with
the singleton menu {A}, then 10 and 8 with menu {A, C, D}.
"""

from __future__ import annotations

from dataclasses import dataclass

from .market import (
    PARTICIPANT_PROPOSING,
    PRIZE_PROPOSING_EXCLUDING,
    PRIZES,
    Market,
    canonical_schedule,
    menu_best,
    menu_of,
    run_da_participant_proposing,
)
from .questions import (
    SINGLE,
    THREE_REVEAL,
    UNTIL_CORRECT,
    PointRule,
    Question,
    QuestionBank,
    ScenarioLookup,
)
from .sampler import ValueProfile

TREATMENTS = ("Trad-DA", "Menu-DA", "Menu-SP", "Textbook-SP", "Null")

#: GUI calculation direction per treatment; None means no GUI training.
TREATMENT_DIRECTION = {
    "Trad-DA": PARTICIPANT_PROPOSING,
    "Menu-DA": PRIZE_PROPOSING_EXCLUDING,
    "Menu-SP": None,
    "Textbook-SP": None,
    "Null": None,
}


@dataclass(frozen=True)
class TrainingScenario:
    """A fully disclosed market for training rounds.  The human ranking is a
    hypothetical shown to the participant for the sake of the calculation."""

    id: str
    market: Market
    values: ValueProfile

    @property
    def y_ranking(self) -> tuple[str, ...]:
        return self.market.rankings["Y"]


TRAINING_SCENARIOS = {
    "s1": TrainingScenario(
        id="s1",
        market=Market(
            rankings={
                "Y": ("D", "B", "C", "A"),
                "R": ("C", "D", "A", "B"),
                "S": ("C", "B", "D", "A"),
                "T": ("D", "C", "A", "B"),
            },
            priorities={
                "A": ("T", "S", "R", "Y"),
                "B": ("Y", "S", "T", "R"),
                "C": ("S", "Y", "T", "R"),
                "D": ("S", "Y", "T", "R"),
            },
        ),
        values=ValueProfile(values={"A": 12, "B": 65, "C": 4, "D": 93}),
    ),
    "s2": TrainingScenario(
        id="s2",
        market=Market(
            rankings={
                "Y": ("C", "D", "B", "A"),
                "R": ("B", "D", "A", "C"),
                "S": ("C", "A", "B", "D"),
                "T": ("B", "C", "A", "D"),
            },
            priorities={
                "A": ("R", "Y", "S", "T"),
                "B": ("T", "R", "Y", "S"),
                "C": ("S", "R", "Y", "T"),
                "D": ("S", "T", "R", "Y"),
            },
        ),
        values=ValueProfile(values={"A": 91, "B": 55, "C": 38, "D": 7}),
    ),
    "s3": TrainingScenario(
        id="s3",
        market=Market(
            rankings={
                "Y": ("A", "B", "D", "C"),
                "R": ("A", "D", "B", "C"),
                "S": ("A", "D", "C", "B"),
                "T": ("D", "B", "A", "C"),
            },
            priorities={
                "A": ("Y", "R", "S", "T"),
                "B": ("R", "S", "T", "Y"),
                "C": ("Y", "S", "T", "R"),
                "D": ("Y", "S", "R", "T"),
            },
        ),
        values=ValueProfile(values={"A": 96, "B": 14, "C": 52, "D": 3}),
    ),
}

#: Scenario used for the two introductory practice rounds (display only).
NULL_TRAINING_SCENARIO = TRAINING_SCENARIOS["s1"]


def scenario_lookup() -> ScenarioLookup:
    return ScenarioLookup({sid: sc.market for sid, sc in TRAINING_SCENARIOS.items()})


# ---------------------------------------------------------------------------
# Description texts
# ---------------------------------------------------------------------------

CONSENT_TEXT = (
    "Welcome. In this study you will play a series of allocation rounds in "
    "which you and three computerized participants are each allocated one of "
    "four prizes. Your decisions determine your earnings. Please work through "
    "the screens at your own pace; your answers are recorded as you go. By "
    "continuing you confirm that you take part voluntarily."
)

NULL_DESCRIPTION = (
    "This game has four participants: You, and three computerized "
    "participants named Ruth, Shirley, and Theresa. There are four possible "
    "prizes: Prize A, Prize B, Prize C, and Prize D.",
    "You and the computerized participants each submit a ranking of the four "
    "prizes, and each participant wins one prize. The prizes are worth "
    "different amounts of money to the different participants, and in each "
    "round you are shown how much each prize earns you.",
    "The prize you win depends on your ranking, on the computerized "
    "participants' rankings, and on the prize priorities. The computerized "
    "participants' rankings are determined beforehand and are not shown at "
    "any point. Your ranking cannot affect the priorities or the "
    "computerized participants' rankings.",
    "The allocation process attempts to give each participant a prize that "
    "they ranked higher rather than a prize that they ranked lower. However, "
    "this is not always possible, since the allocation process must take "
    "into account the rankings of all participants.",
    "These priorities can affect the allocation of prizes. The higher your "
    "priority is for getting some prize, the more likely you generally are "
    "to get that prize at the end of the process.",
)

DESCRIPTIONS: dict[str, tuple[str, ...]] = {
    "Trad-DA": (
        "You will receive a prize according to the following process:",
        "First, every participant is tentatively paired with the prize they "
        "ranked highest.",
        "If two or more participants are paired with the same prize, the "
        "prize keeps the participant with the highest priority for it and "
        "rejects the others. Every rejected participant is then tentatively "
        "paired with the next prize on their own ranking.",
        "Pairing and rejecting repeat until every participant is paired with "
        "a different prize. Each participant then receives the prize they "
        "are paired with at the end of the process.",
    ),
    "Menu-DA": (
        "A temporary allocation will be calculated using the submitted "
        "rankings of all the participants except for you, according to the "
        "following process:",
        "First, every prize is tentatively paired with the participant who "
        "has the highest priority for it, not counting you.",
        "If two or more prizes are paired with the same participant, that "
        "participant keeps the prize they ranked highest and rejects the "
        "others. Every rejected prize is then tentatively paired with the "
        "participant with the next-highest priority for it, again not "
        "counting you. A prize rejected by all three computerized "
        "participants is left unpaired.",
        "Pairing and rejecting repeat until no participant is paired with "
        "more than one prize. This is the temporary allocation.",
        "Your Obtainable Prizes include each prize which your priority of "
        "getting is higher than that of the participant paired to it in the "
        "temporary allocation. The prize left unpaired in the temporary "
        "allocation is also an Obtainable Prize.",
        "You will receive your highest-ranked Obtainable Prize.",
    ),
    "Menu-SP": (
        "Some set of Obtainable Prizes will be calculated using the "
        "submitted rankings of all the participants except for you.",
        "You will receive your highest-ranked Obtainable Prize.",
    ),
    "Textbook-SP": (
        "The prize you receive upon submitting a ranking L is always at "
        "least as high, according to ranking L, compared to the prize you "
        "would receive submitting another ranking.",
    ),
    "Null": NULL_DESCRIPTION,
}


# ---------------------------------------------------------------------------
# Question bank
# ---------------------------------------------------------------------------

_TF = ("True", "False")
_YN = ("Yes", "No")


def _tf(qid, screen, prompt, key, treatment=None, kind="tf", points=1):
    return Question(
        id=qid, kind=kind, prompt=prompt, options=_TF, key=key,
        points=PointRule(points), attempts=UNTIL_CORRECT, screen=screen,
        treatment=treatment)


_NULL_TRAINING_ITEMS = (
    ("q1", "Each participant wins exactly one prize.", "True"),
    ("q2", "Two participants can win the same prize in the same round.", "False"),
    ("q3", "You are shown how much each prize earns you before you submit "
           "your ranking.", "True"),
    ("q4", "Your ranking can change the computerized participants' rankings.",
     "False"),
)

_NULL_TRAINING_ITEMS_2 = (
    ("q1", "The other three participants are computerized.", "True"),
    ("q2", "The computerized participants' rankings are shown to you before "
           "you submit your own ranking.", "False"),
    ("q3", "The prize priorities are shown to you before you submit your "
           "ranking.", "True"),
    ("q4", "The amount each prize earns you stays the same in every round.",
     "False"),
)

_ATTENTION_TRAINING = (
    "This question checks that you are reading carefully: please answer "
    "False, regardless of what you think of the statement below. Reading "
    "instructions matters."
)


def _null_training_questions(prefix: str, screens: tuple[str, str], treatment=None):
    qs = []
    for qid, prompt, key in _NULL_TRAINING_ITEMS:
        qs.append(_tf(f"{prefix}1/{qid}", screens[0], prompt, key, treatment))
    for qid, prompt, key in _NULL_TRAINING_ITEMS_2:
        qs.append(_tf(f"{prefix}2/{qid}", screens[1], prompt, key, treatment))
    qs.append(_tf(f"{prefix}2/att", screens[1], _ATTENTION_TRAINING, "False",
                  treatment, kind="attention"))
    return qs


def _gui_round_questions(treatment: str, rnd: int, direction: str):
    """GUI calculation questions for one training round.

    Round 1 walks the canonical schedule one step at a time; rounds 2 and 3
    treat the whole calculation as a single question worth 5 points on the
    first attempt and 2 on the second.
    """
    sid = f"s{rnd}"
    scenario = TRAINING_SCENARIOS[sid]
    prefix = treatment.lower()
    screen = f"training-{rnd}"
    qs = []
    if rnd == 1:
        n_steps = len(canonical_schedule(scenario.market, direction))
        for step in range(n_steps):
            if step == 0:
                prompt = ("Pair every proposer with its first choice, then "
                          "submit the board.")
            else:
                prompt = (f"Resolve the next conflict (conflict {step}) and "
                          "submit the updated board.")
            qs.append(Question(
                id=f"{prefix}/tr1/step{step}", kind="gui-step", prompt=prompt,
                points=PointRule(1), attempts=THREE_REVEAL, screen=screen,
                treatment=treatment,
                payload={"scenario": sid, "direction": direction, "step": step}))
    else:
        qs.append(Question(
            id=f"{prefix}/tr{rnd}/full", kind="gui-full",
            prompt="Carry out the whole calculation on the board and submit "
                   "the final pairing.",
            points=PointRule(5, 2), attempts=THREE_REVEAL, screen=screen,
            treatment=treatment,
            payload={"scenario": sid, "direction": direction}))
    if direction == PRIZE_PROPOSING_EXCLUDING:
        menu = menu_of(scenario.market.others())
        qs.append(Question(
            id=f"{prefix}/tr{rnd}/menu", kind="menu-select",
            prompt="Select all of your Obtainable Prizes.",
            options=PRIZES, key=tuple(sorted(menu)),
            points=PointRule(1), attempts=THREE_REVEAL, screen=screen,
            treatment=treatment))
        outcome = menu_best(menu, scenario.y_ranking)
    else:
        matching, _ = run_da_participant_proposing(scenario.market)
        outcome = matching["Y"]
    ranking_text = "-".join(scenario.y_ranking)
    qs.append(Question(
        id=f"{prefix}/tr{rnd}/outcome", kind="mc",
        prompt=f"Your ranking in this round is {ranking_text}. According to "
               "the process, which prize do you receive?",
        options=PRIZES, key=outcome,
        points=PointRule(1), attempts=THREE_REVEAL, screen=screen,
        treatment=treatment))
    return qs


def _menu_sp_training():
    statements = {
        1: (("q1", "The set of Obtainable Prizes is calculated without using "
                   "your ranking.", "True"),
            ("q2", "Your ranking can change which prizes are Obtainable.",
             "False")),
        2: (("q1", "Every prize is always an Obtainable Prize.", "False"),
            ("q2", "You always receive the Obtainable Prize that your "
                   "submitted ranking places highest.", "True")),
        3: (("q1", "If exactly one prize is Obtainable, you receive it no "
                   "matter how you rank the prizes.", "True"),
            ("q2", "Ranking a prize that is not Obtainable in first place "
                   "can make it Obtainable.", "False")),
    }
    qs = []
    for rnd in (1, 2, 3):
        screen = f"training-{rnd}"
        scenario = TRAINING_SCENARIOS[f"s{rnd}"]
        for qid, prompt, key in statements[rnd]:
            qs.append(_tf(f"menu-sp/tr{rnd}/{qid}", screen, prompt, key, "Menu-SP"))
        menu = menu_of(scenario.market.others())
        menu_text = ", ".join(sorted(menu))
        ranking_text = "-".join(scenario.y_ranking)
        qs.append(Question(
            id=f"menu-sp/tr{rnd}/outcome", kind="mc",
            prompt=f"In this round your Obtainable Prizes are {menu_text} and "
                   f"your submitted ranking is {ranking_text}. Which prize do "
                   "you receive?",
            options=PRIZES, key=menu_best(menu, scenario.y_ranking),
            points=PointRule(1), attempts=UNTIL_CORRECT, screen=screen,
            treatment="Menu-SP"))
    return qs


def _textbook_sp_training():
    statements = {
        1: (("q1", "Submitting your true order of value always gets you a "
                   "prize at least as high on that order as any other "
                   "submission would.", "True"),
            ("q2", "There can be a round in which some other ranking gets "
                   "you a prize you value more than what your true order of "
                   "value gets you.", "False"),
            ("q3", "To rely on this guarantee, you need to know the "
                   "computerized participants' rankings.", "False")),
        2: (("q1", "If you rank a low-earning prize first, you are "
                   "guaranteed to receive it.", "False"),
            ("q2", "Ranking the prizes from highest to lowest earnings never "
                   "earns you less than any other ranking would.", "True"),
            ("q3", "Your submitted ranking can influence which prize you "
                   "receive.", "True")),
        3: (("q1", "Swapping your two highest-earning prizes in your ranking "
                   "can sometimes earn you more money.", "False"),
            ("q2", "Even when you rank the prizes from highest to lowest "
                   "earnings, you might receive your lowest-earning prize.",
             "True"),
            ("q3", "Ranking your highest-earning prize in second place can "
                   "sometimes protect you from a bad outcome.", "False")),
    }
    return [
        _tf(f"textbook-sp/tr{rnd}/{qid}", f"training-{rnd}", prompt, key,
            "Textbook-SP")
        for rnd in (1, 2, 3)
        for qid, prompt, key in statements[rnd]
    ]


def _obs(submitted: str, received: str) -> dict:
    return {"observation": {"submitted": tuple(submitted), "received": received}}


def _abstract(qid, screen, payload, modality):
    obs = payload["observation"]
    sub = "-".join(obs["submitted"])
    base = (f"Imagine that you have submitted the ranking {sub} and got "
            f"Prize {obs['received']}. ")
    if "alternative" in payload:
        alt = "-".join(payload["alternative"])
        prompt = base + (
            f"If you had instead submitted {alt}, is it {modality} that you "
            f"would have gotten Prize {payload['target']}?")
        kind = "counterfactual"
    else:
        prompt = base + (
            f"Is it {modality} that some other ranking you could have "
            f"submitted would have gotten you Prize {payload['target']}?")
        kind = "existential"
    return Question(
        id=qid, kind=kind, prompt=prompt, options=_YN,
        points=PointRule(2), attempts=SINGLE, screen=screen,
        payload=dict(payload, modality=modality))


def _spu_questions():
    obs1 = _obs("BACD", "C")
    obs2 = _obs("ABCD", "B")
    obs3 = _obs("DCBA", "D")
    specs = [
        # screen 1: four abstract items plus the attention check
        ("a1", "spu-1", {**obs1, "alternative": tuple("ABCD"), "target": "A"}, "possible"),
        ("a2", "spu-1", {**obs1, "alternative": tuple("ABCD"), "target": "C"}, "certain"),
        ("a3", "spu-1", {**obs1, "target": "D"}, "possible"),
        ("a4", "spu-1", {**obs1, "target": "B"}, "possible"),
        # screen 2
        ("a5", "spu-2", {**obs1, "alternative": tuple("DCBA"), "target": "D"}, "possible"),
        ("a6", "spu-2", {**obs2, "alternative": tuple("CABD"), "target": "C"}, "possible"),
        ("a7", "spu-2", {**obs2, "alternative": tuple("CABD"), "target": "C"}, "certain"),
        ("a8", "spu-2", {**obs2, "target": "A"}, "possible"),
        ("a9", "spu-2", {**obs2, "target": "B"}, "certain"),
        # screen 3
        ("a10", "spu-3", {**obs2, "alternative": tuple("DBAC"), "target": "D"}, "possible"),
        ("a11", "spu-3", {**obs3, "alternative": tuple("ABCD"), "target": "A"}, "possible"),
        ("a12", "spu-3", {**obs3, "alternative": tuple("ABCD"), "target": "D"}, "certain"),
        ("a13", "spu-3", {**obs3, "target": "A"}, "certain"),
    ]
    qs = [_abstract(f"spu/{qid}", screen, payload, modality)
          for qid, screen, payload, modality in specs]
    qs.insert(4, Question(
        id="spu/att", kind="attention",
        prompt="This question checks that you are paying attention: please "
               "answer No, regardless of the statements above.",
        options=_YN, key="No", points=PointRule(2), attempts=SINGLE,
        screen="spu-1"))
    practical = (
        ("p1", "Sometimes I might have to rank the prize that earns me the "
               "most in second place or lower.", "False"),
        ("p2", "Ranking the prizes in the order of how much they earn me "
               "always maximizes my earnings.", "True"),
        ("p3", "Ranking a prize lower than its true earnings position can "
               "sometimes increase my earnings.", "False"),
        ("p4", "If I rank a low-earning prize first, I insure myself against "
               "a bad outcome.", "False"),
        ("p5", "Swapping the two prizes that earn me the most in my ranking "
               "can sometimes earn me more money.", "False"),
    )
    for qid, statement, key in practical:
        qs.append(Question(
            id=f"spu/{qid}", kind="practical",
            prompt="If I want to maximize my earnings in a given round, "
                   f"then... {statement}",
            options=_TF, key=key, points=PointRule(2), attempts=SINGLE,
            screen="spu-4"))
    return qs


_COGNITIVE_ITEMS = (
    ("cog1", "A bat and a ball cost $1.10 in total. The bat costs $1.00 more "
             "than the ball. How much does the ball cost? Please enter an "
             "amount in cents.", 5),
    ("cog2", "If it takes 5 machines 5 minutes to make 5 widgets, how long "
             "would it take 100 machines to make 100 widgets? Please enter a "
             "number of minutes.", 5),
    ("cog3", "In a lake, there is a patch of lily pads. Every day, the patch "
             "doubles in size. If it takes 48 days for the patch to cover "
             "the entire lake, how long would it take for the patch to cover "
             "half of the lake? Please enter a number of days.", 47),
    ("cog4", "Out of 1,000 people in a small town 500 are members of a "
             "choir. Out of these 500 members in the choir 100 are men. Out "
             "of the 500 inhabitants that are not in the choir 300 are men. "
             "What is the probability that a randomly drawn man is a member "
             "of the choir? Please enter a percent chance between 0 and "
             "100.", 25),
)


def _exit_questions():
    qs = [
        Question(
            id=f"exit/{qid}", kind="cognitive", prompt=prompt, key=key,
            points=PointRule(0), attempts=SINGLE, screen="exit")
        for qid, prompt, key in _COGNITIVE_ITEMS
    ]
    qs.append(Question(
        id="exit/demo", kind="demographics",
        prompt="Please tell us a bit about yourself (age, gender, field of "
               "study or occupation). This information is not scored.",
        points=PointRule(0), attempts=SINGLE, screen="exit"))
    return qs


def default_bank() -> QuestionBank:
    """The shipped instrument: introductory practice questions, per-treatment
    training, the 13 + 5 understanding test, and the exit battery."""
    qs: list[Question] = []
    qs += _null_training_questions("nt", ("null-training-1", "null-training-2"))
    for rnd in (1, 2, 3):
        qs += _gui_round_questions("Trad-DA", rnd, PARTICIPANT_PROPOSING)
        qs += _gui_round_questions("Menu-DA", rnd, PRIZE_PROPOSING_EXCLUDING)
    qs += _menu_sp_training()
    qs += _textbook_sp_training()
    # The Null treatment repeats the practice material as its training phase,
    # under fresh ids; its third round is experience only, with no questions.
    qs += _null_training_questions(
        "null/tr", ("training-1", "training-2"), treatment="Null")
    qs += _spu_questions()
    qs += _exit_questions()
    return QuestionBank(qs)
