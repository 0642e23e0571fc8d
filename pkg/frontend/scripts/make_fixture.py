"""Record an HTTP tape of one fully scripted session for the UI parity test.

The tape holds every request body the wire client sent and every response the
service returned, in order. The browser test replays the responses from a fake
server while a scripted user drives the real widgets, and checks that the UI
emits byte-identical requests. Answers are written the way a browser form
would send them (text fields post strings).

Run from the repository root after installing the package:

    python3 frontend/scripts/make_fixture.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from menulab.api import create_app
from menulab.content import default_bank, scenario_lookup
from menulab.questions import expected_answer
from menulab.session import Session

TREATMENT = "Trad-DA"
SEED = 5
DEMOGRAPHICS_TEXT = "prefer not to say"
FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
OUT = FIXTURES / "trad-da-session.json"
OUT_REVEAL = FIXTURES / "trad-da-reveal.json"

# A board no schedule step ever matches: every proposer parked on one row.
WRONG_BOARD = {"A": ["Y", "R", "S", "T"], "B": [], "C": [], "D": []}


def browser_answer(question, lookup):
    """The canonical answer, shaped as a browser widget would post it."""
    good = expected_answer(question, lookup)
    if question.kind == "cognitive":
        return str(good)
    if question.kind == "demographics":
        return DEMOGRAPHICS_TEXT
    return good


class Recorder:
    def __init__(self):
        self.bank = default_bank()
        self.lookup = scenario_lookup()
        self.client = TestClient(create_app(self.bank))
        self.tape = []
        self.state = self._post("/sessions", {"treatment": TREATMENT, "seed": SEED})
        self.respond = f"/sessions/{self.state['session']}/response"

    def _post(self, path: str, body: dict) -> dict:
        resp = self.client.post(path, json=body)
        resp.raise_for_status()
        payload = resp.json()
        self.tape.append(
            {
                "method": "POST",
                "path": path,
                "body": body,
                "status": resp.status_code,
                "response": payload,
            }
        )
        return payload

    def submit(self, response: dict) -> dict:
        body = {"response": response, "seq": self.state["next_seq"]}
        self.state = self._post(self.respond, body)
        return self.state

    def step_correct(self) -> None:
        screen = self.state["screen"]
        payload = screen["payload"]
        if screen["kind"] == "real-round":
            values = payload["values"]
            self.submit({"ranking": sorted(values, key=values.get, reverse=True)})
        elif payload.get("questions"):
            q = next(q for q in payload["questions"] if not q["resolved"])
            self.submit(
                {
                    "question": q["id"],
                    "answer": browser_answer(self.bank.get(q["id"]), self.lookup),
                }
            )
        else:
            self.submit({"ack": True})


def main() -> None:
    rec = Recorder()
    while rec.state["status"] != "completed":
        rec.step_correct()
    tape = rec.tape
    sid = rec.state["session"]

    # Strings that must never show up in real-round markup: the computerized
    # participants' submitted rankings, in the joined spellings a template
    # would most plausibly produce.
    forbidden = []
    for spec in Session(TREATMENT, seed=SEED).rounds:
        for agent in ("R", "S", "T"):
            order = list(spec.rankings[agent])
            forbidden.extend(["-".join(order), ", ".join(order), "".join(order)])

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(
        json.dumps(
            {
                "treatment": TREATMENT,
                "seed": SEED,
                "session": sid,
                "tape": tape,
                "forbidden": sorted(set(forbidden)),
            },
            indent=1,
        )
        + "\n"
    )
    print(f"wrote {OUT} ({len(tape)} exchanges)")
    make_reveal_tape()


def make_reveal_tape() -> None:
    """A partial session that burns all three attempts on the first allocation
    board, ending right after the server discloses the canonical answer."""
    rec = Recorder()
    while rec.state["screen"]["id"] != "training-1":
        rec.step_correct()
    target = next(
        q
        for q in rec.state["screen"]["payload"]["questions"]
        if q["kind"] == "gui-step" and q["attempts"] == "three-reveal"
    )
    for _ in range(3):
        state = rec.submit({"question": target["id"], "answer": WRONG_BOARD})
    feedback = state["feedback"]
    assert feedback["correct"] is False and feedback["reveal"], feedback
    OUT_REVEAL.write_text(
        json.dumps(
            {
                "treatment": TREATMENT,
                "seed": SEED,
                "question": target["id"],
                "reveal": feedback["reveal"],
                "tape": rec.tape,
            },
            indent=1,
        )
        + "\n"
    )
    print(f"wrote {OUT_REVEAL} ({len(rec.tape)} exchanges)")


if __name__ == "__main__":
    main()
