import json
import subprocess
import sys

import pytest

from menulab.cli import main, verify_suite
from menulab.content import default_bank
from menulab.market import Market
from menulab.questions import expected_answer
from menulab.serialize import market_to_dict, others_to_dict

EX1 = Market(
    rankings={"Y": ("A", "B", "C", "D"), "R": ("A", "C", "B", "D"),
              "S": ("A", "B", "D", "C"), "T": ("B", "A", "C", "D")},
    priorities={"A": ("R", "Y", "S", "T"), "B": ("T", "S", "Y", "R"),
                "C": ("Y", "R", "T", "S"), "D": ("S", "T", "Y", "R")},
)


@pytest.fixture()
def ex1_path(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text(json.dumps(market_to_dict(EX1)))
    return str(path)


@pytest.fixture()
def ex1_others_path(tmp_path):
    path = tmp_path / "ex1-others.json"
    path.write_text(json.dumps(others_to_dict(EX1.others())))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_da_participant_proposing(capsys, ex1_path):
    code, out, _ = run(capsys, "run-da", "--market", ex1_path)
    assert code == 0
    assert out.splitlines() == [
        "Y -> C", "R -> A", "S -> D", "T -> B", "proposals: 8"]


def test_run_da_prize_proposing_with_schedule(capsys, ex1_others_path):
    code, out, _ = run(capsys, "run-da", "--market", ex1_others_path,
                       "--direction", "prize-proposing-excluding", "--schedule")
    assert code == 0
    lines = out.splitlines()
    assert "C -> unpaired" in lines
    assert "proposals: 6" in lines
    assert lines[-4].startswith("step 0:")
    assert lines[-1].endswith("U.P.:C")


def test_run_da_needs_y_for_participant_proposing(capsys, ex1_others_path):
    code, _, err = run(capsys, "run-da", "--market", ex1_others_path)
    assert code == 2
    assert "ranking for Y" in err


def test_menu_output(capsys, ex1_others_path):
    code, out, _ = run(capsys, "menu", "--others", ex1_others_path)
    assert (code, out) == (0, "menu: C\n")


def test_menu_accepts_full_market_and_ranking(capsys, ex1_path):
    code, out, _ = run(capsys, "menu", "--others", ex1_path,
                       "--ranking", "D,B,C,A")
    assert code == 0
    assert out == "menu: C\nchoice: C\n"


def test_menu_missing_file_is_validation_failure(capsys, tmp_path):
    code, _, err = run(capsys, "menu", "--others", str(tmp_path / "nope.json"))
    assert code == 2
    assert "error:" in err


def test_sample_rounds_stdout_deterministic(capsys):
    code, first, _ = run(capsys, "sample-rounds", "--seed", "4", "--n", "3")
    assert code == 0
    records = [json.loads(line) for line in first.splitlines()]
    assert len(records) == 3
    assert set(records[0]) == {"values", "priorities", "rankings", "seed"}
    _, again, _ = run(capsys, "sample-rounds", "--seed", "4", "--n", "3")
    assert again == first


def test_sample_rounds_to_file(capsys, tmp_path):
    out = tmp_path / "rounds.jsonl"
    code, msg, _ = run(capsys, "sample-rounds", "--seed", "1", "--n", "2",
                       "--out", str(out))
    assert code == 0
    assert "wrote 2 rounds" in msg
    assert len(out.read_text().splitlines()) == 2


def test_grade_question_exit_codes(capsys):
    bank = default_bank()
    good = expected_answer(bank.get("nt1/q1"))
    code, out, _ = run(capsys, "grade-question", "--question", "nt1/q1",
                       "--answer", str(good))
    assert (code, out) == (0, "correct\n")
    bad = "No" if good == "Yes" else "Yes"
    code, out, _ = run(capsys, "grade-question", "--question", "nt1/q1",
                       "--answer", bad)
    assert (code, out) == (1, "incorrect\n")
    code, _, err = run(capsys, "grade-question", "--question", "nt9/q9",
                       "--answer", "Yes")
    assert code == 2 and "error:" in err


def test_verify_small_run(capsys):
    code, out, _ = run(capsys, "verify", "--n", "200", "--seed", "7")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "menu/DA equivalence: 200/200"
    assert lines[1] == "strategyproofness: 200/200"
    assert lines[2] == "proposal identity and order invariance: 200/200"


def test_verify_suite_shape():
    results = verify_suite(50, seed=3, n_schedule=10)
    assert results["menu/DA equivalence"] == (50, 50)
    assert results["proposal identity and order invariance"] == (10, 10)


def test_simulate_then_analyze(capsys, tmp_path):
    logs = tmp_path / "logs"
    code, msg, _ = run(capsys, "simulate", "--n", "4", "--seed", "3",
                       "--preset", "always-sf", "--out", str(logs))
    assert code == 0
    assert "wrote 4 session logs" in msg
    assert len(list(logs.glob("*.jsonl"))) == 4

    out = tmp_path / "tables"
    code, report, _ = run(capsys, "analyze", "--logs", str(logs),
                          "--out", str(out))
    assert code == 0
    assert "participants: 4" in report
    for name in ("metrics.csv", "conditional_sf.csv", "report.txt"):
        assert (out / name).exists()
    header = (out / "metrics.csv").read_text().splitlines()[0]
    assert header.startswith("participant,treatment,sf,spu")


def test_analyze_rejects_empty_directory(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", "--logs", str(tmp_path))
    assert code == 2
    assert "no .jsonl logs" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "menulab.cli", "verify", "--n", "25",
         "--seed", "1"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("menu/DA equivalence: 25/25")
