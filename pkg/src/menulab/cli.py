"""Command line entry points.

One executable, subcommand per job: sampling environments, running the
mechanism on a market file, printing obtainable-prize menus, grading bank
questions, verifying the mechanism invariants on bulk random markets,
simulating synthetic populations, analyzing behavior logs, and serving the
wire API.  Every command exits 0 on success and 2 on bad input; ``verify``
and ``grade-question`` use 1 for "ran fine, answer is no".
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import (
    PolicyGroup,
    aggregate_metrics,
    conditional_sf_by_spu,
    render_report,
    round_plays,
    simulate_population,
    write_conditional_csv,
    write_metrics_csv,
)
from .content import default_bank, scenario_lookup
from .market import (
    AGENTS,
    COMPUTERIZED,
    PARTICIPANT_PROPOSING,
    PRIZE_PROPOSING_EXCLUDING,
    PRIZES,
    Market,
    OthersMarket,
    achievable_set_bruteforce,
    all_y_outcomes,
    canonical_schedule,
    menu_best,
    menu_of,
    proposal_count_identity,
    run_da_participant_proposing,
    run_da_prize_proposing_excluding,
    run_da_random_order,
)
from .questions import grade_answer
from .sampler import SamplerConfig, rng_for, sample_session_rounds
from .serialize import (
    load_bank,
    market_from_dict,
    others_from_dict,
    read_jsonl,
    round_to_dict,
    write_jsonl,
)

DIRECTIONS = (PARTICIPANT_PROPOSING, PRIZE_PROPOSING_EXCLUDING)


def _load_market_file(path: str) -> Market | OthersMarket:
    """A market file with a ranking for Y is a complete market; without one
    it is the others-only profile."""
    with open(path) as handle:
        data = json.load(handle)
    if "Y" in data.get("rankings", {}):
        return market_from_dict(data)
    return others_from_dict(data)


def _bank_for(args) -> "QuestionBank":
    return load_bank(args.bank) if getattr(args, "bank", None) else default_bank()


def cmd_sample_rounds(args) -> int:
    config = SamplerConfig(r1=args.r1, r2=args.r2, seed=args.seed)
    rounds = sample_session_rounds(config, n=args.n)
    records = [round_to_dict(spec) for spec in rounds]
    if args.out == "-":
        for record in records:
            print(json.dumps(record))
    else:
        write_jsonl(args.out, records)
        print(f"wrote {len(records)} rounds to {args.out}")
    return 0


def _print_schedule(scenario, direction: str) -> None:
    for step, board in enumerate(canonical_schedule(scenario, direction)):
        cells = "  ".join(f"{r}:{''.join(board.get(r, ()))}" for r in sorted(board))
        print(f"step {step}:  {cells}")


def cmd_run_da(args) -> int:
    scenario = _load_market_file(args.market)
    if args.direction == PARTICIPANT_PROPOSING:
        if isinstance(scenario, OthersMarket):
            print("error: participant-proposing needs a ranking for Y",
                  file=sys.stderr)
            return 2
        matching, trace = run_da_participant_proposing(scenario)
        for agent in AGENTS:
            print(f"{agent} -> {matching[agent]}")
    else:
        others = scenario.others() if isinstance(scenario, Market) else scenario
        temp, trace = run_da_prize_proposing_excluding(others)
        for prize in PRIZES:
            print(f"{prize} -> {temp.pairs.get(prize, 'unpaired')}")
    print(f"proposals: {trace.count}")
    if args.schedule:
        _print_schedule(scenario, args.direction)
    return 0


def cmd_menu(args) -> int:
    scenario = _load_market_file(args.others)
    others = scenario.others() if isinstance(scenario, Market) else scenario
    menu = menu_of(others)
    print("menu: " + " ".join(sorted(menu)))
    if args.ranking:
        ranking = tuple(args.ranking.replace(",", "").replace(" ", "").upper())
        print(f"choice: {menu_best(menu, ranking)}")
    return 0


def cmd_grade_question(args) -> int:
    bank = _bank_for(args)
    question = bank.get(args.question)
    try:
        answer = json.loads(args.answer)
    except json.JSONDecodeError:
        answer = args.answer
    correct = grade_answer(question, answer, scenario_lookup())
    print("correct" if correct else "incorrect")
    return 0 if correct else 1


def _random_others(rng) -> OthersMarket:
    return OthersMarket(
        rankings={a: tuple(PRIZES[i] for i in rng.permutation(4))
                  for a in COMPUTERIZED},
        priorities={p: tuple(AGENTS[i] for i in rng.permutation(4))
                    for p in PRIZES},
    )


def verify_suite(n: int, seed: int, n_schedule: int | None = None) -> dict[str, tuple[int, int]]:
    """Bulk checks on random markets.  Returns name -> (passed, total).

    * menu/DA equivalence: the priority-derived menu equals the brute-force
      achievable set, and prize-proposing DA plus menu choice reproduces the
      participant-proposing outcome for all 24 rankings.
    * strategyproofness: the truthful report is never beaten by any of the
      24 alternatives, for every truth.
    * proposal identity and order invariance: the canonical run, a shuffled
      run, and the sum-of-ranks identity agree in both directions.
    """
    n_schedule = min(n, 1000) if n_schedule is None else n_schedule
    rng = rng_for(seed, 11)
    equiv = sp = 0
    for _ in range(n):
        others = _random_others(rng)
        outcomes = all_y_outcomes(others)
        menu = menu_of(others)
        ok = menu == achievable_set_bruteforce(others)
        ok = ok and all(menu_best(menu, r) == prize
                        for r, prize in outcomes.items())
        equiv += ok
        reachable = set(outcomes.values())
        sp += all(
            all(truth.index(outcomes[truth]) <= truth.index(p) for p in reachable)
            for truth in outcomes)
    order = 0
    for _ in range(n_schedule):
        others = _random_others(rng)
        y_ranking = tuple(PRIZES[i] for i in rng.permutation(4))
        market = others.with_ranking(y_ranking)
        ok = True
        for scenario, direction in ((market, PARTICIPANT_PROPOSING),
                                    (others, PRIZE_PROPOSING_EXCLUDING)):
            runner = (run_da_participant_proposing
                      if direction == PARTICIPANT_PROPOSING
                      else run_da_prize_proposing_excluding)
            outcome, trace = runner(scenario)
            shuffled, count = run_da_random_order(scenario, direction, rng)
            ok = ok and outcome == shuffled
            ok = ok and trace.count == count == proposal_count_identity(
                scenario, direction)
        order += ok
    return {
        "menu/DA equivalence": (equiv, n),
        "strategyproofness": (sp, n),
        "proposal identity and order invariance": (order, n_schedule),
    }


def cmd_verify(args) -> int:
    results = verify_suite(args.n, args.seed)
    for name, (passed, total) in results.items():
        print(f"{name}: {passed}/{total}")
    return 0 if all(p == t for p, t in results.values()) else 1


PRESETS = {
    "always-sf": [PolicyGroup("always-sf", "always-sf", weight=1.0)],
    "mixed": [
        PolicyGroup("straightforward", "always-sf", weight=0.35),
        PolicyGroup("swappers", "flip-top-two", weight=0.25, spu_correct=9),
        PolicyGroup("noise", "uniform-random", weight=0.2, spu_correct=12),
        PolicyGroup("partial", "fixed", weight=0.2, sf_rounds=6, spu_correct=14),
    ],
    "trend": [PolicyGroup("learners", "trend", weight=1.0,
                          base=0.4, slope=0.02)],
}


def cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    logs = simulate_population(PRESETS[args.preset], args.n, args.seed,
                               bank=_bank_for(args))
    for log in logs:
        write_jsonl(out / f"{log[0]['session']}.jsonl", log)
    print(f"wrote {len(logs)} session logs to {out}")
    return 0


def _collect_logs(paths: list[str]) -> list[list[dict]]:
    files: list[Path] = []
    for raw in paths:
        path = Path(raw)
        files.extend(sorted(path.glob("*.jsonl")) if path.is_dir() else [path])
    if not files:
        raise FileNotFoundError(f"no .jsonl logs under {paths}")
    return [list(read_jsonl(f)) for f in files]


def cmd_analyze(args) -> int:
    logs = _collect_logs(args.logs)
    bank = _bank_for(args)
    metrics = aggregate_metrics(logs, bank)
    plays = [play for log in logs for play in round_plays(log)]
    report = render_report(metrics, plays)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_metrics_csv(out / "metrics.csv", metrics)
        write_conditional_csv(out / "conditional_sf.csv",
                              conditional_sf_by_spu(metrics))
        (out / "report.txt").write_text(report)
        print(f"wrote metrics.csv, conditional_sf.csv, report.txt to {out}")
    print(report, end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(bank=_bank_for(args), log_dir=args.log_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="menulab",
        description="Matching experiment engine: mechanism, sessions, analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-rounds", help="draw round environments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--r1", type=float, default=1.7)
    p.add_argument("--r2", type=float, default=0.5)
    p.add_argument("--out", default="-", help="output JSONL path, - for stdout")
    p.set_defaults(func=cmd_sample_rounds)

    p = sub.add_parser("run-da", help="run deferred acceptance on a market file")
    p.add_argument("--market", required=True)
    p.add_argument("--direction", choices=DIRECTIONS,
                   default=PARTICIPANT_PROPOSING)
    p.add_argument("--schedule", action="store_true",
                   help="also print the canonical step-by-step boards")
    p.set_defaults(func=cmd_run_da)

    p = sub.add_parser("menu", help="print the obtainable-prize menu")
    p.add_argument("--others", required=True,
                   help="market file; a ranking for Y, if present, is ignored")
    p.add_argument("--ranking", help="also pick from the menu with this ranking")
    p.set_defaults(func=cmd_menu)

    p = sub.add_parser("grade-question", help="grade one answer against the bank")
    p.add_argument("--question", required=True)
    p.add_argument("--answer", required=True,
                   help="JSON if it parses, plain text otherwise")
    p.add_argument("--bank", help="question bank JSON (default: built-in)")
    p.set_defaults(func=cmd_grade_question)

    p = sub.add_parser("verify", help="check mechanism invariants on random markets")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="generate synthetic session logs")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", choices=sorted(PRESETS), default="mixed")
    p.add_argument("--out", required=True, help="directory for session logs")
    p.add_argument("--bank")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="metrics and report from session logs")
    p.add_argument("--logs", nargs="+", required=True,
                   help="log files or directories of *.jsonl")
    p.add_argument("--out", help="directory for metrics.csv and friends")
    p.add_argument("--bank")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="serve the wire API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--log-dir", help="persist event logs to this directory")
    p.add_argument("--bank")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
