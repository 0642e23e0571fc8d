"""JSON shapes for markets, rounds, question banks, and event logs.

Wire and file formats live here so the core modules stay free of IO.  Bank
files are plain JSON with a schema version; answer keys for the oracle-backed
question kinds may be omitted and are recomputed at load.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

from .market import Market, OthersMarket
from .questions import PointRule, Question, QuestionBank, computed_key
from .sampler import RoundSpec, SamplerConfig, ValueProfile

BANK_SCHEMA = 1
LOG_SCHEMA = 1


def market_to_dict(market: Market) -> dict:
    return {
        "rankings": {a: list(r) for a, r in market.rankings.items()},
        "priorities": {p: list(o) for p, o in market.priorities.items()},
    }


def market_from_dict(data: Mapping[str, Any]) -> Market:
    return Market(
        rankings={a: tuple(r) for a, r in data["rankings"].items()},
        priorities={p: tuple(o) for p, o in data["priorities"].items()},
    )


def others_to_dict(others: OthersMarket) -> dict:
    return {
        "rankings": {a: list(r) for a, r in others.rankings.items()},
        "priorities": {p: list(o) for p, o in others.priorities.items()},
    }


def others_from_dict(data: Mapping[str, Any]) -> OthersMarket:
    return OthersMarket(
        rankings={a: tuple(r) for a, r in data["rankings"].items()},
        priorities={p: tuple(o) for p, o in data["priorities"].items()},
    )


def round_to_dict(spec: RoundSpec) -> dict:
    return {
        "values": dict(spec.values.values),
        "priorities": {p: list(o) for p, o in spec.priorities.items()},
        "rankings": {a: list(r) for a, r in spec.rankings.items()},
        "seed": list(spec.seed),
    }


def round_from_dict(data: Mapping[str, Any]) -> RoundSpec:
    return RoundSpec(
        values=ValueProfile(values=dict(data["values"])),
        priorities={p: tuple(o) for p, o in data["priorities"].items()},
        rankings={a: tuple(r) for a, r in data["rankings"].items()},
        seed=tuple(data.get("seed", ())),
    )


def sampler_config_to_dict(config: SamplerConfig) -> dict:
    return {"r1": config.r1, "r2": config.r2, "seed": config.seed}


def sampler_config_from_dict(data: Mapping[str, Any]) -> SamplerConfig:
    return SamplerConfig(
        r1=data.get("r1", 1.7), r2=data.get("r2", 0.5), seed=data.get("seed", 0))


# ---------------------------------------------------------------------------
# Question banks
# ---------------------------------------------------------------------------


def question_to_dict(question: Question, include_key: bool = True) -> dict:
    data: dict[str, Any] = {
        "id": question.id,
        "kind": question.kind,
        "prompt": question.prompt,
        "options": list(question.options),
        "points": [question.points.first, question.points.second],
        "attempts": question.attempts,
        "screen": question.screen,
        "treatment": question.treatment,
    }
    if question.payload is not None:
        data["payload"] = _jsonable(question.payload)
    if include_key:
        # Oracle-backed kinds may hold key=None in memory; dump the computed
        # key so files and fingerprints are canonical either way.
        data["key"] = _jsonable(computed_key(question))
    return data


def question_from_dict(data: Mapping[str, Any]) -> Question:
    kind = data["kind"]
    key = data.get("key")
    if kind == "menu-select" and key is not None:
        key = tuple(key)
    first, second = data.get("points", [1, 0])
    question = Question(
        id=data["id"],
        kind=kind,
        prompt=data["prompt"],
        options=tuple(data.get("options", ())),
        key=key,
        points=PointRule(first, second),
        attempts=data.get("attempts", "until-correct"),
        screen=data.get("screen", ""),
        treatment=data.get("treatment"),
        payload=data.get("payload"),
    )
    if key is None and kind in ("counterfactual", "existential"):
        # The oracle owns these keys; fill them in at load so a bank file can
        # omit them entirely.
        object.__setattr__(question, "key", computed_key(question))
    return question


def bank_to_dict(bank: QuestionBank) -> dict:
    return {
        "schema": BANK_SCHEMA,
        "questions": [question_to_dict(q) for q in bank],
    }


def bank_from_dict(data: Mapping[str, Any]) -> QuestionBank:
    schema = data.get("schema", BANK_SCHEMA)
    if schema != BANK_SCHEMA:
        raise ValueError(f"unsupported bank schema {schema!r}")
    return QuestionBank(question_from_dict(q) for q in data["questions"])


def save_bank(bank: QuestionBank, path: str | Path) -> None:
    Path(path).write_text(json.dumps(bank_to_dict(bank), indent=2) + "\n")


def load_bank(path: str | Path) -> QuestionBank:
    return bank_from_dict(json.loads(Path(path).read_text()))


def bank_fingerprint(bank: QuestionBank) -> str:
    """Stable digest of the bank's content, stored in session headers so a
    replay against a different instrument fails loudly."""
    canonical = json.dumps(bank_to_dict(bank), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Event logs
# ---------------------------------------------------------------------------


def write_jsonl(path: str | Path, records: Iterable[Mapping[str, Any]]) -> None:
    with open(path, "w") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def append_jsonl(path: str | Path, record: Mapping[str, Any]) -> None:
    with open(path, "a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, (list, tuple, set)):
        return [_jsonable(v) for v in value]
    return value
