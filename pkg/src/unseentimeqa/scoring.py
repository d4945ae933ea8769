"""Scoring of model responses against stored answer sets.

A response is free text; only its final ``Answer:`` line is judged.  A
sample counts as correct when every gold entity id appears in that line.
The default matcher requires ids at token boundaries so ``l1_0`` does not
match inside ``l1_01``; a permissive substring mode is available for
models with unusual formatting.

Reports aggregate per (tier, question type): accuracy per split, the mean
across splits, and the population standard deviation, plus pooled
accuracy-by-depth curves.
"""

from __future__ import annotations

import json
import re
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .dataset import SampleRecord
from .errors import ConfigError, CoverageError, SchemaError

MATCH_MODES = ("token", "substring")

_ANSWER_LINE = re.compile(r"^\s*answer\s*:\s*(.*)$", re.IGNORECASE)


def parse_response(text: str) -> tuple[str, bool]:
    """Extract the judged portion of a model response.

    Returns ``(answer_text, found)``: the content of the last line that
    starts with ``Answer:`` (case-insensitive), or the whole response with
    ``found=False`` when no such line exists.
    """
    found = None
    for line in text.splitlines():
        m = _ANSWER_LINE.match(line)
        if m:
            found = m.group(1)
    if found is not None:
        return found, True
    return text, False


def token_match(text: str, entity: str) -> bool:
    """True when ``entity`` occurs in ``text`` at token boundaries."""
    pattern = (r"(?<![A-Za-z0-9_])" + re.escape(entity)
               + r"(?![A-Za-z0-9_])")
    return re.search(pattern, text, re.IGNORECASE) is not None


def substring_match(text: str, entity: str) -> bool:
    return entity.lower() in text.lower()


@dataclass(frozen=True)
class Verdict:
    """The judgment for one sample."""

    id: str
    correct: bool
    matched: tuple[str, ...]
    missing: tuple[str, ...]
    had_answer_line: bool


def score_sample(record: SampleRecord, response: str,
                 match: str = "token") -> Verdict:
    if match not in MATCH_MODES:
        raise ConfigError(f"unknown match mode {match!r} "
                          f"(choose from {MATCH_MODES})")
    matcher = token_match if match == "token" else substring_match
    answer_text, found = parse_response(response)
    matched = tuple(a for a in record.answers if matcher(answer_text, a))
    missing = tuple(a for a in record.answers if a not in matched)
    return Verdict(id=record.id, correct=not missing, matched=matched,
                   missing=missing, had_answer_line=found)


def score_responses(records: Iterable[SampleRecord],
                    responses: dict[str, str],
                    match: str = "token") -> dict[str, Verdict]:
    """Score every record, requiring a response for each.

    Raises :class:`CoverageError` naming the ids with no response.
    """
    records = list(records)
    uncovered = [r.id for r in records if r.id not in responses]
    if uncovered:
        shown = ", ".join(uncovered[:10])
        more = f" (and {len(uncovered) - 10} more)" if len(uncovered) > 10 \
            else ""
        raise CoverageError(
            f"{len(uncovered)} records have no response: {shown}{more}")
    return {r.id: score_sample(r, responses[r.id], match) for r in records}


def read_responses(path: str | Path) -> dict[str, str]:
    """Read a JSONL file of ``{"id": ..., "response": ...}`` objects."""
    responses: dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(
                    f"line {line_no}: not valid JSON: {exc}") from exc
            if not isinstance(payload, dict) or "id" not in payload \
                    or "response" not in payload:
                raise SchemaError(
                    f"line {line_no}: expected an object with 'id' and "
                    f"'response'")
            rid = payload["id"]
            if not isinstance(rid, str) \
                    or not isinstance(payload["response"], str):
                raise SchemaError(f"line {line_no}: 'id' and 'response' "
                                  f"must be strings")
            if rid in responses:
                raise SchemaError(f"line {line_no}: duplicate id {rid!r}")
            responses[rid] = payload["response"]
    return responses


def _accuracy(verdicts: list[Verdict]) -> float:
    return sum(v.correct for v in verdicts) / len(verdicts)


def aggregate_report(records: Iterable[SampleRecord],
                     responses: dict[str, str],
                     match: str = "token") -> dict:
    """Score and aggregate: per-(tier, qtype) split accuracies with mean
    and population standard deviation, pooled depth curves, and totals.
    """
    records = list(records)
    verdicts = score_responses(records, responses, match)

    by_group: dict[tuple[str, str], dict[int, list[Verdict]]] = {}
    by_depth: dict[tuple[str, str], dict[int, list[Verdict]]] = {}
    for rec in records:
        v = verdicts[rec.id]
        group = (rec.tier, rec.qtype)
        by_group.setdefault(group, {}).setdefault(rec.split, []).append(v)
        by_depth.setdefault(group, {}).setdefault(rec.depth, []).append(v)

    groups = {}
    for group in sorted(by_group):
        tier, qtype = group
        splits = {split: _accuracy(vs)
                  for split, vs in sorted(by_group[group].items())}
        values = list(splits.values())
        groups[f"{tier}/{qtype}"] = {
            "splits": {str(k): v for k, v in splits.items()},
            "mean": statistics.mean(values),
            "std": statistics.pstdev(values),
            "by_depth": {str(d): _accuracy(vs)
                         for d, vs in sorted(by_depth[group].items())},
        }

    all_verdicts = list(verdicts.values())
    report = {
        "match": match,
        "total": len(all_verdicts),
        "correct": sum(v.correct for v in all_verdicts),
        "accuracy": _accuracy(all_verdicts) if all_verdicts else 0.0,
        "missing_answer_line": sum(not v.had_answer_line
                                   for v in all_verdicts),
        "groups": groups,
        "verdicts": {v.id: {"correct": v.correct,
                            "matched": list(v.matched),
                            "missing": list(v.missing),
                            "had_answer_line": v.had_answer_line}
                     for v in sorted(all_verdicts, key=lambda v: v.id)},
    }
    return report


def format_report_table(report: dict) -> str:
    """A fixed-width text table of the per-group accuracies."""
    lines = [f"{'tier/qtype':<28} {'mean':>7} {'std':>7}  splits"]
    for name, group in report["groups"].items():
        splits = "  ".join(f"s{k}={v:.3f}"
                           for k, v in group["splits"].items())
        lines.append(f"{name:<28} {group['mean']:>7.3f} "
                     f"{group['std']:>7.3f}  {splits}")
    lines.append(f"overall accuracy {report['accuracy']:.3f} "
                 f"({report['correct']}/{report['total']}); "
                 f"{report['missing_answer_line']} responses without an "
                 f"Answer line")
    return "\n".join(lines)


__all__ = [
    "MATCH_MODES", "parse_response", "token_match", "substring_match",
    "Verdict", "score_sample", "score_responses", "read_responses",
    "aggregate_report", "format_report_table",
]
