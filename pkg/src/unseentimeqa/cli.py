"""Command-line interface.

Subcommands::

    unseentimeqa generate  — build dataset files plus manifest
    unseentimeqa prompt    — render zero- or few-shot prompts from a dataset
    unseentimeqa score     — judge model responses against stored answers
    unseentimeqa inspect   — print one scenario/schedule, optionally a query
    unseentimeqa validate  — recheck digests, schemas, and stored answers

``generate`` options resolve as: command-line flag, then JSON config file,
then built-in default.  Exit codes: 0 success, 1 any toolkit error
(message on stderr), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import dataset, scoring
from .errors import ConfigError, UnseenTimeQAError
from .planning import generate_scenario, write_plan_text
from .questions import QTYPES, TIERS
from .rendering import (Exemplar, ScenarioText, assemble_prompt,
                        format_clock)
from .seeds import rng_for
from .tracking import build_timeline, locate_at, resolve_clock

OUT_ENV = "UNSEENTIMEQA_OUT"


def _csv(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _int_csv(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in _csv(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integers: {text!r}") \
            from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unseentimeqa",
        description="Generate, prompt, score, and audit time-sensitive QA "
                    "data over logistics plans.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build dataset files")
    gen.add_argument("--seed", type=int, default=None,
                     help="master seed (default 0)")
    gen.add_argument("--out", default=None,
                     help=f"output directory (default ${OUT_ENV} or ./data)")
    gen.add_argument("--jobs", type=int, default=None,
                     help="worker processes (default 1)")
    gen.add_argument("--tiers", type=_csv, default=None,
                     help=f"comma-separated subset of {','.join(TIERS)}")
    gen.add_argument("--qtypes", type=_csv, default=None,
                     help=f"comma-separated subset of {','.join(QTYPES)}")
    gen.add_argument("--splits", type=_int_csv, default=None,
                     help="comma-separated subset of 1,2,3")
    gen.add_argument("--config", default=None,
                     help="JSON file of GenerationConfig overrides")

    pr = sub.add_parser("prompt", help="render prompts from a dataset")
    pr.add_argument("--dataset", required=True, help="dataset directory")
    pr.add_argument("--tier", required=True, choices=TIERS)
    pr.add_argument("--qtype", required=True, choices=QTYPES)
    pr.add_argument("--split", required=True, type=int, choices=(1, 2, 3))
    pr.add_argument("--mode", default="zero", choices=("zero", "few"))
    pr.add_argument("--out", required=True, help="output JSONL path")

    sc = sub.add_parser("score", help="score model responses")
    sc.add_argument("--dataset", required=True, help="dataset directory")
    sc.add_argument("--responses", required=True,
                    help="JSONL of {id, response}")
    sc.add_argument("--match", default="token",
                    choices=scoring.MATCH_MODES)
    sc.add_argument("--out", default=None,
                    help="write the full JSON report here")
    sc.add_argument("--tiers", type=_csv, default=None)
    sc.add_argument("--qtypes", type=_csv, default=None)
    sc.add_argument("--splits", type=_int_csv, default=None)

    ins = sub.add_parser("inspect", help="print a timed scenario")
    ins.add_argument("--scenario", type=int, required=True,
                     help="scenario id (0-9)")
    ins.add_argument("--tier", default="easy", choices=TIERS)
    ins.add_argument("--split", type=int, default=1, choices=(1, 2, 3))
    ins.add_argument("--seed", type=int, default=0, help="master seed")
    ins.add_argument("--package", default=None,
                     help="also locate this package")
    ins.add_argument("--at", default=None, metavar="CLOCK",
                     help="query clock, e.g. '08:30 AM'")

    val = sub.add_parser("validate", help="audit a generated dataset")
    val.add_argument("--dataset", required=True, help="dataset directory")
    val.add_argument("--sample", type=int, default=25,
                     help="records per file to re-derive (0 = digests and "
                          "schemas only)")
    val.add_argument("--full", action="store_true",
                     help="re-derive every record")
    return parser


# --- generate ---------------------------------------------------------------

_CONFIG_KEYS = {
    "master_seed": int, "out_dir": str, "jobs": int,
    "tiers": list, "qtypes": list, "splits": list,
    "duration_range": list, "gap_range": list,
    "offset_hours": list, "perturb_minutes": list,
}


def load_config_file(path: str) -> dict:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    out = {}
    for key, value in payload.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"config {path}: unknown key {key!r}")
        if not isinstance(value, _CONFIG_KEYS[key]):
            raise ConfigError(
                f"config {path}: {key} must be "
                f"{_CONFIG_KEYS[key].__name__}")
        out[key] = tuple(value) if isinstance(value, list) else value
    return out


def _resolve_generate_config(args: argparse.Namespace) -> \
        dataset.GenerationConfig:
    values: dict = {}
    if args.config:
        values.update(load_config_file(args.config))
    flags = {
        "master_seed": args.seed,
        "out_dir": args.out,
        "jobs": args.jobs,
        "tiers": args.tiers,
        "qtypes": args.qtypes,
        "splits": args.splits,
    }
    for key, value in flags.items():
        if value is not None:
            values[key] = value
    if "out_dir" not in values:
        values["out_dir"] = os.environ.get(OUT_ENV, "data")
    return dataset.GenerationConfig(**values)


def _cmd_generate(args: argparse.Namespace) -> int:
    cfg = _resolve_generate_config(args)
    manifest = dataset.generate_dataset(cfg)
    print(f"wrote {manifest['total_records']} records in "
          f"{len(manifest['files'])} files to {cfg.out_dir} "
          f"(seed {cfg.master_seed})")
    return 0


# --- prompt -----------------------------------------------------------------

def _sections(rec: dataset.SampleRecord) -> ScenarioText:
    return ScenarioText(rec.domain, rec.objects, rec.init, rec.events)


def exemplar_split(split: int) -> int:
    """The split exemplars are drawn from: the next one, cyclically."""
    return split % 3 + 1


def build_prompts(dataset_dir: str, tier: str, qtype: str, split: int,
                  mode: str) -> list[tuple[str, str]]:
    """(id, prompt) pairs for one dataset file.

    Few-shot exemplars come from the same tier and question type but the
    next split, so their schedules and questions never coincide with the
    target's; two are drawn per record, seeded by the record id.
    """
    targets = list(dataset.iter_records(
        dataset_dir, tiers=(tier,), qtypes=(qtype,), splits=(split,)))
    pool: list[Exemplar] = []
    if mode == "few":
        donors = list(dataset.iter_records(
            dataset_dir, tiers=(tier,), qtypes=(qtype,),
            splits=(exemplar_split(split),)))
        pool = [Exemplar(_sections(d), d.question, d.answers)
                for d in donors]
        if len(pool) < 2:
            raise ConfigError(
                f"need at least two exemplar records in split "
                f"{exemplar_split(split)} of {tier}/{qtype}")
    out = []
    for rec in targets:
        exemplars = None
        if mode == "few":
            rng = rng_for("exemplars", rec.id)
            exemplars = tuple(rng.sample(pool, 2))
        prompt = assemble_prompt(_sections(rec), rec.question, mode,
                                 exemplars)
        out.append((rec.id, prompt))
    return out


def _cmd_prompt(args: argparse.Namespace) -> int:
    pairs = build_prompts(args.dataset, args.tier, args.qtype, args.split,
                          args.mode)
    path = Path(args.out)
    if path.parent != Path("."):
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for rid, prompt in pairs:
            fh.write(json.dumps({"id": rid, "prompt": prompt},
                                ensure_ascii=False) + "\n")
    print(f"wrote {len(pairs)} {args.mode}-shot prompts to {args.out}")
    return 0


# --- score ------------------------------------------------------------------

def _cmd_score(args: argparse.Namespace) -> int:
    records = list(dataset.iter_records(
        args.dataset, tiers=args.tiers, qtypes=args.qtypes,
        splits=args.splits))
    responses = scoring.read_responses(args.responses)
    report = scoring.aggregate_report(records, responses, args.match)
    print(scoring.format_report_table(report))
    if args.out:
        Path(args.out).write_text(
            json.dumps(report, indent=2) + "\n", encoding="utf-8")
        print(f"full report written to {args.out}")
    return 0


# --- inspect ----------------------------------------------------------------

def _cmd_inspect(args: argparse.Namespace) -> int:
    scenario = generate_scenario(args.scenario)
    schedule = dataset.make_schedule(args.seed, args.tier, scenario,
                                     args.split)
    print(write_plan_text(scenario).rstrip())
    print()
    print(f"# {schedule.mode} schedule, origin "
          f"{format_clock(schedule.origin_clock)}, "
          f"span {schedule.span_end} minutes")
    for timed in schedule.events:
        print(f"#  {timed.index:>2}. [{timed.start:>4}, {timed.end:>4})  "
              f"{format_clock((schedule.origin_clock + timed.start) % 1440)}"
              f" .. "
              f"{format_clock((schedule.origin_clock + timed.end) % 1440)}")
    if args.package or args.at:
        if not (args.package and args.at):
            raise ConfigError("--package and --at must be given together")
        minute = resolve_clock(schedule, args.at)
        timeline = build_timeline(scenario, schedule, args.package)
        answer = locate_at(timeline, minute)
        print(f"# {args.package} at {args.at} (minute {minute}): "
              f"{list(answer.as_tuple())}")
    return 0


# --- validate ---------------------------------------------------------------

def _cmd_validate(args: argparse.Namespace) -> int:
    recompute = None if args.full else args.sample
    counts = dataset.verify_dataset(args.dataset, recompute=recompute)
    print(f"ok: {counts['files']} files, {counts['records']} records, "
          f"{counts['recomputed']} re-derived")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "prompt": _cmd_prompt,
    "score": _cmd_score,
    "inspect": _cmd_inspect,
    "validate": _cmd_validate,
}


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return _COMMANDS[args.command](args)
    except UnseenTimeQAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(None))


if __name__ == "__main__":
    main()
