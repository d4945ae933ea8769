"""Dataset pipeline: build, persist, reload, and verify sample files.

A dataset is 36 JSONL files (4 tiers x 3 question types x 3 splits) of 300
records each: 15 depths (6..20) x 20 slots.  Slots cycle through the 10
scenarios.  Schedules are re-rolled per (tier, scenario, split), so the
same plan appears with fresh timings in every split.

Every record is verified against the independent minute simulation before
it is persisted; a disagreement aborts the build naming the record.  Files
are written atomically (temp file + rename) and the manifest, holding a
SHA-256 digest per file, is renamed into place last so a complete manifest
implies complete files.

All sampling is a pure function of the master seed, so two runs with one
seed produce byte-identical files, regardless of worker count.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import multiprocessing
import os
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import (ConfigError, OracleMismatchError, PlanningError,
                     SamplingMissError, SchemaError, SpanError)
from .planning import (DEFAULT_SIZE_HINT, Scenario, SizeHint,
                       generate_scenario)
from .questions import (CLOCKED_TIERS, DEPTH_RANGE, OFFSET_HOURS_RANGE,
                        QTYPES, Question, TIERS, question_text,
                        sample_question)
from .rendering import ScenarioText, render_scenario_text
from .scheduling import (DURATION_RANGE, GAP_RANGE, PERTURBATION_RANGE,
                         Perturbation, TimedSchedule, apply_perturbation,
                         assign_durations, schedule_parallel,
                         schedule_serial)
from .seeds import derive_seed, rng_for
from .tracking import simulate_minutes

SPLITS = (1, 2, 3)
SLOTS_PER_DEPTH = 20
SCENARIO_COUNT = 10
RECORDS_PER_FILE = (DEPTH_RANGE[1] - DEPTH_RANGE[0] + 1) * SLOTS_PER_DEPTH

MANIFEST_NAME = "manifest.json"

_SCHEDULE_REROLLS = 1000
_SCENARIO_PROBES = SCENARIO_COUNT
_SCHEDULE_ATTEMPTS = 3
_QUESTION_SEED_TRIES = 4

_ENTITY_ID = re.compile(r"^[a-z]\d+(?:_\d+)?$")

RECORD_FIELDS = ("id", "tier", "qtype", "split", "depth", "scenario_id",
                 "domain", "objects", "init", "events", "question",
                 "answers", "meta")


@dataclass(frozen=True)
class GenerationConfig:
    """Everything :func:`generate_dataset` needs.

    The range overrides feed straight into the samplers; tier/qtype/split
    filters restrict which files are built (the default builds all 36).
    """

    master_seed: int = 0
    out_dir: str = "data"
    tiers: tuple[str, ...] = TIERS
    qtypes: tuple[str, ...] = QTYPES
    splits: tuple[int, ...] = SPLITS
    jobs: int = 1
    duration_range: tuple[int, int] = DURATION_RANGE
    gap_range: tuple[int, int] = GAP_RANGE
    offset_hours: tuple[int, int] = OFFSET_HOURS_RANGE
    perturb_minutes: tuple[int, int] = PERTURBATION_RANGE
    size_hint: SizeHint = DEFAULT_SIZE_HINT


def validate_config(cfg: GenerationConfig) -> None:
    for tier in cfg.tiers:
        if tier not in TIERS:
            raise ConfigError(f"unknown tier {tier!r} (choose from {TIERS})")
    for qtype in cfg.qtypes:
        if qtype not in QTYPES:
            raise ConfigError(
                f"unknown question type {qtype!r} (choose from {QTYPES})")
    for split in cfg.splits:
        if split not in SPLITS:
            raise ConfigError(f"unknown split {split} (choose from {SPLITS})")
    if not cfg.tiers or not cfg.qtypes or not cfg.splits:
        raise ConfigError("tiers, qtypes, and splits must be non-empty")
    for name in ("duration_range", "gap_range", "offset_hours",
                 "perturb_minutes"):
        lo, hi = getattr(cfg, name)
        if lo > hi or lo < 1:
            raise ConfigError(f"{name} {lo}..{hi} is not a valid range")
    if cfg.duration_range[0] < 2:
        raise ConfigError("durations below 2 minutes leave no room for "
                          "expedite perturbations")
    if cfg.perturb_minutes[0] > cfg.duration_range[1] - 1:
        raise ConfigError(
            "the smallest perturbation exceeds every possible expedite "
            "limit (duration - 1)")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")


@dataclass(frozen=True)
class SampleRecord:
    """One persisted QA sample (field order matches the JSON layout)."""

    id: str
    tier: str
    qtype: str
    split: int
    depth: int
    scenario_id: int
    domain: str
    objects: str
    init: str
    events: str
    question: str
    answers: tuple[str, ...]
    meta: dict


def record_id(tier: str, qtype: str, split: int, depth: int,
              slot: int) -> str:
    return f"{tier}-{qtype}-s{split}-d{depth:02d}-i{slot:02d}"


def dataset_filename(tier: str, qtype: str, split: int) -> str:
    return f"unseentimeqa_{tier}_{qtype}_split{split}.jsonl"


def serialize_record(record: SampleRecord) -> str:
    payload = dataclasses.asdict(record)
    payload["answers"] = list(record.answers)
    return json.dumps(payload, ensure_ascii=False)


def parse_record(line: str) -> SampleRecord:
    """Parse one JSONL line, validating the record schema.

    Schema violations raise :class:`SchemaError` whose path names the
    offending field (``$.answers[1]`` style).
    """
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise SchemaError("record must be a JSON object")
    for name in RECORD_FIELDS:
        if name not in payload:
            raise SchemaError("missing field", f"$.{name}")
    extras = set(payload) - set(RECORD_FIELDS)
    if extras:
        raise SchemaError(f"unexpected fields {sorted(extras)}")
    for name in ("id", "tier", "qtype", "domain", "objects", "init",
                 "events", "question"):
        if not isinstance(payload[name], str) or not payload[name]:
            raise SchemaError("must be a non-empty string", f"$.{name}")
    for name in ("split", "depth", "scenario_id"):
        if not isinstance(payload[name], int):
            raise SchemaError("must be an integer", f"$.{name}")
    answers = payload["answers"]
    if not isinstance(answers, list) or not 1 <= len(answers) <= 2:
        raise SchemaError("must be a list of one or two entity ids",
                          "$.answers")
    for i, a in enumerate(answers):
        if not isinstance(a, str) or not _ENTITY_ID.match(a):
            raise SchemaError(f"{a!r} is not an entity id", f"$.answers[{i}]")
    if not isinstance(payload["meta"], dict):
        raise SchemaError("must be an object", "$.meta")
    payload["answers"] = tuple(answers)
    return SampleRecord(**payload)


# --- schedule derivation ----------------------------------------------------

def make_schedule(master_seed: int, tier: str, scenario: Scenario,
                  split: int, attempt: int = 0, *,
                  duration_range: tuple[int, int] = DURATION_RANGE,
                  gap_range: tuple[int, int] = GAP_RANGE) -> TimedSchedule:
    """The canonical schedule for one (tier, scenario, split) cell.

    Durations, gaps, and the origin clock all derive from the master seed;
    draws whose span exceeds the cap are re-rolled deterministically.
    ``attempt`` selects an alternative schedule when question sampling
    exhausts the canonical one.
    """
    for sub in range(_SCHEDULE_REROLLS):
        tag = (master_seed, tier, scenario.scenario_id, split, attempt, sub)
        durations = assign_durations(
            scenario.plan, derive_seed("durations", *tag),
            duration_range)
        origin = rng_for("origin", *tag).randrange(24 * 60)
        try:
            if tier == "hard_parallel":
                return schedule_parallel(scenario.plan, durations,
                                         origin_clock=origin)
            return schedule_serial(
                scenario.plan, durations, origin_clock=origin,
                gapped=tier in CLOCKED_TIERS,
                seed=derive_seed("gaps", *tag), gap_range=gap_range)
        except SpanError:
            continue
    raise PlanningError(
        f"no in-span schedule for {tier} scenario {scenario.scenario_id} "
        f"split {split} after {_SCHEDULE_REROLLS} re-rolls"
    )


def _question_meta(master_seed: int, schedule: TimedSchedule, attempt: int,
                   q: Question) -> dict:
    meta = {
        "master_seed": master_seed,
        "origin_clock": schedule.origin_clock,
        "sched_attempt": attempt,
        "package": q.package,
        "query_minute": q.query_minute,
        "offset_hours": q.offset_hours,
        "anchor_index": q.anchor_index,
        "perturbation": None,
    }
    if q.perturbation is not None:
        meta["perturbation"] = {
            "target": q.perturbation.target,
            "kind": q.perturbation.kind,
            "minutes": q.perturbation.minutes,
        }
    return meta


def build_cell(cfg: GenerationConfig, scenarios: tuple[Scenario, ...],
               tier: str, qtype: str, split: int) -> list[SampleRecord]:
    """Build the 300 records of one (tier, qtype, split) file."""
    master = cfg.master_seed
    schedules: dict[tuple[int, int], TimedSchedule] = {}
    texts: dict[tuple[int, int], ScenarioText] = {}

    def schedule_for(scenario: Scenario, attempt: int) -> TimedSchedule:
        key = (scenario.scenario_id, attempt)
        if key not in schedules:
            schedules[key] = make_schedule(
                master, tier, scenario, split, attempt,
                duration_range=cfg.duration_range, gap_range=cfg.gap_range)
        return schedules[key]

    def text_for(scenario: Scenario, attempt: int) -> ScenarioText:
        key = (scenario.scenario_id, attempt)
        if key not in texts:
            seed = derive_seed(master, "text", tier, scenario.scenario_id,
                               split, attempt)
            texts[key] = render_scenario_text(
                scenario, schedule_for(scenario, attempt), tier, seed=seed)
        return texts[key]

    records: list[SampleRecord] = []
    lo, hi = DEPTH_RANGE
    for depth in range(lo, hi + 1):
        for slot in range(SLOTS_PER_DEPTH):
            record = None
            for probe in range(_SCENARIO_PROBES):
                scenario = scenarios[(slot + probe) % len(scenarios)]
                for attempt in range(_SCHEDULE_ATTEMPTS):
                    schedule = schedule_for(scenario, attempt)
                    for t in range(_QUESTION_SEED_TRIES):
                        qseed = derive_seed(master, "question", tier, qtype,
                                            split, depth, slot, probe,
                                            attempt, t)
                        try:
                            q = sample_question(
                                scenario, schedule, tier, qtype, depth,
                                qseed, offset_range=cfg.offset_hours,
                                perturb_range=cfg.perturb_minutes)
                        except SamplingMissError:
                            continue
                        record = _build_record(cfg, scenario, schedule,
                                               attempt, tier, qtype, split,
                                               depth, slot, q,
                                               text_for(scenario, attempt))
                        break
                    if record is not None:
                        break
                if record is not None:
                    break
            if record is None:
                raise PlanningError(
                    f"could not sample {tier}/{qtype} split {split} "
                    f"depth {depth} slot {slot} from any scenario"
                )
            records.append(record)
    return records


def _build_record(cfg: GenerationConfig, scenario: Scenario,
                  schedule: TimedSchedule, attempt: int, tier: str,
                  qtype: str, split: int, depth: int, slot: int,
                  q: Question, text: ScenarioText) -> SampleRecord:
    rid = record_id(tier, qtype, split, depth, slot)
    effective = schedule
    if q.perturbation is not None:
        effective = apply_perturbation(schedule, q.perturbation)
    check = simulate_minutes(scenario, effective, q.package, q.query_minute)
    if check != q.gold:
        raise OracleMismatchError(
            f"record {rid}: timeline answer {q.gold} disagrees with "
            f"minute simulation {check}"
        )
    return SampleRecord(
        id=rid, tier=tier, qtype=qtype, split=split, depth=depth,
        scenario_id=scenario.scenario_id,
        domain=text.domain_text, objects=text.objects_text,
        init=text.init_text, events=text.events_text,
        question=question_text(q, scenario),
        answers=q.gold.as_tuple(),
        meta=_question_meta(cfg.master_seed, schedule, attempt, q),
    )


# --- whole-dataset build ----------------------------------------------------

def build_scenarios(cfg: GenerationConfig) -> tuple[Scenario, ...]:
    return tuple(generate_scenario(k, cfg.size_hint)
                 for k in range(SCENARIO_COUNT))


def _cells(cfg: GenerationConfig) -> list[tuple[str, str, int]]:
    return [(tier, qtype, split) for tier in cfg.tiers
            for qtype in cfg.qtypes for split in cfg.splits]


def _cell_lines(cfg: GenerationConfig, scenarios: tuple[Scenario, ...],
                cell: tuple[str, str, int]) -> list[str]:
    tier, qtype, split = cell
    return [serialize_record(r)
            for r in build_cell(cfg, scenarios, tier, qtype, split)]


_WORKER_STATE: dict = {}


def _worker_init(cfg: GenerationConfig) -> None:
    _WORKER_STATE["cfg"] = cfg
    _WORKER_STATE["scenarios"] = build_scenarios(cfg)


def _worker_build(cell: tuple[str, str, int]) -> list[str]:
    return _cell_lines(_WORKER_STATE["cfg"], _WORKER_STATE["scenarios"], cell)


def _atomic_write(path: Path, data: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


def generate_dataset(cfg: GenerationConfig) -> dict:
    """Build every selected cell and write files plus manifest.

    Returns the manifest dict.  With ``jobs > 1`` cells build in worker
    processes; output bytes are identical either way because every cell is
    deterministic in the master seed and results are written in a fixed
    cell order.
    """
    validate_config(cfg)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = _cells(cfg)

    if cfg.jobs > 1:
        # fork, not spawn: workers must not re-import __main__, and every
        # random draw is explicitly seeded so inherited state is harmless.
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(cfg.jobs, initializer=_worker_init,
                      initargs=(cfg,)) as pool:
            per_cell = pool.map(_worker_build, cells)
    else:
        scenarios = build_scenarios(cfg)
        per_cell = [_cell_lines(cfg, scenarios, cell) for cell in cells]

    files = []
    total = 0
    for (tier, qtype, split), lines in zip(cells, per_cell):
        name = dataset_filename(tier, qtype, split)
        data = "\n".join(lines) + "\n"
        _atomic_write(out_dir / name, data)
        files.append({
            "name": name,
            "tier": tier,
            "qtype": qtype,
            "split": split,
            "records": len(lines),
            "sha256": hashlib.sha256(data.encode("utf-8")).hexdigest(),
        })
        total += len(lines)

    manifest = {
        "master_seed": cfg.master_seed,
        "total_records": total,
        "depth_range": list(DEPTH_RANGE),
        "files": files,
    }
    _atomic_write(out_dir / MANIFEST_NAME,
                  json.dumps(manifest, indent=2) + "\n")
    return manifest


# --- reload and verification ------------------------------------------------

def load_manifest(dataset_dir: str | Path) -> dict:
    path = Path(dataset_dir) / MANIFEST_NAME
    if not path.exists():
        raise SchemaError(f"no {MANIFEST_NAME} in {dataset_dir}")
    return json.loads(path.read_text(encoding="utf-8"))


def iter_records(dataset_dir: str | Path, *,
                 tiers: tuple[str, ...] | None = None,
                 qtypes: tuple[str, ...] | None = None,
                 splits: tuple[int, ...] | None = None):
    """Yield parsed records from every selected dataset file."""
    manifest = load_manifest(dataset_dir)
    for entry in manifest["files"]:
        if tiers and entry["tier"] not in tiers:
            continue
        if qtypes and entry["qtype"] not in qtypes:
            continue
        if splits and entry["split"] not in splits:
            continue
        path = Path(dataset_dir) / entry["name"]
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    yield parse_record(line)


def verify_dataset(dataset_dir: str | Path, *,
                   recompute: int | None = 25,
                   size_hint: SizeHint = DEFAULT_SIZE_HINT) -> dict:
    """Check file digests, schemas, and (for a sample of records) that the
    stored answers still follow from the stored provenance.

    ``recompute`` limits how many records per file are re-derived through
    the scheduler and both oracle routes (None = all).  Returns counters.
    """
    manifest = load_manifest(dataset_dir)
    scenarios: dict[int, Scenario] = {}
    counts = {"files": 0, "records": 0, "recomputed": 0}
    for entry in manifest["files"]:
        path = Path(dataset_dir) / entry["name"]
        data = path.read_text(encoding="utf-8")
        digest = hashlib.sha256(data.encode("utf-8")).hexdigest()
        if digest != entry["sha256"]:
            raise OracleMismatchError(
                f"{entry['name']}: digest mismatch (file changed after "
                f"the manifest was written)"
            )
        records = [parse_record(line) for line in data.splitlines()
                   if line.strip()]
        if len(records) != entry["records"]:
            raise SchemaError(
                f"{entry['name']}: {len(records)} records, manifest "
                f"says {entry['records']}"
            )
        counts["files"] += 1
        counts["records"] += len(records)

        if recompute == 0:
            continue
        chosen = records if recompute is None else \
            records[::max(1, len(records) // recompute)][:recompute]
        for rec in chosen:
            _reverify_record(rec, scenarios, size_hint)
            counts["recomputed"] += 1
    return counts


def _reverify_record(rec: SampleRecord, scenarios: dict[int, Scenario],
                     size_hint: SizeHint) -> None:
    meta = rec.meta
    sid = rec.scenario_id
    if sid not in scenarios:
        scenarios[sid] = generate_scenario(sid, size_hint)
    scenario = scenarios[sid]
    schedule = make_schedule(meta["master_seed"], rec.tier, scenario,
                             rec.split, meta["sched_attempt"])
    if schedule.origin_clock != meta["origin_clock"]:
        raise OracleMismatchError(
            f"record {rec.id}: derived origin clock "
            f"{schedule.origin_clock} != stored {meta['origin_clock']}"
        )
    effective = schedule
    if meta["perturbation"] is not None:
        p = meta["perturbation"]
        effective = apply_perturbation(
            schedule, Perturbation(p["target"], p["kind"], p["minutes"]))
    answer = simulate_minutes(scenario, effective, meta["package"],
                              meta["query_minute"])
    if answer.as_tuple() != rec.answers:
        raise OracleMismatchError(
            f"record {rec.id}: stored answers {list(rec.answers)} but the "
            f"minute simulation says {list(answer.as_tuple())}"
        )


__all__ = [
    "SPLITS", "SLOTS_PER_DEPTH", "SCENARIO_COUNT", "RECORDS_PER_FILE",
    "MANIFEST_NAME", "RECORD_FIELDS", "GenerationConfig", "validate_config",
    "SampleRecord", "record_id", "dataset_filename", "serialize_record",
    "parse_record", "make_schedule", "build_cell", "build_scenarios",
    "generate_dataset", "load_manifest", "iter_records", "verify_dataset",
]
