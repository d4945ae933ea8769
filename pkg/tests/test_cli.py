from __future__ import annotations

import json

import pytest

from unseentimeqa.cli import (build_prompts, exemplar_split,
                              load_config_file, run)
from unseentimeqa.dataset import iter_records
from unseentimeqa.errors import ConfigError
from unseentimeqa.rendering import REASONING_FOOTER


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_ds")
    rc = run(["generate", "--out", str(out), "--tiers", "easy",
              "--qtypes", "static,relative", "--splits", "1,2"])
    assert rc == 0
    return out


def test_usage_error_returns_2():
    assert run([]) == 2
    assert run(["generate", "--splits", "one"]) == 2
    assert run(["prompt", "--dataset", "x"]) == 2


def test_toolkit_error_returns_1(tmp_path):
    assert run(["validate", "--dataset", str(tmp_path)]) == 1
    assert run(["generate", "--out", str(tmp_path),
                "--tiers", "impossible"]) == 1


def test_generate_then_validate(small_dataset, capsys):
    rc = run(["validate", "--dataset", str(small_dataset),
              "--sample", "3"])
    assert rc == 0
    assert "ok:" in capsys.readouterr().out


def test_config_file_and_flag_precedence(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "tiers": ["easy"], "qtypes": ["static"], "splits": [1],
        "master_seed": 5, "out_dir": str(tmp_path / "from_config"),
    }))
    rc = run(["generate", "--config", str(cfg_path),
              "--out", str(tmp_path / "from_flag")])
    assert rc == 0
    assert (tmp_path / "from_flag" / "manifest.json").exists()
    assert not (tmp_path / "from_config").exists()
    manifest = json.loads(
        (tmp_path / "from_flag" / "manifest.json").read_text())
    assert manifest["master_seed"] == 5  # from file, not overridden

    cfg_path.write_text(json.dumps({"master_seed": "five"}))
    with pytest.raises(ConfigError):
        load_config_file(str(cfg_path))
    cfg_path.write_text(json.dumps({"mystery": 1}))
    with pytest.raises(ConfigError):
        load_config_file(str(cfg_path))


def test_prompt_zero_and_few(small_dataset, tmp_path):
    zero_path = tmp_path / "zero.jsonl"
    rc = run(["prompt", "--dataset", str(small_dataset), "--tier", "easy",
              "--qtype", "static", "--split", "1", "--out",
              str(zero_path)])
    assert rc == 0
    lines = zero_path.read_text().splitlines()
    assert len(lines) == 300
    first = json.loads(lines[0])
    assert first["prompt"].endswith(REASONING_FOOTER)
    assert first["prompt"].count("Where is the package") == 1

    few_path = tmp_path / "few.jsonl"
    rc = run(["prompt", "--dataset", str(small_dataset), "--tier", "easy",
              "--qtype", "static", "--split", "1", "--mode", "few",
              "--out", str(few_path)])
    assert rc == 0
    few = json.loads(few_path.read_text().splitlines()[0])
    assert few["prompt"].count('Answer: ["') == 2


def test_exemplars_come_from_the_next_split(small_dataset):
    assert exemplar_split(1) == 2
    assert exemplar_split(2) == 3
    assert exemplar_split(3) == 1
    pairs = build_prompts(str(small_dataset), "easy", "static", 1, "few")
    donors = {r.question for r in iter_records(
        small_dataset, tiers=("easy",), qtypes=("static",), splits=(2,))}
    _, prompt = pairs[0]
    questions = [b for b in prompt.split("\n\n")
                 if b.startswith("Where is the package")]
    assert len(questions) == 3
    assert questions[0] in donors and questions[1] in donors


def test_few_shot_prompts_are_deterministic(small_dataset):
    a = build_prompts(str(small_dataset), "easy", "static", 1, "few")
    b = build_prompts(str(small_dataset), "easy", "static", 1, "few")
    assert a == b


def test_score_command_end_to_end(small_dataset, tmp_path, capsys):
    responses = tmp_path / "resp.jsonl"
    with responses.open("w") as fh:
        for rec in iter_records(small_dataset):
            ans = " and ".join(rec.answers)
            fh.write(json.dumps({"id": rec.id,
                                 "response": f"Answer: {ans}"}) + "\n")
    report_path = tmp_path / "report.json"
    rc = run(["score", "--dataset", str(small_dataset), "--responses",
              str(responses), "--out", str(report_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "overall accuracy 1.000" in out
    report = json.loads(report_path.read_text())
    assert report["accuracy"] == 1.0
    assert set(report["groups"]) == {"easy/static", "easy/relative"}


def test_inspect_command(capsys):
    rc = run(["inspect", "--scenario", "1", "--tier", "hard_serial",
              "--package", "p1", "--at", "06:00 AM"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "scenario 1" in out
    assert "serial schedule" in out
    assert "p1 at 06:00 AM" in out

    rc = run(["inspect", "--scenario", "1", "--package", "p1"])
    assert rc == 1  # --package without --at
