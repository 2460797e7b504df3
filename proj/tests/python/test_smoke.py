"""Smoke tests for the _atoms extension module."""

import json

import pytest

import _atoms

TASKS = list(_atoms.task_ids)


def test_module_surface():
    assert len(TASKS) == 10
    assert TASKS[0] == "reality"
    assert _atoms.__version__
    assert _atoms.template_version


@pytest.fixture(scope="module")
def small_dataset():
    return _atoms.generate(seed=7, count=2)


def test_generate_counts_and_fields(small_dataset):
    assert len(small_dataset) == 2 * len(TASKS)
    record = json.loads(small_dataset[0])
    assert list(record) == [
        "task_id",
        "seed",
        "question",
        "options",
        "gold",
        "prompt_sections",
        "latent",
        "board_renders",
    ]
    letters = [o["letter"] for o in record["options"]]
    assert letters == [chr(ord("A") + i) for i in range(len(letters))]
    assert record["gold"] in letters


def test_generation_is_deterministic(small_dataset):
    again = _atoms.generate(seed=7, count=2)
    assert small_dataset == again
    assert _atoms.generate(seed=8, count=2) != small_dataset


def test_render_prompt_modes(small_dataset):
    line = small_dataset[0]
    zero = _atoms.render_prompt(line, "zero")
    assert zero.startswith("This is a grid-like 2D world")
    assert zero.endswith("Do not generate any text other than the letter")
    cot = _atoms.render_prompt(line, "cot")
    assert "Answer: X" in cot
    oneshot = _atoms.oneshot_prompt(line, 7)
    assert oneshot.endswith(zero)
    assert len(oneshot) > len(zero)


def test_extract_answer():
    assert _atoms.extract_answer("B", "ABC") == "B"
    assert _atoms.extract_answer("The answer is C.", "ABC") == "C"
    assert _atoms.extract_answer("hmm", "AB") == ""
    assert _atoms.extract_answer("thinking... Answer: b", "ABC", "final_line") == "B"


def test_oracle_closure(small_dataset):
    assert _atoms.oracle_accuracy(small_dataset, "zero") == 1.0
    assert _atoms.oracle_accuracy(small_dataset, "cot") == 1.0


def test_manifest_roundtrip():
    manifest = json.loads(_atoms.manifest_json(seed=7, count=100))
    assert manifest["suite_seed"] == 7
    assert manifest["counts"]["belief2"] == 100
