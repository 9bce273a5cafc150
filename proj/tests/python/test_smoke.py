import json
import math
import os
import subprocess

import numpy as np
import pytest

import uqgrade


def test_method_registry():
    assert len(uqgrade.METHODS) == 14
    assert uqgrade.METHODS[0] == "numset"
    assert uqgrade.METHODS[-1] == "nli_dse"


def test_categorical_measures():
    labels = [1, 1, 2, 2, 3]
    assert uqgrade.numset(labels) == 3
    assert uqgrade.mar(labels) == pytest.approx(0.6)
    assert uqgrade.categorical_entropy(labels) == pytest.approx(1.0549201679861442, abs=1e-12)
    assert uqgrade.fsd(labels) == pytest.approx(1.0)
    # None is its own category.
    assert uqgrade.numset([None, None, 1]) == 2
    with pytest.raises(ValueError):
        uqgrade.mar([1])


def test_graph_measures():
    s = np.full((3, 3), 0.5)
    np.fill_diagonal(s, 1.0)
    assert uqgrade.nad(s) == pytest.approx(0.5)
    assert uqgrade.eccentricity(s) == pytest.approx(0.5)
    value, lam2, capped = uqgrade.eigen_uncertainty(np.ones((4, 4)))
    assert value == pytest.approx(0.25) and lam2 == pytest.approx(4.0) and not capped
    d = np.eye(5)
    d[:3, :3] = 0.9
    d[3:, 3:] = 0.9
    np.fill_diagonal(d, 1.0)
    assert uqgrade.semantic_entropy(d) == pytest.approx(0.6730116670092565, abs=1e-12)
    with pytest.raises(ValueError):
        uqgrade.nad(np.array([[1.0, 0.2], [0.3, 1.0]]))


def test_evaluate_method_uses_prefixes():
    v, capped = uqgrade.evaluate_method("ce", [1, 1, 2, 2, 3], k=2)
    assert v == 0.0 and not capped
    v, _ = uqgrade.evaluate_method("jaccard_nad", [1, 1], {"jaccard": np.ones((2, 2))})
    assert v == 0.0


def test_effectiveness_against_pairs():
    u = [0.1, 0.4, 0.4, 0.9]
    correct = [True, True, False, False]
    pairs = [(i, j) for i in range(4) if not correct[i] for j in range(4) if correct[j]]
    want = sum(1.0 if u[i] > u[j] else 0.5 if u[i] == u[j] else 0.0 for i, j in pairs) / len(pairs)
    assert uqgrade.auroc(u, correct) == pytest.approx(want, abs=1e-12)
    assert uqgrade.auroc([0.1, 0.2], [True, True]) is None
    err = [0 if c else 1 for c in correct]
    assert uqgrade.auarc(u, correct) + uqgrade.auerc(u, err) == pytest.approx(1.0, abs=1e-9)
    assert uqgrade.c_index(u, [0, 1, 2, 3]) == pytest.approx(uqgrade.c_index([math.exp(x) for x in u], [0, 1, 2, 3]))


def test_stability_measures():
    assert uqgrade.change_ratio([1.0, 1.0, 1.0]) == 0.0
    assert uqgrade.change_ratio([1.0, 2.0], mode="absolute") == 1.0
    assert uqgrade.stepwise_spearman([[1, 3], [2, 2], [3, 1]]) == pytest.approx(-1.0)
    assert uqgrade.pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.9819805060619656)


def _write_responses(path, items=8):
    verdicts = ["wrong", "mostly wrong", "half right", "correct"]
    with open(path, "w") as f:
        for i in range(items):
            gold = i % 4
            samples = []
            for s in range(5):
                score = gold if s < 5 - i % 4 else (gold + 1) % 4
                samples.append({"score": score, "rationale": f"The answer is {verdicts[score]}."})
            f.write(json.dumps({"item_id": f"it{i}", "model": "m", "question": "q1",
                                "strategy": "zero_shot", "gold": gold, "label_min": 0,
                                "label_max": 3, "samples": samples}) + "\n")


def test_parse_and_commands(tmp_path):
    src = tmp_path / "responses.jsonl"
    _write_responses(src)
    records, rejects = uqgrade.parse_responses(str(src))
    assert len(records) == 8 and rejects == []

    out = tmp_path / "out"
    res = uqgrade.compute(input=str(src), out_dir=str(out), methods=["ce", "mar"])
    assert res["exit_code"] == 0
    with open(out / "scores.csv") as f:
        assert len(f.read().strip().splitlines()) == 1 + 16

    assert uqgrade.eval_scores(input=str(src), out_dir=str(out))["exit_code"] == 0
    assert uqgrade.stability(out_dir=str(out))["exit_code"] == 0
    assert uqgrade.correlate(out_dir=str(out))["exit_code"] == 0
    assert uqgrade.report(input=str(src), out_dir=str(out))["exit_code"] == 0
    assert (out / "report" / "rank_effectiveness.csv").exists()

    gap = uqgrade.compute(input=str(src), out_dir=str(tmp_path / "gap"), methods=["nli_dse"])
    assert gap["exit_code"] == 2
    assert any("nli_dse" in m for m in gap["messages"])

    with pytest.raises(TypeError):
        uqgrade.compute(input=str(src), bogus=1)


@pytest.mark.skipif("UQ_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_module(tmp_path):
    src = tmp_path / "responses.jsonl"
    _write_responses(src)
    subprocess.run([os.environ["UQ_CLI"], "compute", "--input", str(src), "--out-dir",
                    str(tmp_path / "cli"), "--methods", "ce,mar"], check=True, capture_output=True)
    uqgrade.compute(input=str(src), out_dir=str(tmp_path / "py"), methods=["ce", "mar"])
    assert (tmp_path / "cli" / "scores.csv").read_bytes() == (tmp_path / "py" / "scores.csv").read_bytes()
