"""Behavior of the seeded toy training loop and its CLI."""

import dataclasses
import json

import numpy as np
import pytest
import torch

from sandra import build_all_bases
from sandra_torch import ToyTrainConfig, synthesize_samples, toy_train
from sandra_torch.toy import (
    _calibrate_thresholds,
    _resolve_ontology,
    _soft_unit,
    main,
)

QUICK = dict(samples=48, epochs=2, eval_samples=16, hidden=16)


def test_config_defaults_are_valid():
    cfg = ToyTrainConfig()
    cfg.validate()
    assert cfg.seed == 42
    assert cfg.fixture == "mini_fmnist"


def test_config_from_mapping_roundtrip():
    cfg = ToyTrainConfig.from_mapping({"samples": 10, "lr": 0.5})
    assert cfg.samples == 10 and cfg.lr == 0.5
    assert cfg.epochs == ToyTrainConfig().epochs
    assert ToyTrainConfig.from_mapping(dataclasses.asdict(cfg)) == cfg


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown config keys: momentum"):
        ToyTrainConfig.from_mapping({"momentum": 0.9})


@pytest.mark.parametrize(
    "field,value",
    [
        ("samples", 0),
        ("epochs", -1),
        ("lr", 0.0),
        ("batch_size", 0),
        ("drop_prob", 1.0),
        ("noise", -0.1),
    ],
)
def test_config_validate_rejects_bad_values(field, value):
    with pytest.raises(ValueError):
        dataclasses.replace(ToyTrainConfig(), **{field: value}).validate()


def _dataset(cfg, n, seed=9):
    onto = _resolve_ontology(cfg.fixture)
    bases = build_all_bases(onto)
    rng = np.random.default_rng(seed)
    fmap = rng.standard_normal((cfg.feature_dim, onto.dim)) / np.sqrt(onto.dim)
    return onto, synthesize_samples(onto, bases, n, rng, fmap, cfg)


def test_sample_generation_is_seeded():
    cfg = ToyTrainConfig()
    _, a = _dataset(cfg, 40)
    _, b = _dataset(cfg, 40)
    assert torch.equal(a.features, b.features)
    assert torch.equal(a.targets, b.targets)
    assert torch.equal(a.satisfied, b.satisfied)
    assert torch.equal(a.labels, b.labels)


def test_undropped_samples_satisfy_their_label():
    cfg = dataclasses.replace(ToyTrainConfig(), drop_prob=0.0, distractor_prob=0.0)
    onto, data = _dataset(cfg, 60)
    rows = torch.arange(60)
    assert torch.all(data.satisfied[rows, data.labels])
    assert torch.all(data.targets[rows, data.labels] == 1.0)


def test_targets_stay_in_unit_interval():
    cfg = ToyTrainConfig()
    _, data = _dataset(cfg, 60)
    assert float(data.targets.min()) >= 0.0
    assert float(data.targets.max()) <= 1.0


def test_soft_unit_is_identity_in_live_range():
    p = torch.tensor([0.05, 0.2, 0.5, 0.75, 0.95], dtype=torch.float64)
    assert torch.equal(_soft_unit(p), p)


def test_soft_unit_tails_stay_inside_unit_interval_with_live_gradient():
    p = torch.tensor([0.0, 0.01, 1.0, 1.5, 2.5], dtype=torch.float64)
    p.requires_grad_(True)
    out = _soft_unit(p)
    assert float(out.detach().min()) > 0.0 and float(out.detach().max()) < 1.0
    out.sum().backward()
    assert torch.all(p.grad[:2] > 0)  # bottom tail still pushes
    assert torch.all(p.grad[2:4] > 0)  # top tail still responds
    # monotone overall
    values = _soft_unit(torch.linspace(0, 3, 400, dtype=torch.float64))
    assert torch.all(values[1:] >= values[:-1])


def test_calibrated_threshold_splits_separable_column():
    probs = np.array([[0.1], [0.2], [0.8], [0.9]])
    sat = np.array([[False], [False], [True], [True]])
    tau = _calibrate_thresholds(probs, sat)
    assert tau.shape == (1,)
    assert tau[0] == pytest.approx(0.5)  # widest gap midpoint
    assert (((probs >= tau) == sat).all())


def test_calibrated_threshold_prefers_accuracy_over_margin():
    probs = np.array([[0.1], [0.4], [0.45], [0.5], [0.55], [0.6], [1.4]])
    sat = np.array([[False], [False], [True], [True], [True], [True], [True]])
    tau = _calibrate_thresholds(probs, sat)
    assert 0.4 < tau[0] < 0.45  # perfect split beats the wide 0.6..1.4 gap


def test_calibrated_threshold_handles_single_verdict_column():
    probs = np.array([[0.3], [0.6]])
    tau_all_sat = _calibrate_thresholds(probs, np.array([[True], [True]]))
    assert tau_all_sat[0] < 0.3
    tau_none_sat = _calibrate_thresholds(probs, np.array([[False], [False]]))
    assert tau_none_sat[0] > 0.6


def test_zero_epochs_record_only_initial_loss():
    metrics = toy_train(ToyTrainConfig(**{**QUICK, "epochs": 0}))
    assert metrics["loss"]["bce"] == [metrics["initial_bce"]]
    assert len(metrics["loss"]["ce"]) == 1
    assert metrics["final_bce"] == metrics["initial_bce"]
    assert metrics["eval"]["samples"] == QUICK["eval_samples"]


def test_training_is_reproducible():
    a = toy_train(ToyTrainConfig(**QUICK))
    b = toy_train(ToyTrainConfig(**QUICK))
    assert a["loss"] == b["loss"]
    assert a["eval"] == b["eval"]
    assert a["thresholds"] == b["thresholds"]


def test_short_run_decreases_bce():
    metrics = toy_train(ToyTrainConfig(samples=200, epochs=15, eval_samples=32))
    assert metrics["final_bce"] < metrics["initial_bce"]
    assert len(metrics["loss"]["bce"]) == 16


def test_metrics_record_structure():
    metrics = toy_train(ToyTrainConfig(**QUICK))
    assert metrics["fixture"] == "mini_fmnist"
    assert metrics["descriptions"] == sorted(metrics["descriptions"])
    assert set(metrics["thresholds"]) == set(metrics["descriptions"])
    assert set(metrics["eval"]) == {"samples", "sample_agreement", "pair_agreement"}
    assert metrics["config"]["samples"] == QUICK["samples"]
    for curve in metrics["loss"].values():
        assert len(curve) == QUICK["epochs"] + 1


def test_progress_callback_sees_each_epoch():
    lines = []
    toy_train(ToyTrainConfig(**QUICK), progress=lines.append)
    assert len(lines) == QUICK["epochs"] + 1
    assert lines[0].startswith("epoch   0")


def test_cli_writes_deterministic_metrics(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(QUICK))
    out = tmp_path / "metrics.json"
    assert main(["--config", str(cfg_file), "--out", str(out), "--quiet"]) == 0
    first = out.read_bytes()
    metrics = json.loads(first)
    assert metrics["config"]["samples"] == QUICK["samples"]
    assert main(["--config", str(cfg_file), "--out", str(out), "--quiet"]) == 0
    assert out.read_bytes() == first
    assert capsys.readouterr().out == ""


def test_cli_flag_overrides_config_file(tmp_path):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(QUICK))
    out = tmp_path / "metrics.json"
    assert main(
        ["--config", str(cfg_file), "--epochs", "1", "--out", str(out), "--quiet"]
    ) == 0
    metrics = json.loads(out.read_text())
    assert metrics["config"]["epochs"] == 1
    assert len(metrics["loss"]["bce"]) == 2


def test_cli_prints_progress_and_summary(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(QUICK))
    out = tmp_path / "metrics.json"
    assert main(["--config", str(cfg_file), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "epoch   0" in stdout
    assert "metrics written to" in stdout


def test_cli_rejects_missing_config(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "absent.json"), "--quiet"]) == 1
    assert "cannot read config" in capsys.readouterr().err


def test_cli_rejects_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["--config", str(bad), "--quiet"]) == 1
    assert "JSON object" in capsys.readouterr().err
    bad.write_text("{nope")
    assert main(["--config", str(bad), "--quiet"]) == 1
    assert "not valid JSON" in capsys.readouterr().err


def test_cli_rejects_unknown_config_key(tmp_path, capsys):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"momentum": 0.9}))
    assert main(["--config", str(cfg_file), "--quiet"]) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_cli_rejects_unknown_fixture(tmp_path, capsys):
    out = tmp_path / "metrics.json"
    code = main(["--fixture", "no_such_ontology", "--out", str(out), "--quiet"])
    assert code == 1
    assert not out.exists()
