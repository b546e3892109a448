import json
import os

import numpy as np
import pytest
from PIL import Image

from selfpair.cli import main
from selfpair.dataset_io import MANIFEST, read_manifest


def synth(dataset, out, *extra):
    return main(["synth", "--input", str(dataset), "--output", str(out), "--seed", "7",
                 "--crop-size", "32", "--samples-per-source", "3", *extra])


def test_synth_then_validate(dataset, tmp_path, capsys):
    out = tmp_path / "out"
    assert synth(dataset, out) == 0
    assert len(read_manifest(out)) == 9
    assert main(["validate", str(out)]) == 0
    assert "ok" in capsys.readouterr().out


def test_synth_twice_identical(dataset, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert synth(dataset, a) == 0 and synth(dataset, b) == 0
    assert (a / MANIFEST).read_bytes() == (b / MANIFEST).read_bytes()
    assert main(["validate", str(a)]) == 0 and main(["validate", str(b)]) == 0


def test_unknown_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["synth", "--bogus"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_bad_config_is_usage_error(dataset, tmp_path):
    with pytest.raises(SystemExit) as info:
        synth(dataset, tmp_path / "o", "--strategies", "crop,warp")
    assert info.value.code == 2


def test_validate_detects_corruption(dataset, tmp_path, capsys):
    out = tmp_path / "out"
    assert synth(dataset, out) == 0
    record = read_manifest(out)[4]
    path = out / record["files"]["post"]
    data = bytearray(path.read_bytes())
    data[len(data) // 2] ^= 0xFF
    path.write_bytes(bytes(data))
    assert main(["validate", str(out)]) == 1
    assert record["sample_id"] in capsys.readouterr().err


def test_missing_input_is_data_error(tmp_path):
    (tmp_path / "d" / "images").mkdir(parents=True)
    Image.fromarray(np.zeros((4, 4, 3), np.uint8)).save(tmp_path / "d" / "images" / "a.png")
    assert main(["synth", "--input", str(tmp_path / "d"), "--output", str(tmp_path / "o")]) == 1


def test_preview(dataset, tmp_path, capsys):
    out = tmp_path / "p"
    assert main(["preview", "--input", str(dataset), "--output", str(out), "--crop-size", "32",
                 "--index", "2"]) == 0
    text = capsys.readouterr().out
    assert "strategy:" in text
    assert (out / "t0" / "0000002.png").exists() and (out / "change" / "0000002.png").exists()


def test_jobs_from_environment(dataset, tmp_path, monkeypatch):
    a, b = tmp_path / "a", tmp_path / "b"
    assert synth(dataset, a, "--jobs", "1") == 0
    monkeypatch.setenv("SELF_PAIR_JOBS", "3")
    assert synth(dataset, b) == 0
    assert (a / MANIFEST).read_bytes() == (b / MANIFEST).read_bytes()


def test_metrics_subcommand(tmp_path, capsys):
    pred, gt = tmp_path / "pred", tmp_path / "gt"
    pred.mkdir(), gt.mkdir()
    Image.fromarray(np.array([[255, 255], [0, 0]], np.uint8)).save(pred / "m.png")
    Image.fromarray(np.array([[255, 0], [255, 0]], np.uint8)).save(gt / "m.png")
    assert main(["metrics", str(pred), str(gt)]) == 0
    out = capsys.readouterr().out
    assert "IoU: 33.33%" in out and "F1: 50.00%" in out


def test_metrics_missing_prediction(tmp_path):
    pred, gt = tmp_path / "pred", tmp_path / "gt"
    pred.mkdir(), gt.mkdir()
    Image.fromarray(np.zeros((2, 2), np.uint8)).save(gt / "m.png")
    assert main(["metrics", str(pred), str(gt)]) == 1


def test_unusable_source_reported(tmp_path, capsys):
    from conftest import write_dataset
    data = write_dataset(tmp_path / "d", n=2)
    Image.fromarray(np.zeros((8, 8, 3), np.uint8)).save(data / "images" / "tiny.png")
    Image.fromarray(np.zeros((8, 8), np.uint8)).save(data / "masks" / "tiny.png")
    assert synth(data, tmp_path / "o") == 0
    assert len(read_manifest(tmp_path / "o")) == 6
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert list(report) == ["tiny"]
    assert "tiny" in capsys.readouterr().err
