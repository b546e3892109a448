import numpy as np
import pytest

from conftest import make_scene
from selfpair.blend import BlendSpec
from selfpair.core import InstanceSet, derive_rng
from selfpair.exceptions import SourceUnusable
from selfpair.labelgen import xor_change
from selfpair.pipeline import (PipelineConfig, Source, SynthesisReport, draw_strategy,
                               synthesize_dataset, synthesize_sample)


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(strategies=())
    with pytest.raises(ValueError):
        PipelineConfig(strategies=("crop", "warp"))
    with pytest.raises(ValueError):
        PipelineConfig(strategy_weights=(0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        PipelineConfig(strategies=("crop",), strategy_weights=(0.5, 0.5))
    cfg = PipelineConfig(strategies=("crop", "inpaint"))
    assert cfg.strategy_weights == (0.5, 0.5)


def test_config_round_trip():
    cfg = PipelineConfig(crop_size=32, strategies=("inpaint", "crop"), blend=BlendSpec("gaussian", 0.1, 1.5),
                         global_seed=99)
    assert PipelineConfig.from_dict(cfg.to_dict()) == cfg


def test_only_crop_enabled(scene):
    image, label = scene
    cfg = PipelineConfig(crop_size=32, strategies=("crop",))
    for i in range(10):
        assert synthesize_sample(image, label, cfg, i).provenance["strategy"] == "crop"


def test_draw_frequencies_small():
    cfg = PipelineConfig()
    draws = [draw_strategy(cfg, derive_rng(1, i)) for i in range(3000)]
    for s in cfg.strategies:
        assert abs(draws.count(s) / 3000 - 1 / 3) < 0.03


def test_weighted_draw_zero_weight_never_drawn():
    cfg = PipelineConfig(strategy_weights=(0.5, 0.0, 0.5))
    draws = {draw_strategy(cfg, derive_rng(4, i)) for i in range(500)}
    assert draws == {"crop", "copy_paste"}


def test_sample_repeatable(scene):
    image, label = scene
    cfg = PipelineConfig(crop_size=32, global_seed=5)
    for i in range(6):
        a = synthesize_sample(image, label, cfg, i, "s")
        b = synthesize_sample(image, label, cfg, i, "s")
        assert a.provenance == b.provenance
        for x, y in ((a.pre, b.pre), (a.post, b.post), (a.change, b.change)):
            assert x.tobytes() == y.tobytes()


def test_every_sample_is_sound_and_tile_sized():
    cfg = PipelineConfig(crop_size=32, global_seed=3)
    seen = set()
    for i in range(45):
        image, label = make_scene(i % 5)
        s = synthesize_sample(image, label, cfg, i)
        seen.add(s.provenance["strategy"])
        assert s.pre.shape == (32, 32, 3) and s.change.shape == (32, 32)
        assert np.array_equal(s.change, xor_change(s.pre_label, s.post_label))
    assert seen == {"crop", "inpaint", "copy_paste"}


def test_inpaint_without_normalize_keeps_source_size(scene):
    image, label = scene
    cfg = PipelineConfig(crop_size=32, strategies=("inpaint",), normalize=False)
    s = synthesize_sample(image, label, cfg, 0)
    assert s.pre.shape == image.shape
    assert np.array_equal(s.post, image)


def test_fallback_when_no_instances():
    image = np.full((64, 64, 3), 50, np.uint8)
    label = np.zeros((64, 64), np.uint8)
    cfg = PipelineConfig(crop_size=16, strategies=("inpaint", "crop"))
    idx = next(i for i in range(100) if draw_strategy(cfg, derive_rng(0, i)) == "inpaint")
    s = synthesize_sample(image, label, cfg, idx)
    assert s.provenance["drawn_strategy"] == "inpaint"
    assert s.provenance["strategy"] == "crop"
    assert "inpaint" in s.provenance["fallback_from"]


def test_unusable_source_raises():
    image = np.full((20, 20, 3), 50, np.uint8)
    label = np.zeros((20, 20), np.uint8)
    cfg = PipelineConfig(crop_size=16)
    with pytest.raises(SourceUnusable) as info:
        synthesize_sample(image, label, cfg, 0, "tiny")
    assert set(info.value.failures) == {"crop", "inpaint", "copy_paste"}


def test_instance_map_is_used(scene):
    image, label = scene
    ids = np.zeros(label.shape, np.int32)
    ids[label == 1] = 1  # everything is a single object
    cfg = PipelineConfig(strategies=("inpaint",), normalize=False)
    s = synthesize_sample(image, label, cfg, 0, instances=InstanceSet(ids))
    assert s.provenance["params"]["n_instances"] == 1
    assert np.array_equal(s.change, label)


def _sources(n):
    return [Source(*make_scene(i), f"src{i}") for i in range(n)]


def test_dataset_counts_and_indices():
    cfg = PipelineConfig(crop_size=32, samples_per_source=3)
    samples = list(synthesize_dataset(_sources(2), cfg))
    assert len(samples) == 6
    assert len({tuple(s.provenance["seed_path"]) for s in samples}) == 6


def test_dataset_reports_unusable_source():
    srcs = _sources(5)
    srcs[2] = Source(np.zeros((10, 10, 3), np.uint8), np.zeros((10, 10), np.uint8), "bad")
    cfg = PipelineConfig(crop_size=32, samples_per_source=2)
    report = SynthesisReport()
    samples = list(synthesize_dataset(srcs, cfg, report=report))
    assert len(samples) == 8
    assert list(report.unusable) == ["bad"] and len(report) == 1


def test_dataset_parallel_matches_serial():
    cfg = PipelineConfig(crop_size=32, samples_per_source=2, global_seed=11)
    serial = list(synthesize_dataset(_sources(3), cfg, jobs=1))
    parallel = list(synthesize_dataset(_sources(3), cfg, jobs=3))
    key = lambda s: (s.pre.tobytes(), s.post.tobytes(), s.change.tobytes())
    assert sorted(map(key, serial)) == sorted(map(key, parallel))
