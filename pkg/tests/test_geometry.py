import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import disjoint_placements_exist, intersection_area, rotate_cw_by_index
from selfpair.core import derive_rng
from selfpair.exceptions import InfeasibleCrop
from selfpair.geometry import (Patch, crop_pair_strategy, crops_feasible, rotate,
                               sample_disjoint_crops, sample_disjoint_origins)
from selfpair.labelgen import xor_change


def test_large_source_crops_are_disjoint():
    img = np.zeros((1024, 1024, 3), np.uint8)
    lab = np.zeros((1024, 1024), np.uint8)
    a, b = sample_disjoint_crops(img, lab, 512, derive_rng(1, 0))
    assert intersection_area(a.origin, b.origin, 512) == 0
    assert a.image.shape == (512, 512, 3) and b.label.shape == (512, 512)


def test_exact_fit_is_infeasible():
    with pytest.raises(InfeasibleCrop):
        sample_disjoint_origins(512, 512, 512, derive_rng(0, 0))


@pytest.mark.parametrize("seed", range(5))
def test_512_by_513_with_256_succeeds(seed):
    # rows 512 >= 2 * 256, so a row-separated pair exists
    assert disjoint_placements_exist(512, 513, 256)
    a, b = sample_disjoint_origins(512, 513, 256, derive_rng(seed, 0))
    assert intersection_area(a, b, 256) == 0


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 14), st.integers(1, 14), st.integers(1, 7), st.integers(0, 2**32))
def test_feasibility_matches_enumeration(h, w, size, seed):
    expected = disjoint_placements_exist(h, w, size)
    assert crops_feasible(h, w, size) == expected
    if expected:
        a, b = sample_disjoint_origins(h, w, size, np.random.default_rng(seed))
        assert intersection_area(a, b, size) == 0
        assert 0 <= a[0] <= h - size and 0 <= b[1] <= w - size
    else:
        with pytest.raises(InfeasibleCrop):
            sample_disjoint_origins(h, w, size, np.random.default_rng(seed))


def test_fallback_path_handles_tight_layouts():
    # 1 x 2*size leaves exactly one disjoint pair; rejection rarely finds it
    for seed in range(20):
        a, b = sample_disjoint_origins(8, 16, 8, np.random.default_rng(seed))
        assert {a, b} == {(0, 0), (0, 8)}


def _patch(arr):
    arr = np.asarray(arr, np.uint8)
    return Patch(arr[:, :, None], (arr > 2).astype(np.uint8), (0, 0))


def test_rotate_identity():
    p = _patch([[1, 2], [3, 4]])
    q = rotate(p, 0)
    assert np.array_equal(q.image, p.image) and np.array_equal(q.label, p.label)


def test_rotate_clockwise_example():
    p = _patch([[1, 2], [3, 4]])
    q = rotate(p, 1)
    expected = rotate_cw_by_index(np.array([[1, 2], [3, 4]], np.uint8))
    assert expected.tolist() == [[3, 1], [4, 2]]
    assert np.array_equal(q.image[:, :, 0], expected)


def test_rotate_odd_turns_swap_dims(rng):
    img = rng.integers(0, 256, (3, 5, 3), dtype=np.uint8)
    p = Patch(img, np.zeros((3, 5), np.uint8), (1, 2))
    q = rotate(p, 1)
    assert q.image.shape == (5, 3, 3) and q.label.shape == (5, 3)
    assert np.array_equal(q.image, rotate_cw_by_index(img))
    assert q.origin == (1, 2)


def test_rotate_four_times_is_identity(rng):
    img = rng.integers(0, 256, (6, 6, 3), dtype=np.uint8)
    p = Patch(img, rng.integers(0, 2, (6, 6), dtype=np.uint8), (0, 0))
    q = p
    for _ in range(4):
        q = rotate(q, 1)
    assert np.array_equal(q.image, p.image) and np.array_equal(q.label, p.label)


def test_rotation_preserves_pixel_multiset(rng):
    img = rng.integers(0, 256, (7, 7, 1), dtype=np.uint8)
    q = rotate(Patch(img, np.zeros((7, 7), np.uint8), (0, 0)), 3)
    assert np.array_equal(np.sort(q.image.ravel()), np.sort(img.ravel()))


def test_crop_pair_repeatable(scene):
    image, label = scene
    a1, b1 = crop_pair_strategy(image, label, 32, derive_rng(5, 9))
    a2, b2 = crop_pair_strategy(image, label, 32, derive_rng(5, 9))
    assert (a1.origin, b1.origin, b1.quarter_turns) == (a2.origin, b2.origin, b2.quarter_turns)
    assert np.array_equal(b1.image, b2.image)


def test_crop_pair_label_lockstep(scene):
    image, label = scene
    for idx in range(20):
        first, second = crop_pair_strategy(image, label, 32, derive_rng(2, idx))
        r, c = second.origin
        raw = label[r:r + 32, c:c + 32]
        expected = raw
        for _ in range(second.quarter_turns):
            expected = rotate_cw_by_index(expected)
        assert np.array_equal(second.label, expected)
        r, c = first.origin
        assert np.array_equal(first.label, label[r:r + 32, c:c + 32])
        assert np.array_equal(first.image, image[r:r + 32, c:c + 32])
        assert first.quarter_turns == 0


def test_all_background_gives_empty_change():
    image = np.full((64, 64, 3), 90, np.uint8)
    label = np.zeros((64, 64), np.uint8)
    first, second = crop_pair_strategy(image, label, 16, derive_rng(0, 0))
    assert not xor_change(first.label, second.label).any()
