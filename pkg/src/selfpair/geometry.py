"""Disjoint square crops and quarter-turn rotations of image/label pairs."""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import InstanceSet
from .exceptions import InfeasibleCrop
from .validation import check_image, check_mask, check_positive_int, check_same_hw

MAX_REJECTION_ATTEMPTS = 100


@dataclass(frozen=True)
class Patch:
    image: np.ndarray
    label: np.ndarray
    origin: Tuple[int, int]
    instances: Optional[InstanceSet] = None
    quarter_turns: int = 0

    @property
    def size(self):
        return self.image.shape[:2]


def rectangles_overlap(a, b, size):
    """True when two size x size squares with top-left corners a, b share area."""
    return abs(a[0] - b[0]) < size and abs(a[1] - b[1]) < size


def crops_feasible(height, width, size):
    """Whether two disjoint size x size squares fit in a height x width grid."""
    if height < size or width < size:
        return False
    return height >= 2 * size or width >= 2 * size


def _disjoint_partners(first, n_rows, n_cols, size):
    rows_ok = np.abs(np.arange(n_rows) - first[0]) >= size
    cols_ok = np.abs(np.arange(n_cols) - first[1]) >= size
    return rows_ok[:, None] | cols_ok[None, :]


def _fallback_placement(n_rows, n_cols, size, rng):
    # Positions for the first crop that leave room for a disjoint second one.
    r = np.arange(n_rows)
    c = np.arange(n_cols)
    row_has = (r - size >= 0) | (r + size <= n_rows - 1)
    col_has = (c - size >= 0) | (c + size <= n_cols - 1)
    first_ok = row_has[:, None] | col_has[None, :]
    candidates = np.flatnonzero(first_ok)
    if candidates.size == 0:
        return None
    k = candidates[rng.integers(candidates.size)]
    first = (int(k // n_cols), int(k % n_cols))
    partners = np.flatnonzero(_disjoint_partners(first, n_rows, n_cols, size))
    k2 = partners[rng.integers(partners.size)]
    return first, (int(k2 // n_cols), int(k2 % n_cols))


def sample_disjoint_origins(height, width, size, rng):
    """Top-left corners of two non-overlapping size x size squares."""
    size = check_positive_int(size, "size")
    if not crops_feasible(height, width, size):
        raise InfeasibleCrop(
            f"no two disjoint {size}x{size} crops fit in a {height}x{width} source")
    n_rows, n_cols = height - size + 1, width - size + 1
    for _ in range(MAX_REJECTION_ATTEMPTS):
        a = (int(rng.integers(n_rows)), int(rng.integers(n_cols)))
        b = (int(rng.integers(n_rows)), int(rng.integers(n_cols)))
        if not rectangles_overlap(a, b, size):
            return a, b
    placement = _fallback_placement(n_rows, n_cols, size, rng)
    if placement is None:  # unreachable when crops_feasible holds
        raise InfeasibleCrop(f"no disjoint placement for size {size}")
    return placement


def crop(image, label, origin, size, instances=None) -> Patch:
    r, c = origin
    inst = instances.crop(r, c, size) if instances is not None else None
    return Patch(image[r:r + size, c:c + size].copy(),
                 label[r:r + size, c:c + size].copy(), (int(r), int(c)), inst)


def sample_disjoint_crops(image, label, size, rng, instances=None) -> Tuple[Patch, Patch]:
    image = check_image(image)
    label = check_mask(label, "label")
    check_same_hw(image, label, ("image", "label"))
    a, b = sample_disjoint_origins(image.shape[0], image.shape[1], size, rng)
    return crop(image, label, a, size, instances), crop(image, label, b, size, instances)


def rotate_array(arr, quarter_turns):
    """Rotate clockwise by ``quarter_turns`` x 90 degrees."""
    return np.ascontiguousarray(np.rot90(arr, k=-(quarter_turns % 4), axes=(0, 1)))


def rotate(patch: Patch, quarter_turns: int) -> Patch:
    if quarter_turns not in (0, 1, 2, 3):
        raise ValueError(f"quarter_turns must be in 0..3, got {quarter_turns}")
    inst = None
    if patch.instances is not None:
        inst = InstanceSet(rotate_array(patch.instances.labels, quarter_turns))
    return Patch(rotate_array(patch.image, quarter_turns),
                 rotate_array(patch.label, quarter_turns),
                 patch.origin, inst, (patch.quarter_turns + quarter_turns) % 4)


def crop_pair_strategy(image, label, size, rng, instances=None) -> Tuple[Patch, Patch]:
    """Two disjoint crops; the second is rotated by a uniform quarter turn."""
    first, second = sample_disjoint_crops(image, label, size, rng, instances)
    turns = int(rng.integers(4))
    return first, rotate(second, turns)
