"""Shared value types, instance extraction and the seeded random source."""
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Tuple

import numpy as np
from scipy import ndimage

from .validation import check_image, check_mask, check_same_hw

# 3x3 ones: diagonal neighbours belong to the same object.
EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def derive_rng(global_seed: int, sample_index: int) -> np.random.Generator:
    """Generator whose stream depends only on ``(global_seed, sample_index)``."""
    seq = np.random.SeedSequence(entropy=int(global_seed) & 0xFFFFFFFFFFFFFFFF,
                                 spawn_key=(int(sample_index),))
    return np.random.Generator(np.random.PCG64(seq))


def child_rng(rng: np.random.Generator, tag: int) -> np.random.Generator:
    """Deterministic child stream keyed by ``tag``.

    The child depends on the parent's seed sequence, not on how many values
    were already drawn from the parent.
    """
    parent = rng.bit_generator.seed_seq
    seq = np.random.SeedSequence(entropy=parent.entropy,
                                 spawn_key=tuple(parent.spawn_key) + (int(tag),))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class InstanceSet:
    """Per-object pixel regions, stored as an integer id map (0 = background)."""

    labels: np.ndarray

    def __post_init__(self):
        lab = np.asarray(self.labels)
        if lab.ndim != 2:
            raise ValueError("instance map must be 2-D")
        lab = lab.astype(np.int32, copy=True)
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    @property
    def ids(self) -> List[int]:
        return [int(i) for i in np.unique(self.labels) if i != 0]

    def __len__(self):
        return len(self.ids)

    def pixels(self, instance_id: int) -> np.ndarray:
        """(N, 2) array of (row, col) for one instance, in raster order."""
        return np.argwhere(self.labels == instance_id)

    def __iter__(self) -> Iterator[Tuple[int, np.ndarray]]:
        for i in self.ids:
            yield i, self.pixels(i)

    def foreground(self) -> np.ndarray:
        return (self.labels != 0).astype(np.uint8)

    def mask_of(self, ids) -> np.ndarray:
        return np.isin(self.labels, list(ids)).astype(np.uint8) if len(ids) else \
            np.zeros(self.labels.shape, np.uint8)

    def crop(self, row: int, col: int, size: int) -> "InstanceSet":
        return InstanceSet(self.labels[row:row + size, col:col + size])


def connected_components(mask) -> InstanceSet:
    """8-connected components of a binary mask.

    Ids run 1..n in raster-scan order of each component's first pixel.
    """
    mask = check_mask(mask)
    labels, _ = ndimage.label(mask, structure=EIGHT_CONNECTED)
    return InstanceSet(labels)


def instances_from_ids(id_map) -> InstanceSet:
    """Use an instance-id mask as-is; every nonzero value is one object."""
    return InstanceSet(np.asarray(id_map))


@dataclass
class ChangeSample:
    """One synthesized training triple plus everything needed to re-derive it."""

    pre: np.ndarray
    post: np.ndarray
    change: np.ndarray
    pre_label: np.ndarray
    post_label: np.ndarray
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.pre = check_image(self.pre, "pre")
        self.post = check_image(self.post, "post")
        self.change = check_mask(self.change, "change")
        self.pre_label = check_mask(self.pre_label, "pre_label")
        self.post_label = check_mask(self.post_label, "post_label")
        for name, arr in (("post", self.post), ("change", self.change),
                          ("pre_label", self.pre_label), ("post_label", self.post_label)):
            check_same_hw(self.pre, arr, ("pre", name))

    @property
    def shape(self):
        return self.pre.shape[:2]


@dataclass
class StrategyResult:
    """Output of one manipulation strategy before it is wrapped as a sample."""

    pre: np.ndarray
    post: np.ndarray
    change: np.ndarray
    pre_label: np.ndarray
    post_label: np.ndarray
    params: Dict[str, Any] = field(default_factory=dict)

    def __iter__(self):
        # unpacks as the (pre, post, change) triple
        return iter((self.pre, self.post, self.change))
