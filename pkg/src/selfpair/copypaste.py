"""Appearance of objects: copy instances between two crops, then blend."""
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .blend import BlendSpec, blend
from .core import InstanceSet, StrategyResult, connected_components
from .exceptions import DimensionMismatch, PlanOutOfBounds
from .geometry import Patch
from .labelgen import xor_change
from .validation import check_image, check_mask, check_positive_int

DEFAULT_MAX_INSTANCES = 8
DEFAULT_MAX_ATTEMPTS = 20


@dataclass(frozen=True)
class Placement:
    instance_id: int
    bbox: Tuple[int, int, int, int]  # row0, col0, row1, col1 (exclusive)
    offset: Tuple[int, int]  # target row/col of the bbox's top-left corner
    pixels: np.ndarray = field(repr=False, compare=False)  # source (row, col)

    def target_pixels(self):
        shift = np.array(self.offset) - np.array(self.bbox[:2])
        return self.pixels + shift

    def as_dict(self):
        return {"instance_id": self.instance_id, "bbox": list(self.bbox),
                "offset": list(self.offset), "n_pixels": int(len(self.pixels))}


@dataclass(frozen=True)
class PastePlan:
    placements: List[Placement]
    dropped: List[int]
    shape: Tuple[int, int]

    def __len__(self):
        return len(self.placements)

    def as_dict(self):
        return {"placements": [p.as_dict() for p in self.placements],
                "dropped": list(self.dropped)}


def plan_paste(source_instances: InstanceSet, target_label, rng,
               max_instances=DEFAULT_MAX_INSTANCES,
               max_attempts=DEFAULT_MAX_ATTEMPTS) -> PastePlan:
    """Choose instances and non-overlapping in-bounds offsets for them.

    Each chosen instance gets up to ``max_attempts`` uniform offsets; one
    that would touch existing target foreground or an earlier placement is
    rejected. Instances that never fit are listed in ``dropped``.
    """
    target_label = check_mask(target_label, "target_label")
    max_instances = check_positive_int(max_instances, "max_instances")
    max_attempts = check_positive_int(max_attempts, "max_attempts")
    h, w = target_label.shape
    ids = source_instances.ids
    if not ids:
        return PastePlan([], [], (h, w))
    k = min(max_instances, len(ids))
    chosen = [int(i) for i in rng.choice(ids, size=k, replace=False)]

    occupied = target_label.astype(bool).copy()
    placements, dropped = [], []
    for inst_id in chosen:
        pix = source_instances.pixels(inst_id)
        r0, c0 = pix.min(axis=0)
        r1, c1 = pix.max(axis=0) + 1
        bh, bw = r1 - r0, c1 - c0
        if bh > h or bw > w:
            dropped.append(inst_id)
            continue
        local = pix - (r0, c0)
        for _ in range(max_attempts):
            dr = int(rng.integers(h - bh + 1))
            dc = int(rng.integers(w - bw + 1))
            tr, tc = local[:, 0] + dr, local[:, 1] + dc
            if not occupied[tr, tc].any():
                occupied[tr, tc] = True
                placements.append(Placement(inst_id, (int(r0), int(c0), int(r1), int(c1)),
                                            (dr, dc), pix))
                break
        else:
            dropped.append(inst_id)
    return PastePlan(placements, dropped, (h, w))


def apply_paste(target_image, target_label, source_image, plan: PastePlan):
    """Write planned source pixels into the target.

    Returns ``(cp_image, cp_label, paste_mask)``.
    """
    target_image = check_image(target_image, "target_image")
    source_image = check_image(source_image, "source_image")
    target_label = check_mask(target_label, "target_label")
    if target_image.shape[:2] != target_label.shape:
        raise DimensionMismatch("target image and label differ in size")
    if source_image.shape[2] != target_image.shape[2]:
        raise DimensionMismatch("source and target differ in channel count")
    h, w = target_label.shape
    cp_image = target_image.copy()
    cp_label = target_label.copy()
    paste_mask = np.zeros_like(target_label)
    for p in plan.placements:
        dst = p.target_pixels()
        if (dst < 0).any() or (dst[:, 0] >= h).any() or (dst[:, 1] >= w).any():
            raise PlanOutOfBounds(f"instance {p.instance_id} leaves the target")
        src = p.pixels
        if (src[:, 0] >= source_image.shape[0]).any() or (src[:, 1] >= source_image.shape[1]).any():
            raise PlanOutOfBounds(f"instance {p.instance_id} outside the source image")
        cp_image[dst[:, 0], dst[:, 1]] = source_image[src[:, 0], src[:, 1]]
        cp_label[dst[:, 0], dst[:, 1]] = 1
        paste_mask[dst[:, 0], dst[:, 1]] = 1
    return cp_image, cp_label, paste_mask


def copy_paste_strategy(patch_pre: Patch, patch_post: Patch, spec: BlendSpec, rng,
                        max_instances=DEFAULT_MAX_INSTANCES,
                        max_attempts=DEFAULT_MAX_ATTEMPTS) -> StrategyResult:
    """Paste objects of ``patch_pre`` into ``patch_post`` and blend.

    The untouched target crop is the pre-event image and the blended,
    pasted one the post-event image, so the change label is exactly the
    pasted pixels. The plan is returned in ``params['plan']``; an empty plan
    yields an unchanged pair.
    """
    if patch_pre.size != patch_post.size:
        raise DimensionMismatch("patches must share a size")
    instances = patch_pre.instances
    if instances is None:
        instances = connected_components(patch_pre.label)
    else:
        # objects cut by the crop keep only their pixels inside the label
        instances = InstanceSet(np.where(patch_pre.label.astype(bool), instances.labels, 0))
    plan = plan_paste(instances, patch_post.label, rng, max_instances, max_attempts)
    cp_image, cp_label, paste_mask = apply_paste(
        patch_post.image, patch_post.label, patch_pre.image, plan)
    post = blend(patch_post.image, cp_image, paste_mask, spec)
    change = xor_change(patch_post.label, cp_label)
    params = {"plan": plan.as_dict(), "blend": spec.as_dict(),
              "pasted_pixels": int(paste_mask.sum())}
    result = StrategyResult(patch_post.image.copy(), post, change,
                            patch_post.label.copy(), cp_label, params)
    result.plan = plan
    return result
