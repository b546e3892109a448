"""Pixelwise agreement between predicted and reference change masks."""
from dataclasses import dataclass

import numpy as np

from .validation import check_mask, check_same_hw


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp,
                               self.fn + other.fn, self.tn + other.tn)

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


def confusion(pred, gt) -> ConfusionCounts:
    pred = check_mask(pred, "pred").astype(bool)
    gt = check_mask(gt, "gt").astype(bool)
    check_same_hw(pred, gt, ("pred", "gt"))
    tp = int(np.count_nonzero(pred & gt))
    fp = int(np.count_nonzero(pred & ~gt))
    fn = int(np.count_nonzero(~pred & gt))
    return ConfusionCounts(tp, fp, fn, pred.size - tp - fp - fn)


def iou(c: ConfusionCounts) -> float:
    denom = c.tp + c.fp + c.fn
    # nothing positive on either side counts as perfect agreement
    return 1.0 if denom == 0 else c.tp / denom


def f1(c: ConfusionCounts) -> float:
    denom = 2 * c.tp + c.fp + c.fn
    return 1.0 if denom == 0 else 2 * c.tp / denom


def score_pairs(pairs, average="micro"):
    """IoU and F1 over an iterable of (pred, gt) masks.

    ``micro`` pools the counts of every pair; ``macro`` averages the
    per-pair scores.
    """
    if average not in ("micro", "macro"):
        raise ValueError(f"average must be 'micro' or 'macro', got {average!r}")
    counts = [confusion(p, g) for p, g in pairs]
    if not counts:
        raise ValueError("no mask pairs to score")
    if average == "micro":
        total = sum(counts, ConfusionCounts())
        return {"iou": iou(total), "f1": f1(total), "n": len(counts)}
    return {"iou": float(np.mean([iou(c) for c in counts])),
            "f1": float(np.mean([f1(c) for c in counts])), "n": len(counts)}
