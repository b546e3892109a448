"""Pseudo change labels built from two semantic masks."""
import numpy as np

from .validation import check_mask, check_same_hw


def xor_change(a, b) -> np.ndarray:
    """Pixelwise exclusive-or of two binary masks of equal size."""
    a = check_mask(a, "a")
    b = check_mask(b, "b")
    check_same_hw(a, b, ("a", "b"))
    return np.bitwise_xor(a, b)


def erase_change(label, kept) -> np.ndarray:
    """Change mask for object removal: the foreground pixels outside ``kept``.

    ``kept`` is 1 wherever the scene is left untouched, so the result is
    ``label xor (label and kept)``.
    """
    label = check_mask(label, "label")
    kept = check_mask(kept, "kept")
    check_same_hw(label, kept, ("label", "kept"))
    return xor_change(label, label & kept)
