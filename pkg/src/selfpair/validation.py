"""Input validation helpers, in the spirit of ``sklearn.utils.check_array``."""
import numbers

import numpy as np

from .exceptions import DimensionMismatch, EmptyImage


def check_image(image, name="image"):
    """Return ``image`` as a C-contiguous ``uint8`` array of shape (H, W, C).

    2-D input is treated as a single-channel image. Only 1 or 3 channels
    are accepted.
    """
    arr = np.asarray(image)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"{name} must be 2-D or 3-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise EmptyImage(f"{name} has zero extent: {arr.shape}")
    if arr.shape[2] not in (1, 3):
        raise ValueError(f"{name} must have 1 or 3 channels, got {arr.shape[2]}")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) and arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError(f"{name} values outside the 8-bit range")
        if np.issubdtype(arr.dtype, np.floating):
            raise TypeError(f"{name} must hold 8-bit integers, got {arr.dtype}")
        arr = arr.astype(np.uint8)
    return np.ascontiguousarray(arr)


def check_mask(mask, name="mask"):
    """Return ``mask`` as a ``uint8`` (H, W) array with values in {0, 1}."""
    arr = np.asarray(mask)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise EmptyImage(f"{name} has zero extent: {arr.shape}")
    if arr.dtype == bool:
        return arr.astype(np.uint8)
    if arr.size and (arr.min() < 0 or arr.max() > 1 or
                     (not np.issubdtype(arr.dtype, np.integer) and not np.isin(arr, (0, 1)).all())):
        raise ValueError(f"{name} must be binary (0/1)")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def check_same_hw(a, b, names=("a", "b")):
    if np.shape(a)[:2] != np.shape(b)[:2]:
        raise DimensionMismatch(
            f"{names[0]} {np.shape(a)[:2]} and {names[1]} {np.shape(b)[:2]} differ in size"
        )


def check_ratio(value, name, *, low=0.0, high=1.0, low_inclusive=True):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    ok_low = value >= low if low_inclusive else value > low
    if not (ok_low and value <= high):
        bracket = "[" if low_inclusive else "("
        raise ValueError(f"{name} must lie in {bracket}{low}, {high}], got {value}")
    return float(value)


def check_positive_int(value, name, minimum=1):
    if not isinstance(value, numbers.Integral) or isinstance(value, bool):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)
