"""Object removal by fast-marching (Telea) inpainting."""
import heapq
import math

import numpy as np
from scipy import ndimage

from .core import InstanceSet, StrategyResult
from .exceptions import DimensionMismatch, InpaintError, NoInstances
from .labelgen import erase_change
from .validation import check_image, check_mask, check_positive_int, check_ratio

DEFAULT_RADIUS = 5
DEFAULT_DILATION = 2
DEFAULT_ERASE_FRACTION = 0.5

_NEIGHBOURS = ((-1, 0), (1, 0), (0, -1), (0, 1))


def _solve_eikonal(a, b):
    """First-order upwind update from the smallest arrival time on each axis."""
    if a > b:
        a, b = b, a
    if math.isinf(b) or b - a >= 1.0:
        return a + 1.0
    return 0.5 * (a + b + math.sqrt(2.0 - (b - a) ** 2))


def _tentative(T, done, r, c):
    h, w = T.shape
    a = b = math.inf
    if r > 0 and done[r - 1, c]:
        a = T[r - 1, c]
    if r < h - 1 and done[r + 1, c] and T[r + 1, c] < a:
        a = T[r + 1, c]
    if c > 0 and done[r, c - 1]:
        b = T[r, c - 1]
    if c < w - 1 and done[r, c + 1] and T[r, c + 1] < b:
        b = T[r, c + 1]
    return _solve_eikonal(a, b)


def fast_march(region, limit=math.inf):
    """Arrival times inside ``region`` of a front starting on its boundary.

    Pixels outside ``region`` are the source (time 0). Returns ``(T, order)``
    where ``order`` lists region pixels in the order they were finalized,
    i.e. by non-decreasing arrival time. Marching stops once the front
    passes ``limit``; unreached pixels keep ``T = inf``.
    """
    region = np.asarray(region, dtype=bool)
    h, w = region.shape
    T = np.where(region, math.inf, 0.0)
    done = ~region
    heap = []
    seeds = region & ndimage.binary_dilation(~region, structure=ndimage.generate_binary_structure(2, 1))
    for r, c in zip(*np.nonzero(seeds)):
        t = _tentative(T, done, r, c)
        T[r, c] = t
        heap.append((t, int(r), int(c)))
    heapq.heapify(heap)
    order = []
    while heap:
        t, r, c = heapq.heappop(heap)
        if done[r, c] or t > T[r, c]:
            continue
        if t > limit:
            break
        done[r, c] = True
        order.append((r, c))
        for dr, dc in _NEIGHBOURS:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and not done[rr, cc]:
                nt = _tentative(T, done, rr, cc)
                if nt < T[rr, cc]:
                    T[rr, cc] = nt
                    heapq.heappush(heap, (nt, rr, cc))
    if limit != math.inf:
        T[region & ~done] = math.inf
    return T, order


def _grad(T, known, r, c):
    h, w = T.shape
    out = []
    for (r0, c0), (r1, c1) in (((r - 1, c), (r + 1, c)), ((r, c - 1), (r, c + 1))):
        lo = 0 <= r0 < h and 0 <= c0 < w and known[r0, c0]
        hi = 0 <= r1 < h and 0 <= c1 < w and known[r1, c1]
        if lo and hi:
            out.append(0.5 * (T[r1, c1] - T[r0, c0]))
        elif hi:
            out.append(T[r1, c1] - T[r, c])
        elif lo:
            out.append(T[r, c] - T[r0, c0])
        else:
            out.append(0.0)
    return out


def signed_distance(hole, radius):
    """Arrival time into the hole (>= 0) and negated distance outside it.

    The outside distance is only marched out to ``radius + 2``; farther
    known pixels never fall inside a fill window.
    """
    hole = np.asarray(hole, dtype=bool)
    T_in, order = fast_march(hole)
    cap = float(radius) + 2.0
    T_out, _ = fast_march(~hole, limit=cap)
    T_out = np.minimum(T_out, cap)
    return np.where(hole, T_in, -T_out), order


def _weighted_fill(work, T, known, r, c, radius, offsets):
    h, w = known.shape
    dy, dx, d2 = offsets
    rows = r - dy
    cols = c - dx
    inside = (rows >= 0) & (rows < h) & (cols >= 0) & (cols < w)
    rows, cols = rows[inside], cols[inside]
    vy, vx, vd2 = dy[inside], dx[inside], d2[inside]
    sel = known[rows, cols]
    rows, cols, vy, vx, vd2 = rows[sel], cols[sel], vy[sel], vx[sel], vd2[sel]
    if rows.size == 0:
        return None
    gy, gx = _grad(T, known, r, c)
    norm = math.hypot(gy, gx)
    dist = np.sqrt(vd2)
    if norm > 0:
        direction = np.abs(vy * gy + vx * gx) / (norm * dist)
        direction = np.maximum(direction, 1e-6)
    else:
        direction = np.ones_like(dist)
    geometric = 1.0 / vd2
    level = 1.0 / (1.0 + np.abs(T[rows, cols] - T[r, c]))
    weight = direction * geometric * level
    return weight @ work[rows, cols] / weight.sum()


def _window_offsets(radius):
    span = np.arange(-radius, radius + 1)
    dy, dx = np.meshgrid(span, span, indexing="ij")
    d2 = dy ** 2 + dx ** 2
    keep = (d2 > 0) & (d2 <= radius * radius)
    return dy[keep], dx[keep], d2[keep].astype(np.float64)


def telea_inpaint(image, hole, radius=DEFAULT_RADIUS, trace=None):
    """Fill ``hole`` pixels by fast-marching inpainting.

    Unknown pixels are visited in order of arrival time of a front
    propagating inward from the hole boundary. Each one becomes the
    normalized weighted average of the known (original or already filled)
    pixels within ``radius``, weighted by alignment with the front normal,
    inverse squared distance, and closeness in arrival time. Known pixels
    are returned untouched.

    If ``trace`` is a list, the ``(row, col, arrival_time)`` of every filled
    pixel is appended to it in fill order.
    """
    image = check_image(image)
    hole = check_mask(hole, "hole").astype(bool)
    if image.shape[:2] != hole.shape:
        raise DimensionMismatch(f"image {image.shape[:2]} vs hole {hole.shape}")
    radius = check_positive_int(radius, "radius")
    if not hole.any():
        return image.copy()
    if hole.all():
        raise InpaintError("hole covers the whole image")

    T, order = signed_distance(hole, radius)
    work = image.astype(np.float64)
    known = ~hole
    offsets = _window_offsets(radius)
    for r, c in order:
        value = _weighted_fill(work, T, known, r, c, radius, offsets)
        work[r, c] = value
        known[r, c] = True
        if trace is not None:
            trace.append((r, c, float(T[r, c])))
    out = image.copy()
    out[hole] = np.clip(np.rint(work[hole]), 0, 255).astype(np.uint8)
    return out


def disk(radius):
    span = np.arange(-radius, radius + 1)
    return (span[:, None] ** 2 + span[None, :] ** 2) <= radius * radius


def erase_instances_strategy(image, label, instances: InstanceSet, rng,
                             erase_fraction=DEFAULT_ERASE_FRACTION,
                             dilation=DEFAULT_DILATION, radius=DEFAULT_RADIUS,
                             swap_order=False) -> StrategyResult:
    """Remove randomly chosen objects and inpaint the background behind them.

    By default the inpainted image is the pre-event image and the original
    the post-event one, so the objects appear over time. ``swap_order``
    reverses the pair; the change label is the same either way.
    """
    image = check_image(image)
    label = check_mask(label, "label")
    if image.shape[:2] != label.shape or instances.labels.shape != label.shape:
        raise DimensionMismatch("image, label and instance map must share a size")
    erase_fraction = check_ratio(erase_fraction, "erase_fraction", low_inclusive=False)
    ids = instances.ids
    if not ids:
        raise NoInstances("label has no foreground objects")
    k = max(1, math.ceil(erase_fraction * len(ids) - 1e-12))
    chosen = sorted(int(i) for i in rng.choice(ids, size=k, replace=False))

    erased = instances.mask_of(chosen).astype(bool) & label.astype(bool)
    keep = (~erased).astype(np.uint8)
    hole = erased
    if dilation > 0:
        hole = ndimage.binary_dilation(erased, structure=disk(int(dilation)))
        # kept objects stay visible: their pixels are never repainted
        hole &= ~(label.astype(bool) & keep.astype(bool))
    inpainted = telea_inpaint(image, hole.astype(np.uint8), radius)

    change = erase_change(label, keep)
    erased_label = label & keep
    if swap_order:
        pre, post, pre_label, post_label = image.copy(), inpainted, label, erased_label
    else:
        pre, post, pre_label, post_label = inpainted, image.copy(), erased_label, label
    params = {
        "erased_ids": chosen,
        "n_instances": len(ids),
        "hole_pixels": int(hole.sum()),
        "erase_fraction": float(erase_fraction),
        "dilation": int(dilation),
        "radius": int(radius),
        "swap_order": bool(swap_order),
    }
    return StrategyResult(pre, post, change, pre_label, post_label, params)
