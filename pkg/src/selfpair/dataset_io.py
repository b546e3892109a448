"""Dataset ingestion, lossless sample writing and the JSONL manifest."""
import hashlib
import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from PIL import Image

from .core import ChangeSample, InstanceSet, instances_from_ids
from .exceptions import DimensionMismatch, IoFailure, MissingMask, UndecodableFile
from .pipeline import Source

IMAGE_SUFFIXES = (".png", ".tif", ".tiff", ".jpg", ".jpeg", ".bmp")
MANIFEST = "manifest.jsonl"
CONFIG = "config.json"

_manifest_lock = threading.Lock()


@dataclass(frozen=True)
class SourceEntry:
    stem: str
    image_path: str
    mask_path: str
    mask_kind: str  # "binary" or "instance"
    window: Optional[Tuple[int, int, int, int]] = None  # row, col, height, width

    @property
    def source_id(self):
        if self.window is None:
            return self.stem
        return f"{self.stem}@{self.window[0]}_{self.window[1]}"

    def to_dict(self):
        return {"stem": self.stem, "image_path": self.image_path, "mask_path": self.mask_path,
                "mask_kind": self.mask_kind,
                "window": list(self.window) if self.window is not None else None}

    @classmethod
    def from_dict(cls, d):
        w = d.get("window")
        return cls(d["stem"], d["image_path"], d["mask_path"], d["mask_kind"],
                   tuple(w) if w is not None else None)


def read_raster(path, stem=None):
    """Decode an image file into a numpy array (H, W) or (H, W, C)."""
    try:
        with Image.open(path) as im:
            if im.mode in ("P", "RGBA", "LA", "CMYK", "YCbCr"):
                im = im.convert("RGB")
            arr = np.array(im)
    except (OSError, ValueError, SyntaxError) as exc:
        raise UndecodableFile(stem or Path(path).stem, str(path), str(exc)) from exc
    if arr.dtype == bool:
        arr = arr.astype(np.uint8)
    return arr


def read_image(path, stem=None):
    arr = read_raster(path, stem)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if arr.dtype != np.uint8:
        raise UndecodableFile(stem or Path(path).stem, str(path), f"expected 8-bit, got {arr.dtype}")
    return arr if arr.ndim == 3 else arr[:, :, None]


def mask_kind(values):
    """``binary`` when the value set fits {0, 1, 255}, else ``instance``."""
    return "binary" if set(np.unique(values).tolist()) <= {0, 1, 255} else "instance"


def decode_mask(arr, kind):
    """Binary label and, for instance-id masks, the instance map."""
    if arr.ndim == 3:
        arr = arr[:, :, 0]
    if kind == "binary":
        return (arr > 0).astype(np.uint8), None
    inst = instances_from_ids(arr.astype(np.int64))
    return (arr > 0).astype(np.uint8), inst


def _index_dir(d):
    out = {}
    if d.is_dir():
        for p in sorted(d.iterdir()):
            if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES:
                out.setdefault(p.stem, p)
    return out


def ingest(root, tile=None) -> List[SourceEntry]:
    """Pair ``images/<stem>.*`` with ``masks/<stem>.*`` under ``root``.

    Entries are sorted by stem. With ``tile``, each source is split into
    non-overlapping tile x tile windows (edge remainders dropped).
    """
    root = Path(root)
    images = _index_dir(root / "images")
    masks = _index_dir(root / "masks")
    entries = []
    for stem in sorted(images):
        if stem not in masks:
            raise MissingMask(stem)
        img = read_raster(images[stem], stem)
        msk = read_raster(masks[stem], stem)
        if img.shape[:2] != msk.shape[:2]:
            raise DimensionMismatch(
                f"{stem}: image {img.shape[:2]} and mask {msk.shape[:2]} differ")
        kind = mask_kind(msk)
        if tile is None:
            entries.append(SourceEntry(stem, str(images[stem]), str(masks[stem]), kind))
            continue
        h, w = img.shape[:2]
        for r in range(0, h - tile + 1, tile):
            for c in range(0, w - tile + 1, tile):
                entries.append(SourceEntry(stem, str(images[stem]), str(masks[stem]), kind,
                                           (r, c, tile, tile)))
    return entries


def load_source(entry: SourceEntry) -> Source:
    image = read_image(entry.image_path, entry.stem)
    raw = read_raster(entry.mask_path, entry.stem)
    if entry.window is not None:
        r, c, h, w = entry.window
        image = image[r:r + h, c:c + w]
        raw = raw[r:r + h, c:c + w]
    label, inst = decode_mask(raw, entry.mask_kind)
    return Source(np.ascontiguousarray(image), label, entry.source_id, inst)


def encode_png(arr) -> bytes:
    import io

    arr = np.asarray(arr)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    buf = io.BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def write_png(path, arr):
    data = encode_png(arr)
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return hashlib.sha256(data).hexdigest()


def sha256_file(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_change(path):
    arr = read_raster(path)
    return (arr > 0).astype(np.uint8)


def default_sample_id(sample: ChangeSample):
    return f"{int(sample.provenance['seed_path'][1]):07d}"


def write_sample(sample: ChangeSample, out, sample_id=None, source=None, manifest=True) -> dict:
    """Write ``t0/``, ``t1/`` and ``change/`` PNGs and return the manifest record.

    The change mask is stored as 0/255. With ``manifest`` the record is also
    appended to ``out/manifest.jsonl``.
    """
    out = Path(out)
    if sample_id is None:
        sample_id = default_sample_id(sample)
    files = {"pre": f"t0/{sample_id}.png", "post": f"t1/{sample_id}.png",
             "change": f"change/{sample_id}.png"}
    checksums = {
        "pre": write_png(out / files["pre"], sample.pre),
        "post": write_png(out / files["post"], sample.post),
        "change": write_png(out / files["change"], sample.change * 255),
    }
    prov = sample.provenance
    record = {
        "sample_id": sample_id,
        "source_id": prov.get("source_id", ""),
        "strategy": prov.get("strategy"),
        "seed_path": prov.get("seed_path"),
        "params": prov.get("params", {}),
        "provenance": {k: v for k, v in prov.items()
                       if k not in ("source_id", "strategy", "seed_path", "params")},
        "files": files,
        "checksums": checksums,
    }
    if source is not None:
        record["source"] = source.to_dict() if isinstance(source, SourceEntry) else source
    if manifest:
        append_manifest(out, record)
    return record


def append_manifest(out, record):
    line = json.dumps(record, sort_keys=True, ensure_ascii=False)
    try:
        with _manifest_lock, open(Path(out) / MANIFEST, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot append to manifest in {out}: {exc}") from exc


def read_manifest(out):
    path = Path(out) / MANIFEST
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def read_sample(out, record) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    out = Path(out)
    pre = read_image(out / record["files"]["pre"])
    post = read_image(out / record["files"]["post"])
    change = read_change(out / record["files"]["change"])
    return pre, post, change
