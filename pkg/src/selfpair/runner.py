"""Directory-to-directory synthesis and manifest re-validation."""
import functools
import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .dataset_io import (CONFIG, MANIFEST, SourceEntry, encode_png, load_source, read_manifest, read_sample,
                         sha256_file, write_sample, append_manifest)
from .exceptions import SelfPairError, SourceUnusable
from .pipeline import PipelineConfig, SynthesisReport, resolve_jobs, sample_index, synthesize_sample

log = logging.getLogger(__name__)


@functools.lru_cache(maxsize=8)
def _cached_source(entry: SourceEntry):
    return load_source(entry)


def _synth_task(args):
    entry, cfg, idx, out = args
    src = _cached_source(entry)
    try:
        sample = synthesize_sample(src.image, src.label, cfg, idx, src.source_id, src.instances)
    except SourceUnusable as exc:
        return idx, None, exc
    record = write_sample(sample, out, f"{idx:07d}", source=entry, manifest=False)
    return idx, record, None


def synth_to_dir(entries, cfg: PipelineConfig, out, jobs=None, input_root=None):
    """Synthesize every sample for ``entries`` into ``out``.

    Sample files are written by whichever worker derived them; manifest
    lines are appended by this process in sample-index order. Returns
    ``(records, report)``.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = out / MANIFEST
    if manifest.exists():
        manifest.unlink()
    (out / CONFIG).write_text(json.dumps(
        {"pipeline": cfg.to_dict(), "input": str(input_root) if input_root else None},
        indent=2, sort_keys=True) + "\n", encoding="utf-8")
    tasks = [(entry, cfg, sample_index(pos, k, cfg), str(out))
             for pos, entry in enumerate(entries) for k in range(cfg.samples_per_source)]
    report = SynthesisReport()
    records = []
    jobs = resolve_jobs(jobs)

    def consume(results):
        for idx, record, exc in results:
            if exc is not None:
                report.add(exc.source_id, idx, exc)
                log.warning("%s", exc)
                continue
            append_manifest(out, record)
            records.append(record)

    if jobs == 1:
        consume(map(_synth_task, tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            consume(pool.map(_synth_task, tasks, chunksize=4))
    if report.unusable:
        (out / "report.json").write_text(json.dumps(report.unusable, indent=2, sort_keys=True) + "\n",
                                         encoding="utf-8")
    return records, report


def load_config(out) -> PipelineConfig:
    data = json.loads((Path(out) / CONFIG).read_text(encoding="utf-8"))
    return PipelineConfig.from_dict(data["pipeline"])


def validate_dir(out):
    """Check every manifest record against disk and against a re-derivation.

    Returns a list of ``(sample_id, problem)``; empty means valid.
    """
    out = Path(out)
    cfg = load_config(out)
    problems = []
    for record in read_manifest(out):
        sid = record["sample_id"]
        for key, rel in record["files"].items():
            path = out / rel
            if not path.exists():
                problems.append((sid, f"missing {rel}"))
            elif sha256_file(path) != record["checksums"][key]:
                problems.append((sid, f"checksum mismatch in {rel}"))
        if any(p[0] == sid for p in problems):
            continue
        entry = SourceEntry.from_dict(record["source"])
        try:
            src = _cached_source(entry)
            idx = int(record["seed_path"][1])
            sample = synthesize_sample(src.image, src.label, cfg, idx, src.source_id, src.instances)
        except (SelfPairError, OSError) as exc:
            problems.append((sid, f"cannot re-derive: {exc}"))
            continue
        pre, post, change = read_sample(out, record)
        if not (np.array_equal(pre, sample.pre) and np.array_equal(post, sample.post)
                and np.array_equal(change, sample.change)):
            problems.append((sid, "re-derived rasters differ from stored files"))
            continue
        rederived = {"pre": sample.pre, "post": sample.post, "change": sample.change * 255}
        for key, arr in rederived.items():
            if hashlib.sha256(encode_png(arr)).hexdigest() != record["checksums"][key]:
                problems.append((sid, f"re-derived {key} checksum differs"))
    return problems
