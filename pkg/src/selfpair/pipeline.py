"""Per-sample strategy dispatch and dataset-level orchestration."""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .blend import BlendSpec
from .copypaste import DEFAULT_MAX_ATTEMPTS, DEFAULT_MAX_INSTANCES, copy_paste_strategy
from .core import ChangeSample, InstanceSet, StrategyResult, child_rng, connected_components, derive_rng
from .exceptions import (InfeasibleCrop, InpaintError, NoInstances, SelfCheckError,
                         SourceUnusable)
from .geometry import crop_pair_strategy
from .inpaint import (DEFAULT_DILATION, DEFAULT_ERASE_FRACTION, DEFAULT_RADIUS,
                      erase_instances_strategy)
from .labelgen import xor_change
from .validation import check_image, check_mask, check_positive_int, check_ratio, check_same_hw

log = logging.getLogger(__name__)

STRATEGIES = ("crop", "inpaint", "copy_paste")
# child stream tags; fixed so adding a strategy never shifts another's draws
_TAGS = {"crop": 1, "inpaint": 2, "copy_paste": 3, "normalize": 9}


class EmptyPlan(Exception):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    crop_size: int = 256
    strategies: Tuple[str, ...] = STRATEGIES
    strategy_weights: Optional[Tuple[float, ...]] = None
    blend: BlendSpec = field(default_factory=BlendSpec)
    erase_fraction: float = DEFAULT_ERASE_FRACTION
    dilation: int = DEFAULT_DILATION
    telea_radius: int = DEFAULT_RADIUS
    max_instances: int = DEFAULT_MAX_INSTANCES
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    global_seed: int = 0
    samples_per_source: int = 1
    swap_inpaint_order: bool = False
    normalize: bool = True

    def __post_init__(self):
        strategies = tuple(self.strategies)
        if not strategies:
            raise ValueError("at least one strategy must be enabled")
        unknown = set(strategies) - set(STRATEGIES)
        if unknown:
            raise ValueError(f"unknown strategies: {sorted(unknown)}")
        if len(set(strategies)) != len(strategies):
            raise ValueError("duplicate strategies")
        object.__setattr__(self, "strategies", strategies)
        if self.strategy_weights is None:
            weights = tuple(1.0 / len(strategies) for _ in strategies)
        else:
            weights = tuple(float(x) for x in self.strategy_weights)
            if len(weights) != len(strategies):
                raise ValueError("one weight per enabled strategy is required")
            if min(weights) < 0 or abs(sum(weights) - 1.0) > 1e-6:
                raise ValueError(f"weights must be nonnegative and sum to 1, got {weights}")
        object.__setattr__(self, "strategy_weights", weights)
        if isinstance(self.blend, dict):
            object.__setattr__(self, "blend", BlendSpec(**self.blend))
        check_positive_int(self.crop_size, "crop_size")
        check_ratio(self.erase_fraction, "erase_fraction", low_inclusive=False)
        check_positive_int(self.dilation, "dilation", minimum=0)
        check_positive_int(self.telea_radius, "telea_radius")
        check_positive_int(self.max_instances, "max_instances")
        check_positive_int(self.max_attempts, "max_attempts")
        check_positive_int(self.samples_per_source, "samples_per_source")

    def to_dict(self):
        d = asdict(self)
        d["strategies"] = list(self.strategies)
        d["strategy_weights"] = list(self.strategy_weights)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["blend"] = BlendSpec(**d["blend"]) if isinstance(d.get("blend"), dict) else d.get("blend", BlendSpec())
        d["strategies"] = tuple(d.get("strategies", STRATEGIES))
        if d.get("strategy_weights") is not None:
            d["strategy_weights"] = tuple(d["strategy_weights"])
        return cls(**d)


def draw_strategy(cfg: PipelineConfig, rng) -> str:
    """First draw of a sample's stream picks the strategy."""
    u = rng.random()
    edges = np.cumsum(cfg.strategy_weights)
    k = int(np.searchsorted(edges, u, side="right"))
    return cfg.strategies[min(k, len(cfg.strategies) - 1)]


def _instances_for(label, instances):
    if instances is None:
        return connected_components(label)
    # objects only count where the binary label marks foreground
    return InstanceSet(np.where(label.astype(bool), instances.labels, 0))


def _run_crop(image, label, instances, cfg, rng):
    first, second = crop_pair_strategy(image, label, cfg.crop_size, rng)
    change = xor_change(first.label, second.label)
    params = {"origins": [list(first.origin), list(second.origin)],
              "quarter_turns": second.quarter_turns}
    return StrategyResult(first.image, second.image, change, first.label, second.label, params)


def _run_inpaint(image, label, instances, cfg, rng):
    return erase_instances_strategy(
        image, label, _instances_for(label, instances), rng,
        erase_fraction=cfg.erase_fraction, dilation=cfg.dilation,
        radius=cfg.telea_radius, swap_order=cfg.swap_inpaint_order)


def _run_copy_paste(image, label, instances, cfg, rng):
    inst = _instances_for(label, instances)
    first, second = crop_pair_strategy(image, label, cfg.crop_size, rng, instances=inst)
    result = copy_paste_strategy(first, second, cfg.blend, rng,
                                 cfg.max_instances, cfg.max_attempts)
    if not result.plan.placements:
        raise EmptyPlan("no instance could be placed")
    result.params.update({"origins": [list(first.origin), list(second.origin)],
                          "quarter_turns": second.quarter_turns})
    return result


_RUNNERS = {"crop": _run_crop, "inpaint": _run_inpaint, "copy_paste": _run_copy_paste}
_RECOVERABLE = (InfeasibleCrop, NoInstances, InpaintError, EmptyPlan)


def _normalize_window(change, size, rng):
    """Top-left of a size x size window, centered on the change when present."""
    h, w = change.shape
    if change.any():
        # centre on one changed object; the bbox of all of them may miss every one
        comps = connected_components(change)
        pick = comps.ids[int(rng.integers(len(comps)))]
        rows, cols = np.nonzero(comps.labels == pick)
        cr = (rows.min() + rows.max()) // 2
        cc = (cols.min() + cols.max()) // 2
    else:
        cr = int(rng.integers(h - size + 1)) + size // 2
        cc = int(rng.integers(w - size + 1)) + size // 2
    r0 = int(np.clip(cr - size // 2, 0, h - size))
    c0 = int(np.clip(cc - size // 2, 0, w - size))
    return r0, c0


def _fallback_order(drawn, cfg):
    rest = [s for s in STRATEGIES if s in cfg.strategies and s != drawn]
    return [drawn] + rest


def _should_verify(sample_index):
    return __debug__ or sample_index % 100 == 0


def synthesize_sample(image, label, cfg: PipelineConfig, sample_index: int,
                      source_id: str = "", instances: Optional[InstanceSet] = None) -> ChangeSample:
    """Derive one change sample from a single-temporal source.

    The strategy is drawn from ``derive_rng(cfg.global_seed, sample_index)``.
    If it cannot be applied to this source the remaining enabled strategies
    are tried in fixed order; :class:`SourceUnusable` is raised only when
    all of them fail.
    """
    image = check_image(image)
    label = check_mask(label, "label")
    check_same_hw(image, label, ("image", "label"))
    if instances is not None and instances.labels.shape != label.shape:
        raise ValueError("instance map does not match label size")
    rng = derive_rng(cfg.global_seed, sample_index)
    drawn = draw_strategy(cfg, rng)

    failures: Dict[str, str] = {}
    result = strategy = None
    order = _fallback_order(drawn, cfg)
    for name in order:
        try:
            result = _RUNNERS[name](image, label, instances, cfg, child_rng(rng, _TAGS[name]))
        except _RECOVERABLE as exc:
            failures[name] = f"{type(exc).__name__}: {exc}"
            # a crowded target degrades to plain crops even if crop is not enabled
            if isinstance(exc, EmptyPlan) and "crop" not in order:
                order.append("crop")
            continue
        strategy = name
        break
    if result is None:
        raise SourceUnusable(source_id, failures)

    provenance = {
        "source_id": source_id,
        "strategy": strategy,
        "drawn_strategy": drawn,
        "seed_path": [int(cfg.global_seed), int(sample_index)],
        "params": result.params,
    }
    if failures:
        provenance["fallback_from"] = failures

    pre, post, change = result.pre, result.post, result.change
    pre_label, post_label = result.pre_label, result.post_label
    size = cfg.crop_size
    if cfg.normalize and strategy == "inpaint" and min(change.shape) >= size \
            and change.shape != (size, size):
        r0, c0 = _normalize_window(change, size, child_rng(rng, _TAGS["normalize"]))
        sl = (slice(r0, r0 + size), slice(c0, c0 + size))
        pre, post, change = pre[sl], post[sl], change[sl]
        pre_label, post_label = pre_label[sl], post_label[sl]
        provenance["window"] = [r0, c0, size]

    if _should_verify(sample_index) and not np.array_equal(change, xor_change(pre_label, post_label)):
        raise SelfCheckError(f"sample {sample_index}: change label is not pre xor post")
    return ChangeSample(pre, post, change, pre_label, post_label, provenance)


@dataclass
class Source:
    image: np.ndarray
    label: np.ndarray
    source_id: str
    instances: Optional[InstanceSet] = None


@dataclass
class SynthesisReport:
    """Sources that could not produce some of their samples."""

    unusable: Dict[str, List[Dict]] = field(default_factory=dict)

    def add(self, source_id, sample_index, exc):
        self.unusable.setdefault(source_id, []).append(
            {"sample_index": sample_index, "failures": exc.failures})

    def __len__(self):
        return len(self.unusable)


def sample_index(source_position, k, cfg):
    return source_position * cfg.samples_per_source + k


def _as_source(item):
    if isinstance(item, Source):
        return item
    return Source(*item)


def _job(args):
    src, cfg, idx = args
    try:
        return idx, synthesize_sample(src.image, src.label, cfg, idx, src.source_id, src.instances), None
    except SourceUnusable as exc:
        return idx, None, exc


def resolve_jobs(jobs=None):
    if jobs is None:
        jobs = int(os.environ.get("SELF_PAIR_JOBS", "1") or 1)
    return max(1, int(jobs))


def synthesize_dataset(sources: Sequence, cfg: PipelineConfig, jobs=None,
                       report: Optional[SynthesisReport] = None) -> Iterator[ChangeSample]:
    """Yield ``cfg.samples_per_source`` samples per source.

    Sample indices depend only on a source's position and the draw number,
    so the content is the same for any worker count. Unusable sources are
    logged into ``report`` instead of aborting the run.
    """
    sources = [_as_source(s) for s in sources]
    if not sources:
        raise ValueError("no sources given")
    report = report if report is not None else SynthesisReport()
    tasks = [(src, cfg, sample_index(pos, k, cfg))
             for pos, src in enumerate(sources) for k in range(cfg.samples_per_source)]
    jobs = resolve_jobs(jobs)
    if jobs == 1:
        results: Iterable = map(_job, tasks)
        for idx, sample, exc in results:
            if exc is not None:
                report.add(exc.source_id, idx, exc)
                log.warning("%s", exc)
            else:
                yield sample
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for idx, sample, exc in pool.map(_job, tasks, chunksize=4):
            if exc is not None:
                report.add(exc.source_id, idx, exc)
                log.warning("%s", exc)
            else:
                yield sample
