"""Command-line entry point: ``selfpair {synth,preview,validate,metrics}``."""
import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .blend import BLEND_MODES, DEFAULT_BETA, DEFAULT_SIGMA, BlendSpec
from .copypaste import DEFAULT_MAX_INSTANCES
from .dataset_io import IMAGE_SUFFIXES, ingest, load_source, read_raster, write_sample
from .exceptions import SelfPairError
from .inpaint import DEFAULT_DILATION, DEFAULT_ERASE_FRACTION, DEFAULT_RADIUS
from .metrics import score_pairs
from .pipeline import STRATEGIES, PipelineConfig, resolve_jobs, synthesize_sample
from .runner import synth_to_dir, validate_dir

log = logging.getLogger("selfpair")


def _csv(kind):
    def parse(text):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    return parse


def _add_synthesis_flags(p):
    p.add_argument("--input", required=True, type=Path, help="dataset root with images/ and masks/")
    p.add_argument("--output", required=True, type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples-per-source", type=int, default=1)
    p.add_argument("--crop-size", type=int, default=256)
    p.add_argument("--strategies", type=_csv(str), default=list(STRATEGIES),
                   help="comma separated subset of " + ",".join(STRATEGIES))
    p.add_argument("--weights", type=_csv(float), default=None,
                   help="comma separated probabilities, one per strategy")
    p.add_argument("--blend", choices=BLEND_MODES, default="fourier")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    p.add_argument("--erase-fraction", type=float, default=DEFAULT_ERASE_FRACTION)
    p.add_argument("--dilation", type=int, default=DEFAULT_DILATION)
    p.add_argument("--radius", type=int, default=DEFAULT_RADIUS, help="inpainting radius")
    p.add_argument("--max-instances", type=int, default=DEFAULT_MAX_INSTANCES)
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $SELF_PAIR_JOBS or 1)")
    p.add_argument("--swap-inpaint-order", action="store_true")
    p.add_argument("--tile", type=int, default=None, help="pre-tile large sources into NxN windows")


def build_parser():
    parser = argparse.ArgumentParser(prog="selfpair", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_synthesis_flags(sub.add_parser("synth", help="synthesize change pairs for a dataset"))
    p = sub.add_parser("preview", help="synthesize a single sample")
    _add_synthesis_flags(p)
    p.add_argument("--index", type=int, default=0, help="sample index to derive")

    p = sub.add_parser("validate", help="re-derive and checksum a synthesized dataset")
    p.add_argument("output", type=Path)

    p = sub.add_parser("metrics", help="IoU/F1 between two directories of masks")
    p.add_argument("pred", type=Path)
    p.add_argument("gt", type=Path)
    p.add_argument("--macro", action="store_true", help="average per-pair scores")
    return parser


def config_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        crop_size=args.crop_size,
        strategies=tuple(args.strategies),
        strategy_weights=tuple(args.weights) if args.weights else None,
        blend=BlendSpec(args.blend, args.beta, args.sigma),
        erase_fraction=args.erase_fraction,
        dilation=args.dilation,
        telea_radius=args.radius,
        max_instances=args.max_instances,
        global_seed=args.seed,
        samples_per_source=args.samples_per_source,
        swap_inpaint_order=args.swap_inpaint_order,
    )


def _cmd_synth(args, cfg):
    # absolute paths keep the manifest valid from any working directory
    args.input = args.input.resolve()
    entries = ingest(args.input, tile=args.tile)
    if not entries:
        print(f"no sources under {args.input}", file=sys.stderr)
        return 1
    records, report = synth_to_dir(entries, cfg, args.output, jobs=resolve_jobs(args.jobs),
                                   input_root=args.input)
    print(f"wrote {len(records)} samples to {args.output}")
    for source_id, failed in sorted(report.unusable.items()):
        print(f"unusable source {source_id}: {len(failed)} sample(s) skipped", file=sys.stderr)
    return 0


def _cmd_preview(args, cfg):
    entries = ingest(args.input, tile=args.tile)
    if not entries:
        print(f"no sources under {args.input}", file=sys.stderr)
        return 1
    pos = args.index // cfg.samples_per_source
    if pos >= len(entries):
        print(f"index {args.index} out of range", file=sys.stderr)
        return 1
    src = load_source(entries[pos])
    sample = synthesize_sample(src.image, src.label, cfg, args.index, src.source_id, src.instances)
    record = write_sample(sample, args.output, f"{args.index:07d}", source=entries[pos], manifest=False)
    print(f"strategy: {record['strategy']}")
    for key, rel in record["files"].items():
        print(f"{key}: {args.output / rel}")
    return 0


def _cmd_validate(args):
    problems = validate_dir(args.output)
    for sid, problem in problems:
        print(f"{sid}: {problem}", file=sys.stderr)
    if problems:
        return 1
    print(f"{args.output}: ok")
    return 0


def _mask_files(d):
    return {p.stem: p for p in sorted(Path(d).iterdir())
            if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES}


def _cmd_metrics(args):
    pred, gt = _mask_files(args.pred), _mask_files(args.gt)
    missing = sorted(set(gt) - set(pred))
    if missing:
        print(f"no prediction for: {', '.join(missing)}", file=sys.stderr)
        return 1
    if not gt:
        print(f"no masks in {args.gt}", file=sys.stderr)
        return 1

    def load(p):
        arr = read_raster(p)
        if arr.ndim == 3:
            arr = arr[:, :, 0]
        return (arr > 0).astype("uint8")

    scores = score_pairs(((load(pred[s]), load(gt[s])) for s in sorted(gt)),
                         average="macro" if args.macro else "micro")
    print(f"IoU: {100 * scores['iou']:.2f}%")
    print(f"F1: {100 * scores['f1']:.2f}%")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("synth", "preview"):
            try:
                cfg = config_from_args(args)
            except (ValueError, TypeError) as exc:
                parser.error(str(exc))
            return _cmd_synth(args, cfg) if args.command == "synth" else _cmd_preview(args, cfg)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_metrics(args)
    except (SelfPairError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
