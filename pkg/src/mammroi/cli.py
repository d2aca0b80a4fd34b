"""Command line front end.

Subcommands: segment, roi, eval, phantom. Exit codes: 0 success,
1 usage error, 2 I/O error (missing or unreadable inputs), 3 config
error. Batch runs log per-image failures and continue; outputs are
written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import evaluation, phantom, pipeline, raster
from .config import ConfigError, PipelineConfig, apply_overrides, load_config

log = logging.getLogger("mammroi")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONFIG = 3

_IMAGE_EXTS = (".png", ".pgm", ".ppm")


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage failures exit 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(parser):
    parser.add_argument("--config", metavar="FILE",
                        help="JSON config file (defaults used when omitted)")
    parser.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config value; repeatable")
    parser.add_argument("--out", default=".", metavar="DIR",
                        help="output directory (default: current directory)")


def build_parser() -> _Parser:
    parser = _Parser(prog="mammroi",
                     description="Mammogram ROI localization pipeline")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_seg = sub.add_parser("segment", help="write segmentation masks")
    _add_common(p_seg)
    p_seg.add_argument("images", nargs="+", metavar="IMAGE",
                       help="image files or directories")
    p_seg.add_argument("--dump-stages", action="store_true",
                       help="also write each intermediate stage image")
    p_seg.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="process up to N images concurrently")

    p_roi = sub.add_parser("roi", help="localize regions of interest")
    _add_common(p_roi)
    p_roi.add_argument("images", nargs="+", metavar="IMAGE",
                       help="image files or directories")
    p_roi.add_argument("--dump-stages", action="store_true",
                       help="also write each intermediate stage image")
    p_roi.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="process up to N images concurrently")

    p_eval = sub.add_parser("eval", help="score the pipeline on a dataset")
    _add_common(p_eval)
    p_eval.add_argument("--images", required=True, metavar="DIR",
                        help="directory of images to evaluate")
    p_eval.add_argument("--truth", required=True, metavar="FILE",
                        help="ground truth boxes (image_id,x,y,width,height)")
    p_eval.add_argument("--report", required=True, metavar="FILE",
                        help="where to write the JSON report")
    p_eval.add_argument("--jobs", type=int, default=1, metavar="N")

    p_ph = sub.add_parser("phantom", help="generate a synthetic test suite")
    _add_common(p_ph)
    p_ph.add_argument("--count", type=int, default=10, metavar="N",
                      help="number of phantoms (even; half carry a mass)")
    p_ph.add_argument("--seed", type=int, default=0, metavar="SEED")
    return parser


def _build_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    if args.overrides:
        cfg = apply_overrides(cfg, args.overrides)
    if getattr(args, "dump_stages", False):
        cfg = apply_overrides(cfg, ["io.dump_stages=true"])
    return cfg


def _collect_images(paths):
    """Expand files and directories into a sorted image list.

    Missing paths and empty directories are I/O errors.
    """
    found = []
    for p in paths:
        if os.path.isdir(p):
            entries = sorted(
                os.path.join(p, name) for name in os.listdir(p)
                if name.lower().endswith(_IMAGE_EXTS))
            if not entries:
                raise FileNotFoundError(f"no images in directory {p}")
            found.extend(entries)
        elif os.path.isfile(p):
            found.append(p)
        else:
            raise FileNotFoundError(f"input not found: {p}")
    return found


def _run_batch(images, worker, jobs):
    """Apply worker to every image, logging failures. Returns #succeeded."""
    def safe(path):
        try:
            worker(path)
            return True
        except Exception as exc:
            log.error("skipping %s: %s", path, exc)
            return False

    if jobs > 1 and len(images) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(safe, images))
    else:
        results = [safe(p) for p in images]
    return sum(results)


def _cmd_segment(args) -> int:
    cfg = _build_config(args)
    images = _collect_images(args.images)
    def worker(path):
        mask_path, _ = pipeline.run_segment(path, cfg, args.out,
                                            dump_stages=cfg.io.dump_stages)
        log.info("wrote %s", mask_path)
    ok = _run_batch(images, worker, args.jobs)
    if ok == 0:
        log.error("all %d images failed", len(images))
        return EXIT_IO
    return EXIT_OK


def _cmd_roi(args) -> int:
    cfg = _build_config(args)
    images = _collect_images(args.images)
    def worker(path):
        record, _ = pipeline.run_roi(path, cfg, args.out,
                                     dump_stages=cfg.io.dump_stages)
        log.info("%s: %d boxes", record["image"], len(record["boxes"]))
    ok = _run_batch(images, worker, args.jobs)
    if ok == 0:
        log.error("all %d images failed", len(images))
        return EXIT_IO
    return EXIT_OK


def _cmd_eval(args) -> int:
    cfg = _build_config(args)
    if not os.path.isdir(args.images):
        raise FileNotFoundError(f"image directory not found: {args.images}")
    truth = evaluation.load_ground_truth(args.truth)
    samples = []
    for path in _collect_images([args.images]):
        image_id = os.path.splitext(os.path.basename(path))[0]
        try:
            img = raster.load_image(path)
        except raster.RasterError as exc:
            log.error("skipping %s: %s", path, exc)
            continue
        samples.append(evaluation.EvalSample(
            image_id=image_id, image=img,
            gt_boxes=tuple(truth.get(image_id, ()))))
    report = evaluation.evaluate(samples, cfg, jobs=args.jobs)
    payload = report.to_dict()
    payload["config"] = cfg.to_dict()
    pipeline._atomic_write_text(
        args.report, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    log.info("hit rate %.3f (%d/%d positives), %d/%d negatives clean",
             report.roi_hit_rate, report.roi_hits, report.n_positive,
             report.clean_negatives, report.n_negative)
    return EXIT_OK


def _cmd_phantom(args) -> int:
    if args.count <= 0 or args.count % 2 != 0:
        print("mammroi phantom: error: --count must be positive and even",
              file=sys.stderr)
        return EXIT_USAGE
    os.makedirs(args.out, exist_ok=True)
    truth = {}
    for i, (img, gts) in enumerate(phantom.phantom_suite(args.count, args.seed)):
        image_id = f"phantom_{i:04d}"
        raster.save_image(img, os.path.join(args.out, image_id + ".png"))
        if gts:
            truth[image_id] = gts
    evaluation.save_ground_truth(truth, os.path.join(args.out, "truth.csv"))
    log.info("wrote %d phantoms and truth.csv to %s", args.count, args.out)
    return EXIT_OK


_COMMANDS = {
    "segment": _cmd_segment,
    "roi": _cmd_roi,
    "eval": _cmd_eval,
    "phantom": _cmd_phantom,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"mammroi: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, raster.RasterError, ValueError) as exc:
        print(f"mammroi: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
