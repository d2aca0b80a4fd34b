"""Detection scoring: box matching, dataset evaluation, ground truth I/O.

A predicted box matches a ground-truth box when the GT center lies
inside the prediction or their IoU reaches the threshold. Qualifying
pairs are assigned greedily in descending IoU order (ties broken by
prediction then GT index) with each box on either side used at most
once. A positive image counts as a hit when at least one of its GT
boxes is matched; a negative image passes when the pipeline emits no
boxes at all.

Ground truth files are plain text, one box per line:
    image_id,x,y,width,height
Images that never appear in the file are negatives.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import pipeline
from .config import PipelineConfig


def _rect(box):
    if isinstance(box, (tuple, list)):
        x, y, w, h = box
    else:
        x, y, w, h = box.x, box.y, box.width, box.height
    return float(x), float(y), float(w), float(h)


def iou(a, b) -> float:
    """Intersection over union of two boxes ((x, y, w, h) or box objects)."""
    ax, ay, aw, ah = _rect(a)
    bx, by, bw, bh = _rect(b)
    ix0 = max(ax, bx)
    iy0 = max(ay, by)
    ix1 = min(ax + aw, bx + bw)
    iy1 = min(ay + ah, by + bh)
    inter = max(0.0, ix1 - ix0) * max(0.0, iy1 - iy0)
    union = aw * ah + bw * bh - inter
    if union <= 0:
        return 0.0
    return inter / union


def center_inside(gt, pred) -> bool:
    """True iff gt's center point falls inside the pred rectangle."""
    gx, gy, gw, gh = _rect(gt)
    px, py, pw, ph = _rect(pred)
    cx = gx + gw / 2.0
    cy = gy + gh / 2.0
    return px <= cx < px + pw and py <= cy < py + ph


def match(pred_boxes, gt_boxes, iou_thresh: float = 0.25):
    """Greedy one-to-one assignment of qualifying (pred, gt) pairs.

    Returns a list of (pred_index, gt_index) pairs. Pairs qualify by
    center containment or IoU >= iou_thresh and are consumed in
    descending IoU order.
    """
    pairs = []
    for pi, p in enumerate(pred_boxes):
        for gi, g in enumerate(gt_boxes):
            overlap = iou(p, g)
            if overlap >= iou_thresh or center_inside(g, p):
                pairs.append((-overlap, pi, gi))
    pairs.sort()
    used_pred = set()
    used_gt = set()
    out = []
    for _, pi, gi in pairs:
        if pi in used_pred or gi in used_gt:
            continue
        used_pred.add(pi)
        used_gt.add(gi)
        out.append((pi, gi))
    return out


def dice(a, b) -> float:
    """Dice coefficient of two binary masks (nonzero = foreground)."""
    a = np.asarray(a) != 0
    b = np.asarray(b) != 0
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    denom = int(a.sum()) + int(b.sum())
    if denom == 0:
        return 1.0
    return 2.0 * int((a & b).sum()) / denom


# ---------------------------------------------------------------------------
# dataset evaluation

@dataclass(frozen=True)
class EvalSample:
    image_id: str
    image: np.ndarray
    gt_boxes: tuple = ()


@dataclass
class EvalReport:
    n_images: int = 0
    n_positive: int = 0
    n_negative: int = 0
    roi_hits: int = 0
    roi_hit_rate: float = 0.0
    false_alarm_images: int = 0
    per_image: list = field(default_factory=list)

    @property
    def clean_negatives(self) -> int:
        return self.n_negative - self.false_alarm_images

    def to_dict(self):
        return {
            "n_images": self.n_images,
            "n_positive": self.n_positive,
            "n_negative": self.n_negative,
            "roi_hits": self.roi_hits,
            "roi_hit_rate": self.roi_hit_rate,
            "false_alarm_images": self.false_alarm_images,
            "clean_negatives": self.clean_negatives,
            "per_image": self.per_image,
        }


def _evaluate_one(sample: EvalSample, cfg: PipelineConfig):
    row = {
        "image_id": sample.image_id,
        "n_gt": len(sample.gt_boxes),
        "boxes": [],
        "matched_gt": [],
        "error": None,
    }
    try:
        result = pipeline.locate_roi(sample.image, cfg)
    except Exception as exc:  # per-image failures are recorded, not fatal
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row["boxes"] = [
        {"x": b.x, "y": b.y, "width": b.width, "height": b.height,
         "score": b.score}
        for b in result.boxes
    ]
    matched = match(result.boxes, list(sample.gt_boxes), cfg.eval.iou_thresh)
    row["matched_gt"] = sorted(gi for _, gi in matched)
    return row


def evaluate(samples, cfg: PipelineConfig | None = None, jobs: int = 1) -> EvalReport:
    """Run the pipeline over samples and score against their ground truth.

    A sample is positive iff it has GT boxes. Failed images keep an error
    entry in per_image and count as misses (positives) or false alarms
    contribute nothing (negatives stay clean only on a real empty run).
    """
    if cfg is None:
        cfg = PipelineConfig()
    samples = list(samples)
    if jobs > 1 and len(samples) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda s: _evaluate_one(s, cfg), samples))
    else:
        rows = [_evaluate_one(s, cfg) for s in samples]

    report = EvalReport(n_images=len(samples), per_image=rows)
    for sample, row in zip(samples, rows):
        positive = len(sample.gt_boxes) > 0
        if positive:
            report.n_positive += 1
            if row["matched_gt"]:
                report.roi_hits += 1
        else:
            report.n_negative += 1
            if row["error"] is not None or row["boxes"]:
                report.false_alarm_images += 1
    report.roi_hit_rate = (
        report.roi_hits / report.n_positive if report.n_positive else 0.0)
    return report


# ---------------------------------------------------------------------------
# ground truth files

def load_ground_truth(path):
    """Parse image_id,x,y,width,height lines into {image_id: [boxes]}."""
    from .phantom import GroundTruthBox

    table = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise ValueError(
                    f"{path}:{lineno}: expected image_id,x,y,width,height")
            image_id = parts[0].strip()
            try:
                x, y, w, h = (int(p) for p in parts[1:])
            except ValueError as exc:
                raise ValueError(
                    f"{path}:{lineno}: non-integer box field") from exc
            if w < 1 or h < 1:
                raise ValueError(f"{path}:{lineno}: box must have positive size")
            table.setdefault(image_id, []).append(
                GroundTruthBox(x=x, y=y, width=w, height=h))
    return table


def save_ground_truth(table, path):
    """Write {image_id: [boxes]} in the line format load_ground_truth reads."""
    from .raster import _atomic_write_bytes

    lines = []
    for image_id in sorted(table):
        for b in table[image_id]:
            lines.append(f"{image_id},{b.x},{b.y},{b.width},{b.height}")
    _atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("utf-8"))
