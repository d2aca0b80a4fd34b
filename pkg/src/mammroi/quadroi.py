"""Entropy-driven quadtree decomposition and ROI extraction.

The working plane is a fixed 512x512 square (inputs of other sizes are
nearest-neighbor resampled, with the coordinate mapping recorded). A node
splits into NW/NE/SW/SE quadrants iff its Shannon entropy exceeds the
threshold, its side exceeds min_size, and its depth is below max_depth.

The builder walks the tree level by level and computes every candidate
node's 256-bin histogram in one bincount pass per level, so a full
decomposition costs O(pixels * levels) in C rather than one Python
histogram per node. Nodes live in flat parallel arrays; QuadNode is a
light view over them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import fusion
from .config import QuadConfig, RoiConfig

WORK_SIDE = 512


# ---------------------------------------------------------------------------
# histograms and entropy

@dataclass(frozen=True)
class Histogram256:
    """256-bin intensity histogram; counts is an int64 array of length 256."""
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @classmethod
    def from_plane(cls, region) -> "Histogram256":
        region = np.asarray(region)
        counts = np.bincount(region.ravel(), minlength=256).astype(np.int64)
        return cls(counts=counts)

    def __add__(self, other: "Histogram256") -> "Histogram256":
        return Histogram256(counts=self.counts + other.counts)


def entropy(hist: Histogram256) -> float:
    """Shannon entropy in bits; empty histograms have entropy 0."""
    counts = np.asarray(hist.counts, dtype=np.int64)
    total = counts.sum()
    if total == 0:
        return 0.0
    nz = counts[counts > 0]
    p = nz / total
    # p*log2(p) is exactly 0.0 for a single full bin, so constant regions
    # report 0 without tolerance games.
    return float(-(p * np.log2(p)).sum()) + 0.0


def _entropy_rows(rows: np.ndarray) -> np.ndarray:
    """Entropy of each row of a (n, m) uint8 sample matrix."""
    n, m = rows.shape
    out = np.empty(n, dtype=np.float64)
    # Cap the scratch histogram block at ~4M entries.
    chunk = max(1, (1 << 22) // 256)
    inv_m = 1.0 / m
    for start in range(0, n, chunk):
        sub = rows[start:start + chunk]
        k = sub.shape[0]
        keys = (np.arange(k, dtype=np.int64)[:, None] * 256 + sub).ravel()
        counts = np.bincount(keys, minlength=k * 256).reshape(k, 256)
        p = counts * inv_m
        plogp = np.zeros_like(p)
        nz = counts > 0
        plogp[nz] = p[nz] * np.log2(p[nz])
        out[start:start + k] = -plogp.sum(axis=1) + 0.0
    return out


def _entropy_lut_side2() -> np.ndarray:
    # Entropy of a 4-pixel multiset depends only on which sorted neighbors
    # are equal: (eq01, eq12, eq23) -> partition pattern.
    patterns = {
        (0, 0, 0): (1, 1, 1, 1),
        (0, 0, 1): (1, 1, 2),
        (0, 1, 0): (1, 2, 1),
        (0, 1, 1): (1, 3),
        (1, 0, 0): (2, 1, 1),
        (1, 0, 1): (2, 2),
        (1, 1, 0): (3, 1),
        (1, 1, 1): (4,),
    }
    lut = np.zeros(8, dtype=np.float64)
    for (e01, e12, e23), counts in patterns.items():
        hist = np.zeros(256, dtype=np.int64)
        hist[: len(counts)] = counts
        lut[e01 * 4 + e12 * 2 + e23] = entropy(Histogram256(hist))
    return lut


_SIDE2_LUT = _entropy_lut_side2()


def _level_entropies(plane, xs, ys, size) -> np.ndarray:
    """Entropies of the size x size nodes anchored at (xs[i], ys[i])."""
    n = xs.size
    if size == 1:
        return np.zeros(n, dtype=np.float64)
    grid = WORK_SIDE // size
    cells = (
        plane.reshape(grid, size, grid, size)
        .transpose(0, 2, 1, 3)
        .reshape(grid * grid, size * size)
    )
    ids = (ys // size) * grid + (xs // size)
    rows = cells[ids]
    if size == 2:
        srt = np.sort(rows, axis=1)
        eq = (srt[:, :-1] == srt[:, 1:]).astype(np.int64)
        return _SIDE2_LUT[eq[:, 0] * 4 + eq[:, 1] * 2 + eq[:, 2]]
    return _entropy_rows(rows)


# ---------------------------------------------------------------------------
# tree structure

@dataclass(frozen=True)
class QuadNode:
    """View of one node; children materialize on demand, NW NE SW SE."""
    tree: "QuadTree"
    index: int

    @property
    def x(self) -> int:
        return int(self.tree.xs[self.index])

    @property
    def y(self) -> int:
        return int(self.tree.ys[self.index])

    @property
    def size(self) -> int:
        return int(self.tree.sizes[self.index])

    @property
    def depth(self) -> int:
        return int(self.tree.depths[self.index])

    @property
    def entropy(self) -> float:
        return float(self.tree.entropies[self.index])

    @property
    def rect(self):
        return (self.x, self.y, self.size, self.size)

    @property
    def is_leaf(self) -> bool:
        return self.tree.first_child[self.index] < 0

    @property
    def children(self):
        first = int(self.tree.first_child[self.index])
        if first < 0:
            return None
        return tuple(QuadNode(self.tree, first + k) for k in range(4))


class QuadTree:
    """Array-backed quadtree over the 512x512 working square."""

    def __init__(self, xs, ys, sizes, depths, entropies, first_child,
                 entropy_thresh, min_size, max_depth):
        self.xs = xs
        self.ys = ys
        self.sizes = sizes
        self.depths = depths
        self.entropies = entropies
        self.first_child = first_child
        self.entropy_thresh = entropy_thresh
        self.min_size = min_size
        self.max_depth = max_depth

    @property
    def n_nodes(self) -> int:
        return self.xs.size

    @property
    def root(self) -> QuadNode:
        return QuadNode(self, 0)

    def node(self, index) -> QuadNode:
        return QuadNode(self, int(index))

    def leaf_indices(self) -> np.ndarray:
        return np.flatnonzero(self.first_child < 0)

    def leaf_rects(self) -> np.ndarray:
        """(n_leaves, 3) array of leaf (x, y, size)."""
        sel = self.first_child < 0
        return np.stack([self.xs[sel], self.ys[sel], self.sizes[sel]], axis=1)

    @property
    def n_leaves(self) -> int:
        return int((self.first_child < 0).sum())

    @property
    def depth_reached(self) -> int:
        return int(self.depths.max())


def build_quadtree(plane, cfg: QuadConfig | None = None) -> QuadTree:
    """Decompose a 512x512 uint8 plane by the entropy split rule."""
    if cfg is None:
        cfg = QuadConfig()
    plane = np.asarray(plane)
    if plane.shape != (WORK_SIDE, WORK_SIDE):
        raise ValueError(
            f"working plane must be {WORK_SIDE}x{WORK_SIDE}, got {plane.shape}")
    if plane.dtype != np.uint8:
        raise ValueError(f"working plane must be uint8, got {plane.dtype}")
    thresh = float(cfg.entropy_thresh)
    min_size = int(cfg.min_size)
    max_depth = int(cfg.max_depth)

    xs_parts, ys_parts, size_parts = [], [], []
    depth_parts, ent_parts, child_parts = [], [], []

    cur_x = np.zeros(1, dtype=np.int32)
    cur_y = np.zeros(1, dtype=np.int32)
    size = WORK_SIDE
    depth = 0
    base = 0
    while True:
        n = cur_x.size
        ents = _level_entropies(plane, cur_x, cur_y, size)
        split = (ents > thresh) & (size > min_size) & (depth < max_depth)
        n_split = int(split.sum())
        first_child = np.full(n, -1, dtype=np.int64)
        if n_split:
            first_child[split] = base + n + 4 * np.arange(n_split, dtype=np.int64)

        xs_parts.append(cur_x)
        ys_parts.append(cur_y)
        size_parts.append(np.full(n, size, dtype=np.int32))
        depth_parts.append(np.full(n, depth, dtype=np.int32))
        ent_parts.append(ents)
        child_parts.append(first_child)

        if n_split == 0:
            break
        half = size // 2
        px = cur_x[split]
        py = cur_y[split]
        nxt_x = np.empty(4 * n_split, dtype=np.int32)
        nxt_y = np.empty(4 * n_split, dtype=np.int32)
        nxt_x[0::4] = px
        nxt_y[0::4] = py
        nxt_x[1::4] = px + half
        nxt_y[1::4] = py
        nxt_x[2::4] = px
        nxt_y[2::4] = py + half
        nxt_x[3::4] = px + half
        nxt_y[3::4] = py + half
        base += n
        cur_x, cur_y = nxt_x, nxt_y
        size = half
        depth += 1

    return QuadTree(
        xs=np.concatenate(xs_parts),
        ys=np.concatenate(ys_parts),
        sizes=np.concatenate(size_parts),
        depths=np.concatenate(depth_parts),
        entropies=np.concatenate(ent_parts),
        first_child=np.concatenate(child_parts),
        entropy_thresh=thresh,
        min_size=min_size,
        max_depth=max_depth,
    )


# ---------------------------------------------------------------------------
# working-plane preparation

@dataclass(frozen=True)
class CoordMap:
    """Mapping between the 512-space working square and source pixels."""
    src_width: int
    src_height: int
    work_side: int = WORK_SIDE

    def map_rect(self, x, y, width, height):
        """Map a work-space rect to the smallest covering source rect."""
        sx0 = (x * self.src_width) // self.work_side
        sy0 = (y * self.src_height) // self.work_side
        sx1 = -((-(x + width) * self.src_width) // self.work_side)
        sy1 = -((-(y + height) * self.src_height) // self.work_side)
        sx1 = min(max(sx1, sx0 + 1), self.src_width)
        sy1 = min(max(sy1, sy0 + 1), self.src_height)
        return int(sx0), int(sy0), int(sx1 - sx0), int(sy1 - sy0)


def prepare_working_plane(plane, seg_mask):
    """Mask a channel by the segmentation and resample to the work square.

    Pixels where seg_mask is 0 become 0; nearest-neighbor resampling maps
    output pixel (i, j) to source (floor(i*H/512), floor(j*W/512)).
    Returns (work_plane, CoordMap).
    """
    plane = np.asarray(plane)
    seg_mask = np.asarray(seg_mask)
    if plane.shape != seg_mask.shape or plane.ndim != 2:
        raise ValueError(
            f"plane {plane.shape} and mask {seg_mask.shape} must be equal 2-d")
    height, width = plane.shape
    masked = np.where(seg_mask == 255, plane, 0).astype(np.uint8)
    if (height, width) != (WORK_SIDE, WORK_SIDE):
        rows = (np.arange(WORK_SIDE, dtype=np.int64) * height) // WORK_SIDE
        cols = (np.arange(WORK_SIDE, dtype=np.int64) * width) // WORK_SIDE
        masked = masked[rows][:, cols]
    return np.ascontiguousarray(masked), CoordMap(src_width=width, src_height=height)


# ---------------------------------------------------------------------------
# leaf rasters

def _paint_cover_count(xs, ys, sizes, side) -> np.ndarray:
    """Per-pixel count of covering rects via corner deltas + 2-d cumsum."""
    delta = np.zeros((side + 1, side + 1), dtype=np.int32)
    np.add.at(delta, (ys, xs), 1)
    np.add.at(delta, (ys + sizes, xs), -1)
    np.add.at(delta, (ys, xs + sizes), -1)
    np.add.at(delta, (ys + sizes, xs + sizes), 1)
    return delta.cumsum(axis=0).cumsum(axis=1)[:side, :side]


def leaf_edge_map(tree: QuadTree) -> np.ndarray:
    """255 on every leaf's 1px border, 0 elsewhere.

    Leaves tile the square, so border pixels are exactly the pixels not
    covered by any leaf interior (a leaf of side <= 2 is all border).
    """
    rects = tree.leaf_rects()
    inner = rects[rects[:, 2] >= 3]
    cover = _paint_cover_count(
        inner[:, 0] + 1, inner[:, 1] + 1, inner[:, 2] - 2, WORK_SIDE)
    return np.where(cover == 0, 255, 0).astype(np.uint8)


def fine_leaf_mask(tree: QuadTree, fine_side) -> np.ndarray:
    """Filled mask of leaves with side <= fine_side (the detail cue)."""
    rects = tree.leaf_rects()
    fine = rects[rects[:, 2] <= int(fine_side)]
    cover = _paint_cover_count(fine[:, 0], fine[:, 1], fine[:, 2], WORK_SIDE)
    return np.where(cover > 0, 255, 0).astype(np.uint8)


# ---------------------------------------------------------------------------
# ROI extraction

@dataclass(frozen=True)
class RoiBox:
    """A localized region in source coordinates; score in (0, 1]."""
    x: int
    y: int
    width: int
    height: int
    score: float


def extract_roi(fine_masks, coord_map: CoordMap,
                cfg: RoiConfig | None = None):
    """Intersect per-channel fine masks and box the surviving components.

    Components are 4-connected regions of the combined mask; those with
    area below cfg.min_area (in work-square pixels) are dropped. Score is
    component area over its bounding-box area, computed in work space;
    box coordinates are mapped back to the source image.
    """
    if cfg is None:
        cfg = RoiConfig()
    masks = list(fine_masks)
    if not masks:
        raise ValueError("need at least one fine mask")
    combined = masks[0]
    for m in masks[1:]:
        combined = fusion.intersect(combined, m)

    labels, n_labels = ndimage.label(combined == 255)
    if n_labels == 0:
        return []
    areas = np.bincount(labels.ravel(), minlength=n_labels + 1)
    slices = ndimage.find_objects(labels)

    boxes = []
    for label_idx, sl in enumerate(slices, start=1):
        area = int(areas[label_idx])
        if area < cfg.min_area:
            continue
        y0, y1 = sl[0].start, sl[0].stop
        x0, x1 = sl[1].start, sl[1].stop
        score = area / float((x1 - x0) * (y1 - y0))
        sx, sy, sw, sh = coord_map.map_rect(x0, y0, x1 - x0, y1 - y0)
        boxes.append(RoiBox(x=sx, y=sy, width=sw, height=sh,
                            score=round(score, 6)))
    boxes.sort(key=lambda b: (-b.width * b.height * b.score, b.y, b.x))
    return boxes
