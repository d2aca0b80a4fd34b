"""Independent reference implementations used as test oracles.

Everything in this file is deliberately naive: plain Python loops,
stdlib containers, no shared code with the package under test. Each
reference exists so the optimized kernels have something honest to be
compared against. Do not import mammroi here.
"""

import math
from collections import Counter, deque


# --------------------------------------------------------------------------
# entropy

def entropy_bits_reference(counts):
    """Shannon entropy in bits of a histogram given as an iterable of counts.

    Straight -sum(p * log2 p) over nonzero bins; empty histogram -> 0.0.
    """
    total = sum(counts)
    if total == 0:
        return 0.0
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


# --------------------------------------------------------------------------
# block iteration and zero-count segmentation

def naive_iterate_blocks(width, height, block_size):
    """Row-major list of (x, y, w, h) block rects, border blocks clamped."""
    rects = []
    for y in range(0, height, block_size):
        for x in range(0, width, block_size):
            w = min(block_size, width - x)
            h = min(block_size, height - y)
            rects.append((x, y, w, h))
    return rects


def naive_segment_layer(plane, block_size, zero_thresh, mode="absolute"):
    """Double-loop block segmentation reference.

    plane: 2-ated sequence of rows (list of lists or ndarray; only
    indexing is used). Returns a list-of-lists mask with values 0/255.
    A block becomes background iff its zero pixel count is strictly
    greater than the threshold. In "fraction" mode the threshold is
    scaled by actual block area relative to a full block.
    """
    height = len(plane)
    width = len(plane[0])
    mask = [[0] * width for _ in range(height)]
    for (x, y, w, h) in naive_iterate_blocks(width, height, block_size):
        zeros = 0
        for j in range(y, y + h):
            for i in range(x, x + w):
                if plane[j][i] == 0:
                    zeros += 1
        if mode == "absolute":
            limit = zero_thresh
        elif mode == "fraction":
            limit = zero_thresh * (w * h) / float(block_size * block_size)
        else:
            raise ValueError("unknown mode %r" % (mode,))
        value = 0 if zeros > limit else 255
        for j in range(y, y + h):
            for i in range(x, x + w):
                mask[j][i] = value
    return mask


# --------------------------------------------------------------------------
# quadtree

class RefNode:
    """Reference quadtree node: plain attributes, no behavior."""

    __slots__ = ("x", "y", "size", "depth", "entropy", "children")

    def __init__(self, x, y, size, depth, entropy, children):
        self.x = x
        self.y = y
        self.size = size
        self.depth = depth
        self.entropy = entropy
        self.children = children  # None or [nw, ne, sw, se]


def _region_entropy(plane, x, y, size):
    counts = Counter()
    for j in range(y, y + size):
        for i in range(x, x + size):
            counts[plane[j][i]] += 1
    return entropy_bits_reference(counts.values())


def build_reference_quadtree(plane, entropy_thresh, min_size, max_depth):
    """Recursive reference builder over a square plane (side a power of two).

    Split rule: entropy > entropy_thresh AND side > min_size AND
    depth < max_depth. Children ordered NW, NE, SW, SE.
    """
    side = len(plane)

    def build(x, y, size, depth):
        ent = _region_entropy(plane, x, y, size)
        if ent > entropy_thresh and size > min_size and depth < max_depth:
            half = size // 2
            children = [
                build(x, y, half, depth + 1),
                build(x + half, y, half, depth + 1),
                build(x, y + half, half, depth + 1),
                build(x + half, y + half, half, depth + 1),
            ]
            return RefNode(x, y, size, depth, ent, children)
        return RefNode(x, y, size, depth, ent, None)

    return build(0, 0, side, 0)


def collect_leaves(node):
    """All leaf nodes of a RefNode tree, depth-first NW..SE order."""
    if node.children is None:
        return [node]
    out = []
    for child in node.children:
        out.extend(collect_leaves(child))
    return out


def paint_leaf_borders(leaves, side):
    """Leaf-outline raster: 255 on every leaf's 1px border, else 0."""
    img = [[0] * side for _ in range(side)]
    for leaf in leaves:
        x0, y0, s = leaf[0], leaf[1], leaf[2]
        x1, y1 = x0 + s - 1, y0 + s - 1
        for i in range(x0, x0 + s):
            img[y0][i] = 255
            img[y1][i] = 255
        for j in range(y0, y0 + s):
            img[j][x0] = 255
            img[j][x1] = 255
    return img


def paint_filled_rects(rects, side):
    """Fill raster: 255 inside any of the (x, y, s) rects, else 0."""
    img = [[0] * side for _ in range(side)]
    for (x0, y0, s) in rects:
        for j in range(y0, y0 + s):
            for i in range(x0, x0 + s):
                img[j][i] = 255
    return img


# --------------------------------------------------------------------------
# connected components (4-connectivity)

def flood_fill_components(mask):
    """List of components of the 255 pixels of a 2-d mask, 4-connected.

    Each component is a dict with keys: pixels (set of (x, y)),
    area, bbox (x, y, w, h).
    """
    height = len(mask)
    width = len(mask[0])
    seen = [[False] * width for _ in range(height)]
    comps = []
    for sy in range(height):
        for sx in range(width):
            if mask[sy][sx] != 255 or seen[sy][sx]:
                continue
            q = deque([(sx, sy)])
            seen[sy][sx] = True
            pixels = set()
            while q:
                x, y = q.popleft()
                pixels.add((x, y))
                for nx, ny in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)):
                    if 0 <= nx < width and 0 <= ny < height:
                        if mask[ny][nx] == 255 and not seen[ny][nx]:
                            seen[ny][nx] = True
                            q.append((nx, ny))
            xs = [p[0] for p in pixels]
            ys = [p[1] for p in pixels]
            comps.append({
                "pixels": pixels,
                "area": len(pixels),
                "bbox": (min(xs), min(ys), max(xs) - min(xs) + 1,
                         max(ys) - min(ys) + 1),
            })
    return comps


# --------------------------------------------------------------------------
# box matching

def iou_reference(a, b):
    """Intersection-over-union of two (x, y, w, h) boxes."""
    ax0, ay0, aw, ah = a
    bx0, by0, bw, bh = b
    ix0 = max(ax0, bx0)
    iy0 = max(ay0, by0)
    ix1 = min(ax0 + aw, bx0 + bw)
    iy1 = min(ay0 + ah, by0 + bh)
    iw = max(0, ix1 - ix0)
    ih = max(0, iy1 - iy0)
    inter = iw * ih
    union = aw * ah + bw * bh - inter
    if union == 0:
        return 0.0
    return inter / union


def center_inside_reference(gt, pred):
    """True iff gt's center point lies inside the pred (x, y, w, h) rect."""
    gx0, gy0, gw, gh = gt
    px0, py0, pw, ph = pred
    cx = gx0 + gw / 2.0
    cy = gy0 + gh / 2.0
    return px0 <= cx < px0 + pw and py0 <= cy < py0 + ph


def best_assignment_count(pred_boxes, gt_boxes, iou_thresh):
    """Maximum number of one-to-one qualifying (pred, gt) matches.

    Exhaustive search over injective assignments; a pair qualifies when
    the gt center is inside the pred box or their IoU >= iou_thresh.
    Exponential, only for tiny inputs.
    """
    qualifies = {}
    for pi, p in enumerate(pred_boxes):
        for gi, g in enumerate(gt_boxes):
            if center_inside_reference(g, p) or iou_reference(p, g) >= iou_thresh:
                qualifies[(pi, gi)] = True

    best = 0

    def recurse(pi, used_gt, count):
        nonlocal best
        if pi == len(pred_boxes):
            best = max(best, count)
            return
        recurse(pi + 1, used_gt, count)
        for gi in range(len(gt_boxes)):
            if gi not in used_gt and (pi, gi) in qualifies:
                recurse(pi + 1, used_gt | {gi}, count + 1)

    recurse(0, frozenset(), 0)
    return best


# --------------------------------------------------------------------------
# dice

def dice_reference(a, b):
    """Dice coefficient of two binary masks given as nested sequences."""
    inter = 0
    asum = 0
    bsum = 0
    for ra, rb in zip(a, b):
        for va, vb in zip(ra, rb):
            fa = 1 if va else 0
            fb = 1 if vb else 0
            inter += fa & fb
            asum += fa
            bsum += fb
    if asum + bsum == 0:
        return 1.0
    return 2.0 * inter / (asum + bsum)
