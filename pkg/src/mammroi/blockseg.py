"""Block-mask segmentation of a band-sliced plane.

The plane is tiled with block_size x block_size blocks (border blocks
clamped to the image edge). A block whose zero-pixel count strictly
exceeds the threshold becomes background; otherwise the whole block is
foreground. Zero counts come from one integral-image pass, so cost is
O(pixels) regardless of block size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BlockStats:
    """Per-block zero counts over the clamped block grid.

    zero_counts and areas are (n_block_rows, n_block_cols) arrays;
    row_starts/col_starts hold the top/left pixel coordinate of each
    grid row/column of blocks.
    """
    block_size: int
    zero_counts: np.ndarray
    areas: np.ndarray
    row_starts: np.ndarray
    col_starts: np.ndarray


def iterate_blocks(width, height, block_size):
    """Row-major (x, y, w, h) rects tiling width x height, borders clamped."""
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")
    if width < 1 or height < 1:
        raise ValueError(f"empty plane {width}x{height}")
    rects = []
    for y in range(0, height, block_size):
        h = min(block_size, height - y)
        for x in range(0, width, block_size):
            rects.append((x, y, min(block_size, width - x), h))
    return rects


def block_zero_counts(plane, block_size) -> BlockStats:
    """Count zero pixels per block via an exclusive-prefix integral image."""
    plane = np.asarray(plane)
    if plane.ndim != 2 or plane.dtype != np.uint8:
        raise ValueError("expected a uint8 plane of shape (H, W)")
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")
    height, width = plane.shape
    zeros = (plane == 0)
    ii = np.zeros((height + 1, width + 1), dtype=np.int64)
    np.cumsum(np.cumsum(zeros, axis=0), axis=1, out=ii[1:, 1:])

    row_starts = np.arange(0, height, block_size)
    col_starts = np.arange(0, width, block_size)
    row_ends = np.minimum(row_starts + block_size, height)
    col_ends = np.minimum(col_starts + block_size, width)

    counts = (
        ii[np.ix_(row_ends, col_ends)]
        - ii[np.ix_(row_starts, col_ends)]
        - ii[np.ix_(row_ends, col_starts)]
        + ii[np.ix_(row_starts, col_starts)]
    )
    areas = (row_ends - row_starts)[:, None] * (col_ends - col_starts)[None, :]
    return BlockStats(
        block_size=int(block_size),
        zero_counts=counts,
        areas=areas,
        row_starts=row_starts,
        col_starts=col_starts,
    )


def segment_layer(plane, block_size, zero_thresh, zero_thresh_mode="absolute"):
    """Whole-block foreground/background mask for one layer plane.

    Background iff zero_count > threshold (strict). "absolute" compares
    the raw count even for clamped border blocks, which biases small
    border blocks toward foreground; "fraction" scales the threshold by
    actual block area over the nominal block area.
    """
    if zero_thresh < 0:
        raise ValueError(f"zero_thresh must be >= 0, got {zero_thresh}")
    stats = block_zero_counts(plane, block_size)
    if zero_thresh_mode == "absolute":
        limit = float(zero_thresh)
        background = stats.zero_counts > limit
    elif zero_thresh_mode == "fraction":
        nominal = float(block_size) * float(block_size)
        limits = float(zero_thresh) * stats.areas / nominal
        background = stats.zero_counts > limits
    else:
        raise ValueError(f"unknown zero_thresh_mode {zero_thresh_mode!r}")

    block_mask = np.where(background, 0, 255).astype(np.uint8)
    height, width = np.asarray(plane).shape
    row_lens = np.minimum(stats.row_starts + block_size, height) - stats.row_starts
    col_lens = np.minimum(stats.col_starts + block_size, width) - stats.col_starts
    return np.repeat(np.repeat(block_mask, row_lens, axis=0), col_lens, axis=1)
