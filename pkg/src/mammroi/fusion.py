"""Pixelwise intersection of binary masks.

Masks take values in {0, 255}; a pixel survives an intersection only
when it is 255 in both operands. On that domain minimum and logical AND
coincide, so the kernel is a single np.minimum.
"""

from __future__ import annotations

import numpy as np


def intersect(a, b):
    """Pixelwise AND of two equally sized {0, 255} masks."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    return np.minimum(a, b)


def fuse_channel(layer_masks):
    """Fold intersect over one channel's per-layer masks."""
    masks = list(layer_masks)
    if not masks:
        raise ValueError("need at least one mask")
    out = np.asarray(masks[0])
    for m in masks[1:]:
        out = intersect(out, m)
    return out


def fuse_channels(red_mask, green_mask, blue_mask):
    """Intersect the three per-channel masks into the final mask."""
    return intersect(intersect(red_mask, green_mask), blue_mask)
