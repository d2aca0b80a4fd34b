"""Intensity-band layering of a channel plane.

A plane is sliced into disjoint half-open intensity bands; the top band
also contains 255. With the default edges (50, 100, 150, 200) that gives
five bands covering [0, 255] with no gaps and no overlap. Slicing keeps
in-band pixels at their source value and zeroes the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_EDGES = (50, 100, 150, 200)
DEFAULT_KEEP = (2, 3, 4)


@dataclass(frozen=True)
class LayerBand:
    """Half-open intensity interval [lo, hi); the top band uses hi=256."""
    index: int  # 1-based position in the band list
    lo: int
    hi: int

    def contains(self, values):
        """Vectorized membership test against source intensities."""
        values = np.asarray(values)
        return (values >= self.lo) & (values < self.hi)


@dataclass(frozen=True)
class LayerPlane:
    """A band together with the band-sliced plane (zeros out of band)."""
    band: LayerBand
    samples: np.ndarray


def bands_from_edges(edges=DEFAULT_EDGES):
    """Build the band partition for interior edges.

    Edges must be strictly increasing integers inside (0, 256). n edges
    produce n+1 bands: [0, e1), [e1, e2), ..., [en, 256).
    """
    edges = tuple(int(e) for e in edges)
    if not edges:
        raise ValueError("need at least one band edge")
    bounds = (0,) + edges + (256,)
    for a, b in zip(bounds, bounds[1:]):
        if not a < b:
            raise ValueError(f"band edges must be strictly increasing: {edges}")
    return tuple(
        LayerBand(index=i + 1, lo=bounds[i], hi=bounds[i + 1])
        for i in range(len(bounds) - 1)
    )


def slice_layers(plane, bands=None):
    """Slice a uint8 plane into one LayerPlane per band.

    In-band pixels keep their source intensity; everything else is 0.
    Note a stored 0 is ambiguous on its own: band 1 keeps genuine zeros.
    Membership questions should go through LayerBand.contains on the
    source plane.
    """
    plane = np.asarray(plane)
    if plane.ndim != 2 or plane.dtype != np.uint8:
        raise ValueError("expected a uint8 plane of shape (H, W)")
    if bands is None:
        bands = bands_from_edges()
    out = []
    for band in bands:
        sliced = np.where(band.contains(plane), plane, 0).astype(np.uint8)
        out.append(LayerPlane(band=band, samples=sliced))
    return out


def select_informative(layer_planes, keep=DEFAULT_KEEP):
    """Pick the layers whose band index is listed in `keep`, in that order.

    The lowest band is mostly dark background and the top band saturates;
    the middle bands carry the tissue structure, hence the default (2,3,4).
    """
    by_index = {lp.band.index: lp for lp in layer_planes}
    missing = [k for k in keep if k not in by_index]
    if missing:
        raise ValueError(f"keep indices {missing} not present in layers")
    return [by_index[k] for k in keep]
