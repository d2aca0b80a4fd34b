"""End-to-end segmentation and ROI localization over whole images.

Stage order per channel: band slicing -> block-mask segmentation of each
informative band -> union of the band masks into the channel mask. The
three channel masks are then intersected into the final segmentation
mask. ROI extraction masks each channel with that segmentation, builds
an entropy quadtree on the 512x512 working plane, collects fine leaves,
and boxes the components of the intersected fine masks.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import blockseg, fusion, layers, quadroi, raster
from .config import PipelineConfig


def merge_layer_masks(layer_masks):
    """Union one channel's per-band block masks into the channel mask.

    The bands partition the intensity range, so a block's in-band pixel
    counts across bands share the block's pixel budget; demanding a
    majority in every band at once is unsatisfiable and would blank the
    mask. A block dominated by any single informative band is tissue
    evidence, hence the fold is pixelwise maximum (union).
    """
    masks = list(layer_masks)
    if not masks:
        raise ValueError("need at least one mask")
    out = np.asarray(masks[0])
    for m in masks[1:]:
        m = np.asarray(m)
        if m.shape != out.shape:
            raise ValueError(f"mask shapes differ: {out.shape} vs {m.shape}")
        out = np.maximum(out, m)
    return out


@dataclass
class ChannelSegmentation:
    """Per-channel intermediates: band planes, their masks, the union."""
    layer_planes: list
    layer_masks: list
    channel_mask: np.ndarray


@dataclass
class SegmentationResult:
    mask: np.ndarray
    channels: list = field(default_factory=list)


@dataclass
class ChannelRoi:
    """Per-channel ROI intermediates on the 512x512 working square."""
    working: np.ndarray
    tree: quadroi.QuadTree
    fine_mask: np.ndarray


@dataclass
class RoiResult:
    boxes: list
    segmentation: SegmentationResult
    coord_map: quadroi.CoordMap
    channels: list = field(default_factory=list)


def segment_image(img, cfg: PipelineConfig | None = None) -> SegmentationResult:
    """Run the layering + block-mask stages on an RGB or gray image."""
    if cfg is None:
        cfg = PipelineConfig()
    bands = layers.bands_from_edges(cfg.layers.edges)
    channel_rows = []
    channel_masks = []
    prev_plane = None
    for plane in raster.split_channels(np.asarray(img)):
        if prev_plane is not None and plane is prev_plane:
            # replicated grayscale: identical plane gives identical stages
            channel_rows.append(channel_rows[-1])
            channel_masks.append(channel_masks[-1])
            continue
        layer_planes = layers.slice_layers(plane, bands)
        informative = layers.select_informative(layer_planes, cfg.layers.keep)
        masks = [
            blockseg.segment_layer(
                lp.samples,
                cfg.blockseg.block_size,
                cfg.blockseg.zero_thresh,
                cfg.blockseg.zero_thresh_mode,
            )
            for lp in informative
        ]
        merged = merge_layer_masks(masks)
        channel_rows.append(ChannelSegmentation(
            layer_planes=informative, layer_masks=masks, channel_mask=merged))
        channel_masks.append(merged)
        prev_plane = plane
    final = fusion.fuse_channels(*channel_masks)
    return SegmentationResult(mask=final, channels=channel_rows)


def locate_roi(img, cfg: PipelineConfig | None = None) -> RoiResult:
    """Full pipeline: segmentation, per-channel quadtrees, ROI boxes."""
    if cfg is None:
        cfg = PipelineConfig()
    img = np.asarray(img)
    seg = segment_image(img, cfg)
    channels = []
    fine_masks = []
    coord_map = None
    prev_plane = None
    for plane in raster.split_channels(img):
        if prev_plane is not None and plane is prev_plane:
            channels.append(channels[-1])
            fine_masks.append(fine_masks[-1])
            continue
        working, coord_map = quadroi.prepare_working_plane(plane, seg.mask)
        tree = quadroi.build_quadtree(working, cfg.quad)
        fine = quadroi.fine_leaf_mask(tree, cfg.roi.fine_side)
        channels.append(ChannelRoi(working=working, tree=tree, fine_mask=fine))
        fine_masks.append(fine)
        prev_plane = plane
    if coord_map is None:  # replicated-only loop above always sets it
        raise RuntimeError("no channels")
    boxes = quadroi.extract_roi(fine_masks, coord_map, cfg.roi)
    return RoiResult(boxes=boxes, segmentation=seg, coord_map=coord_map,
                     channels=channels)


# ---------------------------------------------------------------------------
# file-level entry points

def _atomic_write_text(path, text: str) -> None:
    raster._atomic_write_bytes(path, text.encode("utf-8"))


def _dump(arr, out_dir, name):
    path = os.path.join(out_dir, name)
    raster.save_image(np.asarray(arr, dtype=np.uint8), path)
    return path


def _dump_segmentation_stages(seg: SegmentationResult, out_dir, stem):
    written = []
    for ci, ch in enumerate(seg.channels):
        for lp, mask in zip(ch.layer_planes, ch.layer_masks):
            written.append(_dump(
                lp.samples, out_dir,
                f"{stem}_stage_c{ci}_band{lp.band.index}.png"))
            written.append(_dump(
                mask, out_dir,
                f"{stem}_stage_c{ci}_band{lp.band.index}_mask.png"))
        written.append(_dump(
            ch.channel_mask, out_dir, f"{stem}_stage_c{ci}_mask.png"))
    return written


def run_segment(image_path, cfg: PipelineConfig, out_dir,
                dump_stages: bool = False):
    """Segment one image file; write <stem>_mask.png into out_dir.

    Returns (mask_path, SegmentationResult).
    """
    os.makedirs(out_dir, exist_ok=True)
    img = raster.load_image(image_path)
    seg = segment_image(img, cfg)
    stem = os.path.splitext(os.path.basename(os.fspath(image_path)))[0]
    mask_path = os.path.join(out_dir, f"{stem}_mask.png")
    raster.save_mask(seg.mask, mask_path)
    if dump_stages:
        _dump_segmentation_stages(seg, out_dir, stem)
    return mask_path, seg


def run_roi(image_path, cfg: PipelineConfig, out_dir,
            dump_stages: bool = False):
    """Localize ROIs in one image file.

    Writes <stem>_roi.json (boxes, scores, effective config), an overlay
    PNG with the segmentation tint and red ROI outlines, and a leaf-edge
    PNG per channel. Returns (record_dict, RoiResult).
    """
    os.makedirs(out_dir, exist_ok=True)
    img = raster.load_image(image_path)
    result = locate_roi(img, cfg)
    stem = os.path.splitext(os.path.basename(os.fspath(image_path)))[0]

    record = {
        "image": os.path.basename(os.fspath(image_path)),
        "width": int(img.shape[1]),
        "height": int(img.shape[0]),
        "boxes": [
            {"x": b.x, "y": b.y, "width": b.width, "height": b.height,
             "score": b.score}
            for b in result.boxes
        ],
        "config": cfg.to_dict(),
    }
    _atomic_write_text(os.path.join(out_dir, f"{stem}_roi.json"),
                       json.dumps(record, sort_keys=True, indent=2) + "\n")

    overlay = raster.OverlaySpec(
        base=img,
        boxes=[raster.OverlayBox(x=b.x, y=b.y, width=b.width,
                                 height=b.height, color=(255, 0, 0))
               for b in result.boxes],
        mask=result.segmentation.mask,
    )
    raster.render_overlay(overlay, os.path.join(out_dir, f"{stem}_overlay.png"))

    edge_cache = {}
    for ci, ch in enumerate(result.channels):
        if id(ch) not in edge_cache:
            edge_cache[id(ch)] = quadroi.leaf_edge_map(ch.tree)
        raster.save_image(edge_cache[id(ch)],
                          os.path.join(out_dir, f"{stem}_edges_c{ci}.png"))
        if dump_stages:
            _dump(ch.working, out_dir, f"{stem}_stage_c{ci}_working.png")
            _dump(ch.fine_mask, out_dir, f"{stem}_stage_c{ci}_fine.png")
    if dump_stages:
        _dump_segmentation_stages(result.segmentation, out_dir, stem)
        _dump(result.segmentation.mask, out_dir, f"{stem}_stage_final_mask.png")
    return record, result
