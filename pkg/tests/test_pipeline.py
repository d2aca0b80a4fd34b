"""Whole-pipeline behavior: stage wiring, file outputs, worked examples."""

import json
import os

import numpy as np
import pytest

from mammroi import blockseg, evaluation, fusion, layers, pipeline, quadroi, raster
from mammroi import phantom as ph
from mammroi.config import PipelineConfig


def _phantom(seed=11, positive=True):
    spec = ph.suite_specs(2, seed=seed)[0 if positive else 1]
    return ph.generate_phantom(spec)


# ---------------------------------------------------------------- examples

def test_all_black_image_is_all_background():
    img = np.zeros((500, 500), np.uint8)
    seg = pipeline.segment_image(img)
    assert (seg.mask == 0).all()


def test_all_black_non_divisible_size():
    # border blocks are clamped but still full of zeros, so the absolute
    # rule keeps them background only while they stay above the threshold
    img = np.zeros((505, 499), np.uint8)
    seg = pipeline.segment_image(img)
    interior = seg.mask[:500, :490]
    assert (interior == 0).all()


def test_mid_gray_image_is_all_foreground():
    img = np.full((200, 200), 120, np.uint8)
    seg = pipeline.segment_image(img)
    assert (seg.mask == 255).all()


def test_layer_masks_union_into_channel_mask():
    img = np.full((200, 200), 120, np.uint8)
    seg = pipeline.segment_image(img)
    ch = seg.channels[0]
    assert [lp.band.index for lp in ch.layer_planes] == [2, 3, 4]
    # only band 3 contains 120; its mask alone carries the channel
    assert (ch.layer_masks[0] == 0).all()
    assert (ch.layer_masks[1] == 255).all()
    assert (ch.layer_masks[2] == 0).all()
    assert (ch.channel_mask == 255).all()


def test_channel_masks_intersect_into_final():
    img = np.zeros((100, 100, 3), np.uint8)
    img[:, :, 0] = 120            # red: everywhere
    img[:, :50, 1] = 120          # green: left half
    img[:50, :, 2] = 120          # blue: top half
    seg = pipeline.segment_image(img)
    want = np.zeros((100, 100), np.uint8)
    want[:50, :50] = 255
    np.testing.assert_array_equal(seg.mask, want)
    np.testing.assert_array_equal(
        seg.mask,
        fusion.fuse_channels(*[c.channel_mask for c in seg.channels]))


def test_merge_layer_masks_is_union():
    a = np.array([[0, 255]], np.uint8)
    b = np.array([[255, 0]], np.uint8)
    np.testing.assert_array_equal(pipeline.merge_layer_masks([a, b]),
                                  [[255, 255]])
    with pytest.raises(ValueError):
        pipeline.merge_layer_masks([])
    with pytest.raises(ValueError):
        pipeline.merge_layer_masks([a, np.zeros((2, 3), np.uint8)])


def test_gray_and_replicated_rgb_agree():
    img, _ = _phantom(seed=21)
    gray = np.ascontiguousarray(img[:, :, 0])
    res_rgb = pipeline.locate_roi(img)
    res_gray = pipeline.locate_roi(gray)
    assert res_rgb.boxes == res_gray.boxes
    np.testing.assert_array_equal(res_rgb.segmentation.mask,
                                  res_gray.segmentation.mask)


def test_locate_roi_hits_phantom_mass():
    img, gts = _phantom(seed=22)
    result = pipeline.locate_roi(img)
    assert result.boxes
    assert evaluation.match(result.boxes, gts)


def test_locate_roi_negative_phantom_is_empty():
    img, gts = _phantom(seed=23, positive=False)
    assert gts == []
    result = pipeline.locate_roi(img)
    assert result.boxes == []


def test_locate_roi_repeated_runs_identical():
    img, _ = _phantom(seed=24)
    a = pipeline.locate_roi(img)
    b = pipeline.locate_roi(img)
    assert a.boxes == b.boxes


def test_locate_roi_scales_boxes_to_source():
    img, gts = _phantom(seed=25)
    big = np.repeat(np.repeat(img, 2, axis=0), 2, axis=1)
    result = pipeline.locate_roi(big)
    assert (result.coord_map.src_width, result.coord_map.src_height) == (1024, 1024)
    scaled_gts = [ph.GroundTruthBox(x=g.x * 2, y=g.y * 2, width=g.width * 2,
                                    height=g.height * 2) for g in gts]
    assert evaluation.match(result.boxes, scaled_gts)
    for b in result.boxes:
        assert 0 <= b.x and b.x + b.width <= 1024
        assert 0 <= b.y and b.y + b.height <= 1024


# ---------------------------------------------------------------- file runs

def test_run_segment_writes_mask(tmp_path):
    img, _ = _phantom(seed=26)
    src = str(tmp_path / "case.png")
    raster.save_image(img, src)
    mask_path, seg = pipeline.run_segment(src, PipelineConfig(), str(tmp_path))
    assert os.path.basename(mask_path) == "case_mask.png"
    stored = raster.load_image(mask_path)
    np.testing.assert_array_equal(stored, seg.mask)
    assert set(np.unique(stored)) <= {0, 255}


def test_run_roi_record_and_files(tmp_path):
    img, gts = _phantom(seed=27)
    src = str(tmp_path / "scan.png")
    raster.save_image(img, src)
    cfg = PipelineConfig()
    record, result = pipeline.run_roi(src, cfg, str(tmp_path))

    assert record["image"] == "scan.png"
    assert record["width"] == 512 and record["height"] == 512
    assert record["config"] == cfg.to_dict()
    assert record["boxes"] == [
        {"x": b.x, "y": b.y, "width": b.width, "height": b.height,
         "score": b.score} for b in result.boxes]

    on_disk = json.loads((tmp_path / "scan_roi.json").read_text())
    assert on_disk == json.loads(json.dumps(record))

    for name in ("scan_overlay.png", "scan_edges_c0.png",
                 "scan_edges_c1.png", "scan_edges_c2.png"):
        assert (tmp_path / name).exists(), name
    overlay = raster.load_image(str(tmp_path / "scan_overlay.png"))
    assert overlay.shape == (512, 512, 3)


def test_run_roi_stage_dumps_match_pipeline_intermediates(tmp_path):
    img, _ = _phantom(seed=28)
    src = str(tmp_path / "s.png")
    raster.save_image(img, src)
    cfg = PipelineConfig()
    _, result = pipeline.run_roi(src, cfg, str(tmp_path), dump_stages=True)
    seg = result.segmentation

    # every dumped stage array equals the in-memory intermediate it names
    for ci, ch in enumerate(seg.channels):
        for lp, mask in zip(ch.layer_planes, ch.layer_masks):
            band = raster.load_image(
                str(tmp_path / f"s_stage_c{ci}_band{lp.band.index}.png"))
            np.testing.assert_array_equal(band, lp.samples)
            band_mask = raster.load_image(
                str(tmp_path / f"s_stage_c{ci}_band{lp.band.index}_mask.png"))
            np.testing.assert_array_equal(band_mask, mask)
        ch_mask = raster.load_image(str(tmp_path / f"s_stage_c{ci}_mask.png"))
        np.testing.assert_array_equal(ch_mask, ch.channel_mask)

    final = raster.load_image(str(tmp_path / "s_stage_final_mask.png"))
    np.testing.assert_array_equal(final, seg.mask)

    for ci, ch in enumerate(result.channels):
        working = raster.load_image(str(tmp_path / f"s_stage_c{ci}_working.png"))
        np.testing.assert_array_equal(working, ch.working)
        fine = raster.load_image(str(tmp_path / f"s_stage_c{ci}_fine.png"))
        np.testing.assert_array_equal(fine, ch.fine_mask)


def test_stage_dumps_recompute_from_scratch(tmp_path):
    """Dumped stages equal values recomputed module by module, proving
    the pipeline actually feeds each stage's output to the next."""
    img, _ = _phantom(seed=29)
    src = str(tmp_path / "r.png")
    raster.save_image(img, src)
    cfg = PipelineConfig()
    pipeline.run_roi(src, cfg, str(tmp_path), dump_stages=True)

    plane = img[:, :, 0]
    bands = layers.bands_from_edges(cfg.layers.edges)
    informative = layers.select_informative(
        layers.slice_layers(plane, bands), cfg.layers.keep)
    masks = []
    for lp in informative:
        dumped_plane = raster.load_image(
            str(tmp_path / f"r_stage_c0_band{lp.band.index}.png"))
        np.testing.assert_array_equal(dumped_plane, lp.samples)
        mask = blockseg.segment_layer(lp.samples, cfg.blockseg.block_size,
                                      cfg.blockseg.zero_thresh,
                                      cfg.blockseg.zero_thresh_mode)
        dumped_mask = raster.load_image(
            str(tmp_path / f"r_stage_c0_band{lp.band.index}_mask.png"))
        np.testing.assert_array_equal(dumped_mask, mask)
        masks.append(mask)

    channel_mask = pipeline.merge_layer_masks(masks)
    np.testing.assert_array_equal(
        raster.load_image(str(tmp_path / "r_stage_c0_mask.png")), channel_mask)

    # identical channels: final mask is the self-intersection
    np.testing.assert_array_equal(
        raster.load_image(str(tmp_path / "r_stage_final_mask.png")),
        channel_mask)

    working, _ = quadroi.prepare_working_plane(plane, channel_mask)
    np.testing.assert_array_equal(
        raster.load_image(str(tmp_path / "r_stage_c0_working.png")), working)

    tree = quadroi.build_quadtree(working, cfg.quad)
    fine = quadroi.fine_leaf_mask(tree, cfg.roi.fine_side)
    np.testing.assert_array_equal(
        raster.load_image(str(tmp_path / "r_stage_c0_fine.png")), fine)


def test_run_roi_missing_file_raises(tmp_path):
    with pytest.raises(OSError):
        pipeline.run_roi(str(tmp_path / "absent.png"), PipelineConfig(),
                         str(tmp_path))
