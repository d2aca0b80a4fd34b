"""Rule-based ROI localization for mammographic images.

The pipeline slices each color channel into intensity bands, segments
each band with a block-wise zero-count rule, fuses the channel masks,
and extracts regions of interest from an entropy-driven quadtree built
over the masked image.
"""

from .config import (
    BlocksegConfig,
    ConfigError,
    EvalConfig,
    IoConfig,
    LayersConfig,
    PipelineConfig,
    QuadConfig,
    RoiConfig,
    apply_overrides,
    config_from_dict,
    load_config,
    validate_config,
)
from .blockseg import BlockStats, block_zero_counts, iterate_blocks, segment_layer
from .evaluation import EvalReport, EvalSample, dice, evaluate, iou, match
from .fusion import fuse_channel, fuse_channels, intersect
from .layers import LayerBand, LayerPlane, bands_from_edges, select_informative, slice_layers
from .phantom import GroundTruthBox, HalfEllipse, Mass, PhantomSpec, generate_phantom, phantom_suite, suite_specs
from .pipeline import RoiResult, SegmentationResult, locate_roi, merge_layer_masks, segment_image
from .quadroi import (
    CoordMap,
    Histogram256,
    QuadNode,
    QuadTree,
    RoiBox,
    build_quadtree,
    entropy,
    extract_roi,
    fine_leaf_mask,
    leaf_edge_map,
    prepare_working_plane,
)
from .raster import RasterError, load_image, save_image, save_mask, split_channels

__version__ = "0.1.0"

__all__ = [
    "BlockStats",
    "BlocksegConfig",
    "ConfigError",
    "CoordMap",
    "EvalConfig",
    "EvalReport",
    "EvalSample",
    "GroundTruthBox",
    "HalfEllipse",
    "Histogram256",
    "IoConfig",
    "LayerBand",
    "LayerPlane",
    "LayersConfig",
    "Mass",
    "PhantomSpec",
    "PipelineConfig",
    "QuadConfig",
    "QuadNode",
    "QuadTree",
    "RasterError",
    "RoiBox",
    "RoiConfig",
    "RoiResult",
    "SegmentationResult",
    "apply_overrides",
    "bands_from_edges",
    "block_zero_counts",
    "build_quadtree",
    "config_from_dict",
    "dice",
    "entropy",
    "evaluate",
    "extract_roi",
    "fine_leaf_mask",
    "fuse_channel",
    "fuse_channels",
    "generate_phantom",
    "intersect",
    "iou",
    "iterate_blocks",
    "leaf_edge_map",
    "load_config",
    "load_image",
    "locate_roi",
    "match",
    "merge_layer_masks",
    "phantom_suite",
    "prepare_working_plane",
    "save_image",
    "save_mask",
    "segment_image",
    "segment_layer",
    "select_informative",
    "slice_layers",
    "split_channels",
    "suite_specs",
    "validate_config",
]
