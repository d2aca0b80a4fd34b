"""8-bit raster I/O and overlay rendering.

Images are numpy uint8 arrays: shape (H, W) for a single plane, (H, W, 3)
for RGB. Binary masks use the same layout with values restricted to
{0, 255}. PNG is decoded through Pillow after the header is checked for
an 8-bit sample depth; PGM/PPM use a local binary (P5/P6, maxval 255)
codec so that unsupported variants fail loudly instead of being guessed
at. Loaded arrays are marked read-only.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image


class RasterError(Exception):
    """Base class for raster format problems."""


class UnsupportedFormatError(RasterError):
    """File is not one of the supported image encodings."""


class UnsupportedBitDepthError(RasterError):
    """File uses a sample depth other than 8 bits."""


class CorruptImageError(RasterError):
    """File claims a supported format but its content is malformed."""


_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _finalize(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# PNM (PGM/PPM) codec

def _read_pnm(data: bytes, path: str) -> np.ndarray:
    magic = data[:2]
    if magic in (b"P1", b"P2", b"P3"):
        raise UnsupportedFormatError(
            f"{path}: ASCII PNM ({magic.decode()}) not supported, "
            "use binary P5/P6")
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormatError(f"{path}: unrecognized PNM magic {magic!r}")

    # Header tokens may be separated by whitespace and '#' comments.
    pos = 2
    tokens = []
    while len(tokens) < 3:
        if pos >= len(data):
            raise CorruptImageError(f"{path}: truncated PNM header")
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos])
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise CorruptImageError(f"{path}: non-numeric PNM header") from exc
    if width <= 0 or height <= 0:
        raise CorruptImageError(f"{path}: bad PNM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedBitDepthError(
            f"{path}: PNM maxval {maxval}, only 8-bit (maxval 255) supported")

    pos += 1  # exactly one whitespace byte after maxval
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    raw = data[pos:pos + need]
    if len(raw) < need:
        raise CorruptImageError(
            f"{path}: PNM pixel data truncated ({len(raw)} of {need} bytes)")
    arr = np.frombuffer(raw, dtype=np.uint8, count=need)
    if channels == 1:
        return arr.reshape(height, width)
    return arr.reshape(height, width, 3)


def _write_pnm(arr: np.ndarray, path: str) -> None:
    if arr.ndim == 2:
        header = b"P5 %d %d 255\n" % (arr.shape[1], arr.shape[0])
    else:
        header = b"P6 %d %d 255\n" % (arr.shape[1], arr.shape[0])
    _atomic_write_bytes(path, header + arr.tobytes())


# ---------------------------------------------------------------------------
# PNG via Pillow, header pre-checked

def _read_png(data: bytes, path: str) -> np.ndarray:
    # IHDR is mandatory and first: bit depth at offset 24, color type at 25.
    if len(data) < 26:
        raise CorruptImageError(f"{path}: truncated PNG")
    bit_depth = data[24]
    color_type = data[25]
    if color_type in (4, 6):
        raise UnsupportedFormatError(
            f"{path}: PNG with alpha channel (color type {color_type}) "
            "not supported")
    if bit_depth != 8:
        raise UnsupportedBitDepthError(
            f"{path}: PNG bit depth {bit_depth}, only 8 supported")
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode == "P":
                im = im.convert("RGB")
            if im.mode not in ("L", "RGB"):
                raise UnsupportedFormatError(
                    f"{path}: PNG pixel layout {im.mode!r} not supported")
            return np.asarray(im)
    except RasterError:
        raise
    except Exception as exc:
        raise CorruptImageError(f"{path}: PNG decode failed: {exc}") from exc


# ---------------------------------------------------------------------------
# public API

def load_image(path) -> np.ndarray:
    """Load a PNG or binary PGM/PPM file as a uint8 array.

    Returns shape (H, W) for single-plane files and (H, W, 3) for RGB.
    Raises UnsupportedFormatError / UnsupportedBitDepthError /
    CorruptImageError for files that cannot be treated as 8-bit rasters;
    OSError propagates for unreadable paths.
    """
    path = os.fspath(path)
    with open(path, "rb") as fh:
        data = fh.read()
    if data.startswith(_PNG_SIGNATURE):
        return _finalize(_read_png(data, path))
    if data[:1] == b"P":
        return _finalize(_read_pnm(data, path))
    raise UnsupportedFormatError(f"{path}: not a PNG or binary PNM file")


def _atomic_write_bytes(path, payload: bytes) -> None:
    # Write-then-rename keeps partially written files from being observed.
    path = os.fspath(path)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)


def save_image(arr: np.ndarray, path) -> None:
    """Write a uint8 array as PNG, PGM, or PPM depending on extension."""
    path = os.fspath(path)
    arr = np.asarray(arr)
    if arr.dtype != np.uint8 or arr.ndim not in (2, 3):
        raise ValueError("expected a uint8 array of shape (H, W) or (H, W, 3)")
    if arr.ndim == 3 and arr.shape[2] != 3:
        raise ValueError(f"expected 3 channels, got {arr.shape[2]}")
    ext = os.path.splitext(path)[1].lower()
    if ext == ".png":
        im = Image.fromarray(arr, mode="L" if arr.ndim == 2 else "RGB")
        buf = io.BytesIO()
        im.save(buf, format="PNG")
        _atomic_write_bytes(path, buf.getvalue())
    elif ext == ".pgm":
        if arr.ndim != 2:
            raise ValueError("PGM holds a single plane; got 3 channels")
        _write_pnm(arr, path)
    elif ext == ".ppm":
        if arr.ndim != 3:
            raise ValueError("PPM holds 3 channels; got a single plane")
        _write_pnm(arr, path)
    else:
        raise ValueError(f"unsupported output extension {ext!r}")


def save_mask(mask: np.ndarray, path) -> None:
    """Write a {0, 255} mask as a single-plane PNG or PGM."""
    mask = np.asarray(mask)
    if mask.ndim != 2:
        raise ValueError("masks are single-plane")
    values = np.unique(mask)
    if not np.isin(values, (0, 255)).all():
        raise ValueError("mask values must be 0 or 255")
    save_image(mask.astype(np.uint8), path)


def split_channels(img: np.ndarray):
    """Return (r, g, b) planes; a single-plane image is replicated."""
    img = np.asarray(img)
    if img.ndim == 2:
        return img, img, img
    if img.ndim == 3 and img.shape[2] == 3:
        return img[:, :, 0], img[:, :, 1], img[:, :, 2]
    raise ValueError(f"expected (H, W) or (H, W, 3), got {img.shape}")


# ---------------------------------------------------------------------------
# overlays

@dataclass(frozen=True)
class OverlayBox:
    """A rectangle to outline on an overlay, with its drawing color."""
    x: int
    y: int
    width: int
    height: int
    color: tuple = (255, 0, 0)


@dataclass
class OverlaySpec:
    """What to draw: a base image, outlined boxes, optional mask tint."""
    base: np.ndarray
    boxes: list = field(default_factory=list)
    mask: np.ndarray | None = None
    mask_color: tuple = (0, 255, 0)
    mask_alpha: float = 0.35


def compose_overlay(spec: OverlaySpec) -> np.ndarray:
    """Render an OverlaySpec to an RGB uint8 array.

    Mask-tinted pixels are alpha-blended first, then box borders are
    drawn solid (1px) so boxes stay visible over the tint.
    """
    base = np.asarray(spec.base)
    if base.ndim == 2:
        rgb = np.repeat(base[:, :, None], 3, axis=2).astype(np.float64)
    elif base.ndim == 3 and base.shape[2] == 3:
        rgb = base.astype(np.float64)
    else:
        raise ValueError(f"bad base shape {base.shape}")
    height, width = rgb.shape[:2]

    if spec.mask is not None:
        mask = np.asarray(spec.mask)
        if mask.shape != (height, width):
            raise ValueError("mask dimensions do not match base")
        sel = mask != 0
        tint = np.asarray(spec.mask_color, dtype=np.float64)
        rgb[sel] = rgb[sel] * (1.0 - spec.mask_alpha) + tint * spec.mask_alpha

    out = np.rint(rgb).astype(np.uint8)
    for box in spec.boxes:
        x0, y0 = box.x, box.y
        x1, y1 = box.x + box.width, box.y + box.height
        if not (0 <= x0 < x1 <= width and 0 <= y0 < y1 <= height):
            raise ValueError(f"box {box} outside base bounds {width}x{height}")
        color = np.asarray(box.color, dtype=np.uint8)
        out[y0, x0:x1] = color
        out[y1 - 1, x0:x1] = color
        out[y0:y1, x0] = color
        out[y0:y1, x1 - 1] = color
    return out


def render_overlay(spec: OverlaySpec, path) -> None:
    """Compose an overlay and write it as PNG."""
    save_image(compose_overlay(spec), path)
