"""Synthetic breast phantoms with known geometry for pipeline evaluation.

A phantom is a half-ellipse breast region on a black background: tissue
sits at background_level, optionally tilted by a linear gradient, plus
Gaussian pixel noise; each mass adds a radially decaying Gaussian bump
peak_contrast * exp(-d^2 / (2 * (radius/2)^2)). The image is replicated
to three identical channels. Ground truth is the radius-bounded square
around each mass center.

All randomness comes from SplitMix64 used in counter mode: sample i of a
stream is finalize(key + (i+1) * GOLDEN) with the published SplitMix64
finalizer, evaluated on uint64 numpy arrays. The generator is seeded
only by explicit integers, so equal seeds give byte-identical phantoms
on any platform with IEEE-754 doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = 0xFFFFFFFFFFFFFFFF

# Stream salts (arbitrary fixed tags, part of the output format).
_SALT_SUITE = 0x53554954
_SALT_PARAMS = 0x01
_SALT_MASS = 0x02
_SALT_PLACE = 0x03
_SALT_NOISE_A = 0x0A
_SALT_NOISE_B = 0x0B


def _finalize(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output mix over a uint64 array (wrapping arithmetic)."""
    z = z.copy()
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def _stream_bits(key: int, count: int) -> np.ndarray:
    idx = np.arange(1, count + 1, dtype=np.uint64)
    return _finalize(np.uint64(key & _MASK64) + idx * _GOLDEN)


def _derive(key: int, salt: int) -> int:
    z = np.array([(key & _MASK64) ^ (salt & _MASK64)], dtype=np.uint64)
    return int(_finalize(z + _GOLDEN)[0])


def _uniform(key: int, count: int) -> np.ndarray:
    """count doubles in [0, 1) from one counter stream."""
    return (_stream_bits(key, count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def _normals(key: int, count: int) -> np.ndarray:
    """Standard normals via Box-Muller on two counter streams."""
    bits = _stream_bits(_derive(key, _SALT_NOISE_A), count)
    u1 = ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53  # (0, 1]
    u2 = _uniform(_derive(key, _SALT_NOISE_B), count)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


# ---------------------------------------------------------------------------
# geometry

@dataclass(frozen=True)
class HalfEllipse:
    """Breast outline: half of an axis-aligned ellipse.

    side names the image edge the flat cut sits on: "left" keeps x >= cx
    (bulge to the right), "right" keeps x <= cx.
    """
    cx: float
    cy: float
    axis_x: float
    axis_y: float
    side: str = "left"


@dataclass(frozen=True)
class Mass:
    """A Gaussian bump: full-width scale is radius, peak adds peak_contrast."""
    cx: int
    cy: int
    radius: int
    peak_contrast: float


@dataclass(frozen=True)
class GroundTruthBox:
    x: int
    y: int
    width: int
    height: int

    @property
    def center(self):
        return (self.x + self.width / 2.0, self.y + self.height / 2.0)


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 512
    height: int = 512
    breast: HalfEllipse = field(
        default_factory=lambda: HalfEllipse(0.0, 256.0, 290.0, 240.0, "left"))
    background_level: float = 98.0
    tissue_noise_sigma: float = 0.6
    tissue_gradient: tuple = (0.0, 0.0)  # intensity change per pixel (gx, gy)
    masses: tuple = ()
    seed: int = 0


def _validate_breast(spec: PhantomSpec) -> None:
    b = spec.breast
    if b.side not in ("left", "right"):
        raise ValueError(f"breast side must be 'left' or 'right', got {b.side!r}")
    if b.axis_x <= 0 or b.axis_y <= 0:
        raise ValueError("breast axes must be positive")


def breast_mask(spec: PhantomSpec) -> np.ndarray:
    """Boolean (H, W) mask of the half-ellipse breast region."""
    _validate_breast(spec)
    b = spec.breast
    ys = np.arange(spec.height, dtype=np.float64)[:, None]
    xs = np.arange(spec.width, dtype=np.float64)[None, :]
    ex = (xs - b.cx) / b.axis_x
    ey = (ys - b.cy) / b.axis_y
    inside = ex * ex + ey * ey <= 1.0
    if b.side == "left":
        inside &= xs >= b.cx
    else:
        inside &= xs <= b.cx
    return inside


def _inside_breast_point(spec: PhantomSpec, x: float, y: float) -> bool:
    b = spec.breast
    if not (0.0 <= x <= spec.width - 1 and 0.0 <= y <= spec.height - 1):
        return False
    if b.side == "left" and x < b.cx:
        return False
    if b.side == "right" and x > b.cx:
        return False
    ex = (x - b.cx) / b.axis_x
    ey = (y - b.cy) / b.axis_y
    return ex * ex + ey * ey <= 1.0


def _disc_fits(spec: PhantomSpec, cx: float, cy: float, radius: float) -> bool:
    # The breast region is convex (ellipse * half-plane * image rect), so
    # a 16-gon inscribed at radius r+2 containing the disc suffices:
    # (r+2) * cos(pi/16) >= r for all r <= 100.
    if not _inside_breast_point(spec, cx, cy):
        return False
    rr = radius + 2.0
    for k in range(16):
        ang = 2.0 * math.pi * k / 16.0
        if not _inside_breast_point(
                spec, cx + rr * math.cos(ang), cy + rr * math.sin(ang)):
            return False
    return True


# ---------------------------------------------------------------------------
# generation

def generate_phantom(spec: PhantomSpec):
    """Render a PhantomSpec to (image, ground_truth_boxes).

    image is (H, W, 3) uint8 with three identical channels, read-only.
    Raises ValueError if a mass disc is not fully inside the breast.
    """
    mask = breast_mask(spec)
    height, width = spec.height, spec.width
    ys = np.arange(height, dtype=np.float64)[:, None]
    xs = np.arange(width, dtype=np.float64)[None, :]

    gx, gy = spec.tissue_gradient
    values = (spec.background_level
              + gx * (xs - spec.breast.cx)
              + gy * (ys - spec.breast.cy))
    values = np.broadcast_to(values, (height, width)).copy()
    if spec.tissue_noise_sigma > 0:
        noise = _normals(_derive(spec.seed, _SALT_NOISE_A), height * width)
        values += spec.tissue_noise_sigma * noise.reshape(height, width)

    truth = []
    for m in spec.masses:
        dy = ys - m.cy
        dx = xs - m.cx
        d2 = dx * dx + dy * dy
        disc = d2 <= float(m.radius) ** 2
        if not mask[disc].all():
            raise ValueError(
                f"mass at ({m.cx}, {m.cy}) radius {m.radius} is not fully "
                "inside the breast region")
        sigma_g = m.radius / 2.0
        values += m.peak_contrast * np.exp(-d2 / (2.0 * sigma_g * sigma_g))
        x0 = max(0, m.cx - m.radius)
        y0 = max(0, m.cy - m.radius)
        x1 = min(width - 1, m.cx + m.radius)
        y1 = min(height - 1, m.cy + m.radius)
        truth.append(GroundTruthBox(x=x0, y=y0, width=x1 - x0 + 1,
                                    height=y1 - y0 + 1))

    plane = np.where(mask, np.clip(np.rint(values), 0, 255), 0).astype(np.uint8)
    img = np.repeat(plane[:, :, None], 3, axis=2)
    img.flags.writeable = False
    return img, truth


# ---------------------------------------------------------------------------
# seeded suites

def suite_specs(n: int, seed: int):
    """Deterministic phantom specs: even indices carry one mass, odd none.

    Geometry, tissue tilt, and mass parameters are drawn from seeded
    counter streams; mass radius is uniform in [10, 40] px and peak
    contrast uniform in [40, 90].
    """
    if n <= 0 or n % 2 != 0:
        raise ValueError(f"suite size must be positive and even, got {n}")
    suite_key = _derive(seed, _SALT_SUITE)
    specs = []
    for i in range(n):
        key = _derive(suite_key, 7000 + i)
        p = _uniform(_derive(key, _SALT_PARAMS), 7)
        side = "left" if p[0] < 0.5 else "right"
        axis_x = 270.0 + p[1] * 35.0
        axis_y = 225.0 + p[2] * 30.0
        cy = 245.0 + p[3] * 22.0
        base = 95.0 + p[4] * 10.0
        gmag = 0.09 + p[5] * 0.03
        gang = p[6] * 2.0 * math.pi
        cx = 0.0 if side == "left" else 511.0
        spec = PhantomSpec(
            width=512,
            height=512,
            breast=HalfEllipse(cx=cx, cy=cy, axis_x=axis_x, axis_y=axis_y,
                               side=side),
            background_level=base,
            tissue_noise_sigma=0.6,
            tissue_gradient=(gmag * math.cos(gang), gmag * math.sin(gang)),
            masses=(),
            seed=key,
        )
        if i % 2 == 0:
            mp = _uniform(_derive(key, _SALT_MASS), 2)
            radius = int(round(10 + mp[0] * 30))
            contrast = 40.0 + mp[1] * 50.0
            place = _uniform(_derive(key, _SALT_PLACE), 800)
            cxm = cym = None
            x_lo, x_hi = (0.0, axis_x) if side == "left" else (511.0 - axis_x, 511.0)
            y_lo, y_hi = cy - axis_y, cy + axis_y
            for j in range(0, place.size, 2):
                cand_x = int(round(x_lo + place[j] * (x_hi - x_lo)))
                cand_y = int(round(y_lo + place[j + 1] * (y_hi - y_lo)))
                if _disc_fits(spec, cand_x, cand_y, radius):
                    cxm, cym = cand_x, cand_y
                    break
            if cxm is None:
                raise RuntimeError("mass placement failed; breast too small")
            spec = PhantomSpec(
                width=spec.width, height=spec.height, breast=spec.breast,
                background_level=spec.background_level,
                tissue_noise_sigma=spec.tissue_noise_sigma,
                tissue_gradient=spec.tissue_gradient,
                masses=(Mass(cx=cxm, cy=cym, radius=radius,
                             peak_contrast=contrast),),
                seed=spec.seed,
            )
        specs.append(spec)
    return specs


def phantom_suite(n: int, seed: int):
    """Render suite_specs: list of (image, ground_truth_boxes) pairs."""
    return [generate_phantom(spec) for spec in suite_specs(n, seed)]
