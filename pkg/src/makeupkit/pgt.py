"""Pseudo-ground-truth synthesis: per-region histogram matching for color,
per-region TPS warping for detail, and annealed convex blending.
"""

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import as_f64
from .errors import (
    ContractViolationError,
    DimensionError,
    EmptyRegionError,
)
from .geometry import LandmarkSet, bilinear_sample, make_grid, tps_solve

REGIONS = ("skin", "lip", "eyeshadow")

# Landmark index layout of the bundled 17-point fixtures:
# 0-4 face outline, 5-8 left eye ring, 9-12 right eye ring, 13-16 lip.
FACE_OUTLINE_IDX = tuple(range(0, 5))
LEFT_EYE_IDX = tuple(range(5, 9))
RIGHT_EYE_IDX = tuple(range(9, 13))
LIP_IDX = tuple(range(13, 17))

DEFAULT_REGION_LANDMARKS: Dict[str, Optional[Tuple[int, ...]]] = {
    "skin": None,  # all landmarks
    "eyeshadow": LEFT_EYE_IDX + RIGHT_EYE_IDX,
    "lip": LIP_IDX,
}


@dataclass(frozen=True)
class RegionMasks:
    """Binary masks (H, W) valued in {0, 1} for the three makeup regions."""

    skin: np.ndarray
    lip: np.ndarray
    eyeshadow: np.ndarray
    extras: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        masks = {}
        shape = None
        for name in REGIONS:
            m = as_f64(getattr(self, name))
            if shape is None:
                shape = m.shape
            if m.shape != shape:
                raise DimensionError("region masks have inconsistent extents")
            if not np.all((m == 0.0) | (m == 1.0)):
                raise ContractViolationError(f"mask {name!r} is not binary")
            masks[name] = m
            object.__setattr__(self, name, m)
        if np.any(masks["skin"] + masks["lip"] + masks["eyeshadow"] > 1.0):
            raise ContractViolationError("region masks overlap")

    def get(self, name: str) -> np.ndarray:
        if name in REGIONS:
            return getattr(self, name)
        return self.extras[name]


def _check_image(img) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise DimensionError("expected an 8-bit RGB image (H, W, 3)")
    return img


def _match_channel(src_vals: np.ndarray, ref_vals: np.ndarray) -> np.ndarray:
    """256-bin CDF-matching lookup table for one channel."""
    src_hist = np.bincount(src_vals, minlength=256).astype(np.float64)
    ref_hist = np.bincount(ref_vals, minlength=256).astype(np.float64)
    src_cdf = np.cumsum(src_hist) / src_hist.sum()
    ref_cdf = np.cumsum(ref_hist) / ref_hist.sum()
    # smallest reference level whose CDF reaches the source CDF
    lut = np.searchsorted(ref_cdf, src_cdf, side="left")
    return np.clip(lut, 0, 255).astype(np.uint8)


def histogram_match(
    source: np.ndarray,
    reference: np.ndarray,
    mask_src: np.ndarray,
    mask_ref: np.ndarray,
) -> np.ndarray:
    """Match each channel's CDF inside ``mask_src`` to the reference region.

    Pixels outside ``mask_src`` are returned unchanged.
    """
    source = _check_image(source)
    reference = _check_image(reference)
    msrc = as_f64(mask_src) > 0.5
    mref = as_f64(mask_ref) > 0.5
    if not msrc.any() or not mref.any():
        raise EmptyRegionError("histogram matching requires nonempty masks")
    out = source.copy()
    for c in range(3):
        lut = _match_channel(source[..., c][msrc], reference[..., c][mref])
        channel = out[..., c]
        channel[msrc] = lut[source[..., c][msrc]]
    return out


def region_landmark_subset(landmarks: LandmarkSet, region: str) -> LandmarkSet:
    idx = DEFAULT_REGION_LANDMARKS[region]
    if idx is None:
        return landmarks
    return landmarks.subset(idx)


def warp_region(
    source_img: np.ndarray,
    reference_img: np.ndarray,
    src_lm: LandmarkSet,
    ref_lm: LandmarkSet,
    region: str,
) -> np.ndarray:
    """Warp the reference image into the source geometry using the region's
    landmark subset; returns the full warped frame as uint8."""
    source_img = _check_image(source_img)
    reference_img = _check_image(reference_img)
    src_sub = region_landmark_subset(src_lm, region)
    ref_sub = region_landmark_subset(ref_lm, region)
    transform = tps_solve(src_sub, ref_sub)
    grid = make_grid(transform, source_img.shape[0], source_img.shape[1])
    warped = bilinear_sample(reference_img.astype(np.float64), grid)
    return np.clip(np.rint(warped), 0, 255).astype(np.uint8)


def make_pgt(
    x: np.ndarray,
    y: np.ndarray,
    masks_x: RegionMasks,
    masks_y: RegionMasks,
    x_lm: LandmarkSet,
    y_lm: LandmarkSet,
    alphas: Dict[str, float],
) -> np.ndarray:
    """Compose the pseudo ground truth: per region, a convex blend of the
    TPS-warped reference (detail) and the histogram-matched source (color);
    pixels outside all regions are copied from the source."""
    x = _check_image(x)
    y = _check_image(y)
    for region in REGIONS:
        a = alphas[region]
        if not 0.0 <= a <= 1.0:
            raise ContractViolationError(f"alpha[{region!r}]={a} outside [0, 1]")

    hm = x.copy()
    for region in REGIONS:
        sel = masks_x.get(region) > 0.5
        if not sel.any():
            continue  # region absent from the source face
        matched = histogram_match(x, y, masks_x.get(region), masks_y.get(region))
        hm[sel] = matched[sel]

    out = x.astype(np.float64)
    for region in REGIONS:
        sel = masks_x.get(region) > 0.5
        if not sel.any():
            continue
        warped = warp_region(x, y, x_lm, y_lm, region).astype(np.float64)
        blend = alphas[region] * warped + (1.0 - alphas[region]) * hm.astype(np.float64)
        out[sel] = blend[sel]
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


DEFAULT_BREAKPOINTS: Dict[str, List[Tuple[float, float]]] = {
    # defaults only: rise over the first 40% of training, plateau, then decay
    # over the final 30%
    "skin": [(0.0, 0.1), (0.4, 0.7), (0.7, 0.7), (1.0, 0.3)],
    "lip": [(0.0, 0.1), (0.4, 0.8), (0.7, 0.8), (1.0, 0.3)],
    "eyeshadow": [(0.0, 0.2), (0.4, 0.9), (0.7, 0.9), (1.0, 0.4)],
}


@dataclass(frozen=True)
class BlendSchedule:
    """Piecewise-linear annealing of the per-region blending factors."""

    breakpoints: Dict[str, List[Tuple[float, float]]] = field(
        default_factory=lambda: {k: list(v) for k, v in DEFAULT_BREAKPOINTS.items()}
    )

    def __post_init__(self):
        for region, pts in self.breakpoints.items():
            if len(pts) < 2:
                raise ContractViolationError(f"schedule for {region!r} needs >= 2 points")
            ps = [p for p, _ in pts]
            if ps != sorted(ps) or ps[0] != 0.0 or ps[-1] != 1.0:
                raise ContractViolationError(
                    f"schedule for {region!r} must span progress 0..1 in order"
                )
            for _, v in pts:
                if not 0.0 <= v <= 1.0:
                    raise ContractViolationError(f"schedule value {v} outside [0, 1]")

    @classmethod
    def from_json(cls, path) -> "BlendSchedule":
        with open(path) as fh:
            raw = json.load(fh)
        return cls({k: [tuple(p) for p in v] for k, v in raw.items()})


def schedule_eval(schedule: BlendSchedule, progress: float) -> Dict[str, float]:
    """Evaluate the blending factors at a training progress in [0, 1]."""
    if not 0.0 <= progress <= 1.0:
        raise ContractViolationError(f"progress {progress} outside [0, 1]")
    out = {}
    for region, pts in schedule.breakpoints.items():
        ps = np.array([p for p, _ in pts])
        vs = np.array([v for _, v in pts])
        out[region] = float(np.interp(progress, ps, vs))
    return out


def synthesize_eyeshadow_mask(
    landmarks: LandmarkSet,
    height: int,
    width: int,
    eye_index_groups: Sequence[Sequence[int]] = (LEFT_EYE_IDX, RIGHT_EYE_IDX),
    ring_fraction: float = 0.12,
) -> np.ndarray:
    """Ring around each eye contour: landmarks dilated by 12% of the
    inter-ocular distance, minus the eye interior."""
    pts = landmarks.points
    centers = [pts[list(g)].mean(axis=0) for g in eye_index_groups]
    inter_ocular = float(np.linalg.norm(centers[0] - centers[1]))
    radius = ring_fraction * inter_ocular
    xs, ys = np.meshgrid(np.arange(width, dtype=np.float64),
                         np.arange(height, dtype=np.float64))
    mask = np.zeros((height, width))
    for group, center in zip(eye_index_groups, centers):
        eye_pts = pts[list(group)]
        eye_radius = float(np.linalg.norm(eye_pts - center, axis=1).max())
        dist = np.hypot(xs - center[0], ys - center[1])
        ring = (dist <= eye_radius + radius) & (dist > eye_radius)
        mask[ring] = 1.0
    return mask
