"""Editing algebra on makeup feature maps: application to the source,
partial transfer, shade interpolation, and fused multi-reference local edits.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import as_f64
from .errors import ConfigurationError, ContractViolationError, DimensionError


@dataclass(frozen=True)
class MakeupFeatureMap:
    """Per-pixel multiplicative makeup features, (H, W, C)."""

    data: np.ndarray
    resolution: str = "high"  # "high" or "low"

    def __post_init__(self):
        d = as_f64(self.data)
        if d.ndim != 3:
            raise DimensionError(f"makeup feature map must be (H, W, C), got {d.shape}")
        if self.resolution not in ("high", "low"):
            raise ContractViolationError(f"unknown resolution tag {self.resolution!r}")
        object.__setattr__(self, "data", d)


def _check_pair(a: MakeupFeatureMap, b: MakeupFeatureMap):
    if a.data.shape != b.data.shape:
        raise DimensionError(f"map shapes differ: {a.data.shape} vs {b.data.shape}")
    if a.resolution != b.resolution:
        raise DimensionError("maps carry different resolution tags")


def apply_makeup(gamma: MakeupFeatureMap, x_feat: np.ndarray) -> np.ndarray:
    """Element-wise application of the makeup map to the source features."""
    x_feat = as_f64(x_feat)
    if gamma.data.shape != x_feat.shape:
        raise DimensionError(f"shapes differ: {gamma.data.shape} vs {x_feat.shape}")
    return gamma.data * x_feat


def _expand_mask(mask: np.ndarray, shape) -> np.ndarray:
    mask = as_f64(mask)
    if mask.shape != shape[:2]:
        raise DimensionError(f"mask {mask.shape} does not match map extents {shape[:2]}")
    return mask[:, :, None]


def partial_transfer(
    gamma_ref: MakeupFeatureMap, gamma_id: MakeupFeatureMap, mask: np.ndarray
) -> MakeupFeatureMap:
    """Masked blend: reference makeup inside the mask, identity outside."""
    _check_pair(gamma_ref, gamma_id)
    m = _expand_mask(mask, gamma_ref.data.shape)
    return MakeupFeatureMap(
        m * gamma_ref.data + (1.0 - m) * gamma_id.data, gamma_ref.resolution
    )


def interpolate(
    gamma_1: MakeupFeatureMap, gamma_2: MakeupFeatureMap, alpha: float
) -> MakeupFeatureMap:
    """Convex combination ``alpha * gamma_1 + (1 - alpha) * gamma_2``."""
    _check_pair(gamma_1, gamma_2)
    if not 0.0 <= alpha <= 1.0:
        raise ContractViolationError(f"alpha must be in [0, 1], got {alpha}")
    return MakeupFeatureMap(
        alpha * gamma_1.data + (1.0 - alpha) * gamma_2.data, gamma_1.resolution
    )


@dataclass(frozen=True)
class EditEntry:
    mask: np.ndarray  # binary mask at the map's resolution
    shade: float  # in [0, 1]
    reference: str  # reference image id

    def __post_init__(self):
        if not 0.0 <= self.shade <= 1.0:
            raise ContractViolationError(f"shade must be in [0, 1], got {self.shade}")
        object.__setattr__(self, "mask", as_f64(self.mask))


@dataclass(frozen=True)
class EditSpec:
    """A local-edit request: per-entry masks and shades over reference maps."""

    entries: List[EditEntry] = field(default_factory=list)


def local_edit(
    spec: EditSpec,
    gammas: List[MakeupFeatureMap],
    gamma_id: MakeupFeatureMap,
) -> MakeupFeatureMap:
    """Fuse reference makeup maps under shaded masks; residual weight stays
    on the identity map. The summed per-pixel coefficients must not exceed 1."""
    if len(spec.entries) != len(gammas):
        raise DimensionError(
            f"{len(spec.entries)} edit entries but {len(gammas)} makeup maps"
        )
    shape = gamma_id.data.shape
    coeff_sum = np.zeros(shape[:2])
    acc = np.zeros(shape)
    for entry, gamma in zip(spec.entries, gammas):
        _check_pair(gamma, gamma_id)
        m = _expand_mask(entry.mask, shape)
        coeff = entry.shade * m
        coeff_sum += coeff[:, :, 0]
        acc += coeff * gamma.data
    over = coeff_sum > 1.0 + 1e-12
    if np.any(over):
        i, j = np.argwhere(over)[0]
        raise ContractViolationError(
            f"shade coefficients sum to {coeff_sum[i, j]:.6f} > 1 at pixel (x={j}, y={i})"
        )
    acc += (1.0 - coeff_sum)[:, :, None] * gamma_id.data
    return MakeupFeatureMap(acc, gamma_id.resolution)


def downsample_mask(mask: np.ndarray, target_height: int, target_width: int) -> np.ndarray:
    """Area-average pool a binary mask, then threshold strictly above 0.5."""
    mask = as_f64(mask)
    h, w = mask.shape
    if h % target_height or w % target_width:
        raise ConfigurationError(
            f"target ({target_height}, {target_width}) must divide mask extents ({h}, {w})"
        )
    fy = h // target_height
    fx = w // target_width
    pooled = mask.reshape(target_height, fy, target_width, fx).mean(axis=(1, 3))
    return (pooled > 0.5).astype(np.float64)
