"""Thin-plate-spline warping, sampling-grid generation, bilinear sampling,
and landmark positional embedding.

Coordinate convention (fixed for golden-file reproducibility): a point is
``(x, y)`` with ``x`` the column and ``y`` the row, origin at the top-left,
integer coordinates at pixel centers.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .core import as_f64
from .errors import (
    ContractViolationError,
    DegenerateControlsError,
    DegenerateEmbeddingError,
    DimensionError,
)

CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class LandmarkSet:
    """Ordered facial landmark points in pixel coordinates."""

    points: np.ndarray  # (N, 2) float64, columns (x, y)
    image_width: int
    image_height: int

    def __post_init__(self):
        pts = as_f64(self.points)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DimensionError(f"landmarks must be (N, 2), got {pts.shape}")
        if pts.shape[0] < 4:
            raise ContractViolationError(f"need at least 4 landmarks, got {pts.shape[0]}")
        if np.any(pts[:, 0] < 0) or np.any(pts[:, 0] >= self.image_width):
            raise ContractViolationError("landmark x coordinate out of [0, width)")
        if np.any(pts[:, 1] < 0) or np.any(pts[:, 1] >= self.image_height):
            raise ContractViolationError("landmark y coordinate out of [0, height)")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def subset(self, indices) -> "LandmarkSet":
        return LandmarkSet(self.points[list(indices)], self.image_width, self.image_height)

    def scaled(self, width: int, height: int) -> "LandmarkSet":
        """Rescale to another resolution (e.g. a feature-map grid)."""
        sx = width / self.image_width
        sy = height / self.image_height
        return LandmarkSet(self.points * np.array([sx, sy]), width, height)


def load_landmarks(path, image_width: int, image_height: int) -> LandmarkSet:
    """Load a JSON array of [x, y] pairs."""
    with open(path) as fh:
        raw = json.load(fh)
    return LandmarkSet(np.array(raw, dtype=np.float64), image_width, image_height)


def save_landmarks(path, landmarks: LandmarkSet) -> None:
    Path(path).write_text(json.dumps([[float(x), float(y)] for x, y in landmarks.points]))


def _phi(r: np.ndarray) -> np.ndarray:
    """Radial kernel r^2 log r with the r=0 limit taken as 0."""
    out = np.zeros_like(r)
    nz = r > 0
    out[nz] = r[nz] ** 2 * np.log(r[nz])
    return out


@dataclass(frozen=True)
class TpsTransform:
    """A solved 2D thin-plate spline: 2 x (N+3) parameter matrix.

    Row layout: ``[a0 a1 a2 u_1..u_N]`` over ``[b0 b1 b2 v_1..v_N]`` so that
    a point maps through ``T @ [1, x, y, phi(|p-c_1|), ..., phi(|p-c_N|)]``.
    """

    matrix: np.ndarray  # (2, N+3)
    source_controls: LandmarkSet


def tps_solve(source: LandmarkSet, target: LandmarkSet) -> TpsTransform:
    """Solve the exact-interpolating TPS mapping source points onto target points."""
    if len(source) != len(target):
        raise DimensionError(f"control counts differ: {len(source)} vs {len(target)}")
    c = source.points  # (N, 2)
    cp = target.points
    n = c.shape[0]

    dist = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=-1)
    chat = _phi(dist)

    delta = np.zeros((n + 3, n + 3))
    delta[0, :n] = 1.0
    delta[1:3, :n] = c.T
    delta[3:, :n] = chat
    delta[3:, n] = 1.0
    delta[3:, n + 1:] = c

    if np.linalg.cond(delta) > CONDITION_LIMIT:
        raise DegenerateControlsError("TPS control points are numerically degenerate")

    rhs = np.zeros((2, n + 3))
    rhs[:, :n] = cp.T
    # T @ delta = rhs  <=>  delta.T @ T.T = rhs.T; the system's row ordering
    # [1, x, y, phi_1..phi_N] makes T come out as [a0 a1 a2 u] directly.
    t = np.linalg.solve(delta.T, rhs.T).T
    return TpsTransform(matrix=t, source_controls=source)


def _tps_basis(transform: TpsTransform, points: np.ndarray) -> np.ndarray:
    c = transform.source_controls.points
    pts = as_f64(points).reshape(-1, 2)
    dist = np.linalg.norm(pts[:, None, :] - c[None, :, :], axis=-1)
    basis = np.concatenate(
        [np.ones((pts.shape[0], 1)), pts, _phi(dist)], axis=1
    )
    return basis


def tps_apply(transform: TpsTransform, point) -> np.ndarray:
    """Map a point (or an (M, 2) batch) through the transform."""
    pts = as_f64(point)
    single = pts.ndim == 1
    out = _tps_basis(transform, pts) @ transform.matrix.T
    return out[0] if single else out.reshape(pts.shape)


def identity_transform(controls: LandmarkSet) -> TpsTransform:
    return tps_solve(controls, controls)


def make_grid(transform: TpsTransform, height: int, width: int) -> np.ndarray:
    """Sampling grid: ``grid[i, j]`` is the input-space (x, y) for output pixel (j, i)."""
    if height <= 0 or width <= 0:
        raise DimensionError("grid extents must be positive")
    xs, ys = np.meshgrid(np.arange(width, dtype=np.float64),
                         np.arange(height, dtype=np.float64))
    pts = np.stack([xs.ravel(), ys.ravel()], axis=1)
    mapped = _tps_basis(transform, pts) @ transform.matrix.T
    return mapped.reshape(height, width, 2)


def identity_grid(height: int, width: int) -> np.ndarray:
    xs, ys = np.meshgrid(np.arange(width, dtype=np.float64),
                         np.arange(height, dtype=np.float64))
    return np.stack([xs, ys], axis=-1)


def bilinear_sample(image: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Sample ``image`` (H, W, C) at ``grid`` (h, w, 2); border coordinates clamp."""
    image = as_f64(image)
    grid = as_f64(grid)
    if image.ndim != 3 or grid.ndim != 3 or grid.shape[2] != 2:
        raise DimensionError(f"bad shapes: image {image.shape}, grid {grid.shape}")
    return kernels.bilinear_forward(image, grid)


def bilinear_sample_vjp_image(image_shape, grid: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
    """Gradient of bilinear_sample w.r.t. the image (grid held fixed)."""
    return kernels.bilinear_vjp_image(tuple(image_shape), as_f64(grid), as_f64(cotangent))


def embed_point(pixel, landmark_points: np.ndarray) -> np.ndarray:
    """Unit-normalized vector of (dx, dy) offsets from a pixel to each landmark."""
    pts = as_f64(landmark_points).reshape(-1, 2)
    raw = (as_f64(pixel)[None, :] - pts).ravel()
    norm = np.linalg.norm(raw)
    if norm == 0.0:
        raise DegenerateEmbeddingError("pixel coincides with every landmark")
    return raw / norm


def embedding_map(height: int, width: int, landmarks: LandmarkSet) -> np.ndarray:
    """Per-pixel landmark embedding, shape (H, W, 2N)."""
    pts = landmarks.points
    xs, ys = np.meshgrid(np.arange(width, dtype=np.float64),
                         np.arange(height, dtype=np.float64))
    pix = np.stack([xs, ys], axis=-1)  # (H, W, 2)
    raw = pix[:, :, None, :] - pts[None, None, :, :]  # (H, W, N, 2)
    raw = raw.reshape(height, width, -1)
    norm = np.linalg.norm(raw, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise DegenerateEmbeddingError("a pixel coincides with every landmark")
    return raw / norm


def embed_map(features: np.ndarray, landmarks: LandmarkSet) -> np.ndarray:
    """Concatenate visual features (H, W, C) with the landmark embedding."""
    features = as_f64(features)
    h, w = features.shape[:2]
    emb = embedding_map(h, w, landmarks)
    if features.shape[2] == 0:
        return emb
    return np.concatenate([features, emb], axis=-1)
