"""Hot per-pixel kernels: bilinear grid sampling forward and backward.

Two interchangeable implementations exist for each kernel: a numba-compiled
loop version and a vectorized numpy version. Both evaluate the interpolation
with the same expression tree so results agree bit-for-bit. The active one is
chosen at import time by :mod:`makeupkit.backend`.
"""

import numpy as np

from .backend import HAS_NUMBA, njit


def _clamp_split(coord, limit):
    """Clamp to [0, limit-1] and split into floor index + fraction."""
    c = np.minimum(np.maximum(coord, 0.0), float(limit - 1))
    i0 = np.floor(c).astype(np.int64)
    i0 = np.minimum(i0, limit - 2) if limit > 1 else np.zeros_like(i0)
    f = c - i0
    return i0, f


def bilinear_forward_np(image: np.ndarray, grid: np.ndarray) -> np.ndarray:
    H, W, _ = image.shape
    gx = grid[..., 0]
    gy = grid[..., 1]
    if W > 1:
        x0, fx = _clamp_split(gx, W)
    else:
        x0, fx = np.zeros(gx.shape, np.int64), np.zeros_like(gx)
    if H > 1:
        y0, fy = _clamp_split(gy, H)
    else:
        y0, fy = np.zeros(gy.shape, np.int64), np.zeros_like(gy)
    x1 = np.minimum(x0 + 1, W - 1)
    y1 = np.minimum(y0 + 1, H - 1)
    fx = fx[..., None]
    fy = fy[..., None]
    v00 = image[y0, x0]
    v01 = image[y0, x1]
    v10 = image[y1, x0]
    v11 = image[y1, x1]
    top = (1.0 - fx) * v00 + fx * v01
    bot = (1.0 - fx) * v10 + fx * v11
    return (1.0 - fy) * top + fy * bot


def bilinear_vjp_image_np(image_shape, grid: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
    H, W, C = image_shape
    gx = grid[..., 0]
    gy = grid[..., 1]
    if W > 1:
        x0, fx = _clamp_split(gx, W)
    else:
        x0, fx = np.zeros(gx.shape, np.int64), np.zeros_like(gx)
    if H > 1:
        y0, fy = _clamp_split(gy, H)
    else:
        y0, fy = np.zeros(gy.shape, np.int64), np.zeros_like(gy)
    x1 = np.minimum(x0 + 1, W - 1)
    y1 = np.minimum(y0 + 1, H - 1)
    grad = np.zeros((H, W, C), dtype=np.float64)
    w00 = ((1.0 - fy) * (1.0 - fx))[..., None] * cotangent
    w01 = ((1.0 - fy) * fx)[..., None] * cotangent
    w10 = (fy * (1.0 - fx))[..., None] * cotangent
    w11 = (fy * fx)[..., None] * cotangent
    np.add.at(grad, (y0, x0), w00)
    np.add.at(grad, (y0, x1), w01)
    np.add.at(grad, (y1, x0), w10)
    np.add.at(grad, (y1, x1), w11)
    return grad


@njit(cache=True)
def _bilinear_forward_nb(image, grid, out):  # pragma: no cover - jitted
    H, W, C = image.shape
    h, w = grid.shape[0], grid.shape[1]
    for i in range(h):
        for j in range(w):
            gx = grid[i, j, 0]
            gy = grid[i, j, 1]
            if gx < 0.0:
                gx = 0.0
            if gx > W - 1:
                gx = float(W - 1)
            if gy < 0.0:
                gy = 0.0
            if gy > H - 1:
                gy = float(H - 1)
            x0 = int(np.floor(gx))
            y0 = int(np.floor(gy))
            if x0 > W - 2:
                x0 = max(W - 2, 0)
            if y0 > H - 2:
                y0 = max(H - 2, 0)
            fx = gx - x0
            fy = gy - y0
            x1 = min(x0 + 1, W - 1)
            y1 = min(y0 + 1, H - 1)
            for c in range(C):
                top = (1.0 - fx) * image[y0, x0, c] + fx * image[y0, x1, c]
                bot = (1.0 - fx) * image[y1, x0, c] + fx * image[y1, x1, c]
                out[i, j, c] = (1.0 - fy) * top + fy * bot


@njit(cache=True)
def _bilinear_vjp_nb(grid, cotangent, grad):  # pragma: no cover - jitted
    # one pass per interpolation corner, in the same order the numpy
    # version's np.add.at calls run, so colliding grid points accumulate
    # in an identical order and the two backends agree bit-for-bit
    H, W, _ = grad.shape
    h, w, C = cotangent.shape
    for corner in range(4):
        for i in range(h):
            for j in range(w):
                gx = grid[i, j, 0]
                gy = grid[i, j, 1]
                if gx < 0.0:
                    gx = 0.0
                if gx > W - 1:
                    gx = float(W - 1)
                if gy < 0.0:
                    gy = 0.0
                if gy > H - 1:
                    gy = float(H - 1)
                x0 = int(np.floor(gx))
                y0 = int(np.floor(gy))
                if x0 > W - 2:
                    x0 = max(W - 2, 0)
                if y0 > H - 2:
                    y0 = max(H - 2, 0)
                fx = gx - x0
                fy = gy - y0
                x1 = min(x0 + 1, W - 1)
                y1 = min(y0 + 1, H - 1)
                if corner == 0:
                    ty, tx, wgt = y0, x0, (1.0 - fy) * (1.0 - fx)
                elif corner == 1:
                    ty, tx, wgt = y0, x1, (1.0 - fy) * fx
                elif corner == 2:
                    ty, tx, wgt = y1, x0, fy * (1.0 - fx)
                else:
                    ty, tx, wgt = y1, x1, fy * fx
                for c in range(C):
                    grad[ty, tx, c] += wgt * cotangent[i, j, c]


def bilinear_forward_nb(image: np.ndarray, grid: np.ndarray) -> np.ndarray:
    out = np.empty(grid.shape[:2] + (image.shape[2],), dtype=np.float64)
    _bilinear_forward_nb(
        np.ascontiguousarray(image, np.float64),
        np.ascontiguousarray(grid, np.float64),
        out,
    )
    return out


def bilinear_vjp_image_nb(image_shape, grid: np.ndarray, cotangent: np.ndarray) -> np.ndarray:
    grad = np.zeros(image_shape, dtype=np.float64)
    _bilinear_vjp_nb(
        np.ascontiguousarray(grid, np.float64),
        np.ascontiguousarray(cotangent, np.float64),
        grad,
    )
    return grad


if HAS_NUMBA:
    bilinear_forward = bilinear_forward_nb
    bilinear_vjp_image = bilinear_vjp_image_nb
else:
    bilinear_forward = bilinear_forward_np
    bilinear_vjp_image = bilinear_vjp_image_np
