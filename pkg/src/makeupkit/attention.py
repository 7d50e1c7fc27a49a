"""QKV cross-attention over landmark-embedded feature maps and the
shifted-overlapped-window (sow) variant with bilinear aggregation.

Both forwards route their score and value matrix products through a MAC
counter so the complexity claim (full vs. windowed cost) can be checked
against the closed-form counts from :func:`attention_cost`.

Window weights use per-axis absolute distances to the window center,
``W = (S - 2|dx|)(S - 2|dy|) / S^2``; with edge-replicated half-window
padding for the shifted schemes the four weights sum to exactly 1 at every
pixel.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import as_f64, softmax_rows, softmax_rows_vjp
from .errors import ConfigurationError, ContractViolationError, DimensionError
from .geometry import (
    LandmarkSet,
    bilinear_sample,
    bilinear_sample_vjp_image,
    embed_map,
    make_grid,
    tps_solve,
)

# window partition schemes: (x offset, y offset) in units of S/2
SCHEME_OFFSETS = ((0, 0), (1, 0), (0, 1), (1, 1))


class MacCounter:
    """Multiply-accumulate tallies for the attention matrix products."""

    def __init__(self):
        self.reset()

    def reset(self):
        self.score = 0
        self.value = 0
        self.projection = 0


_MACS = MacCounter()


def reset_macs() -> None:
    _MACS.reset()


def macs() -> dict:
    return {"score": _MACS.score, "value": _MACS.value, "projection": _MACS.projection}


def _mm(a: np.ndarray, b: np.ndarray, kind: str) -> np.ndarray:
    out = a @ b
    n = a.shape[0] * a.shape[1] * b.shape[1]
    setattr(_MACS, kind, getattr(_MACS, kind) + n)
    return out


@dataclass(frozen=True)
class AttentionParams:
    """Shared QKV projection weights.

    ``q`` and ``k`` act on embedded features (C + 2N columns); ``v`` acts on
    the raw C-channel reference features.
    """

    q: np.ndarray  # (C + 2N, C)
    k: np.ndarray  # (C + 2N, C)
    v: np.ndarray  # (C, C)

    def __post_init__(self):
        q, k, v = as_f64(self.q), as_f64(self.k), as_f64(self.v)
        if q.shape != k.shape:
            raise DimensionError("Q and K must share shape")
        if v.shape[0] != v.shape[1] or v.shape[1] != q.shape[1]:
            raise DimensionError("V must be square over the channel count")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "v", v)

    @property
    def channels(self) -> int:
        return self.v.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.q.shape[0] - self.channels

    @classmethod
    def random(cls, channels: int, embed_dim: int, seed: int = 0, scale: float = 0.1):
        rng = np.random.default_rng(seed)
        return cls(
            q=rng.uniform(-scale, scale, (channels + embed_dim, channels)),
            k=rng.uniform(-scale, scale, (channels + embed_dim, channels)),
            v=rng.uniform(-scale, scale, (channels, channels)),
        )


def _check_maps(x_feat, y_feat, params):
    x_feat = as_f64(x_feat)
    y_feat = as_f64(y_feat)
    if x_feat.shape != y_feat.shape:
        raise DimensionError(f"feature maps differ: {x_feat.shape} vs {y_feat.shape}")
    c = x_feat.shape[2]
    if c != params.channels:
        raise DimensionError(f"params expect C={params.channels}, maps have C={c}")
    return x_feat, y_feat


def _cross_attention_core(xt, yt, y_flat, params):
    """Shared forward on flattened embedded maps; returns intermediates."""
    c = params.channels
    xq = _mm(xt, params.q, "projection")
    yk = _mm(yt, params.k, "projection")
    yv = _mm(y_flat, params.v, "projection")
    scores = _mm(xq, yk.T, "score") / math.sqrt(c)
    attn = softmax_rows(scores)
    gamma = _mm(attn, yv, "value")
    return gamma, attn, xq, yk, yv


def cross_attention(
    x_feat: np.ndarray,
    y_feat: np.ndarray,
    x_lm: LandmarkSet,
    y_lm: LandmarkSet,
    params: AttentionParams,
) -> np.ndarray:
    """Full pixel-wise cross-attention; returns the makeup feature map (H, W, C)."""
    x_feat, y_feat = _check_maps(x_feat, y_feat, params)
    h, w, c = x_feat.shape
    xt = embed_map(x_feat, x_lm).reshape(h * w, -1)
    yt = embed_map(y_feat, y_lm).reshape(h * w, -1)
    if xt.shape[1] != params.q.shape[0]:
        raise DimensionError(
            f"embedded width {xt.shape[1]} does not match Q rows {params.q.shape[0]}"
        )
    gamma, *_ = _cross_attention_core(xt, yt, y_feat.reshape(h * w, c), params)
    return gamma.reshape(h, w, c)


def cross_attention_vjp(
    x_feat: np.ndarray,
    y_feat: np.ndarray,
    x_lm: LandmarkSet,
    y_lm: LandmarkSet,
    params: AttentionParams,
    cotangent: np.ndarray,
) -> dict:
    """Gradients of cross_attention w.r.t. x_feat, y_feat, q, k, v."""
    x_feat, y_feat = _check_maps(x_feat, y_feat, params)
    h, w, c = x_feat.shape
    xt = embed_map(x_feat, x_lm).reshape(h * w, -1)
    yt = embed_map(y_feat, y_lm).reshape(h * w, -1)
    y_flat = y_feat.reshape(h * w, c)
    _, attn, xq, yk, yv = _cross_attention_core(xt, yt, y_flat, params)

    gbar = as_f64(cotangent).reshape(h * w, c)
    attn_bar = gbar @ yv.T
    yv_bar = attn.T @ gbar
    s_bar = softmax_rows_vjp(attn, attn_bar) / math.sqrt(c)
    xq_bar = s_bar @ yk
    yk_bar = s_bar.T @ xq

    q_bar = xt.T @ xq_bar
    k_bar = yt.T @ yk_bar
    v_bar = y_flat.T @ yv_bar
    xt_bar = xq_bar @ params.q.T
    yt_bar = yk_bar @ params.k.T
    x_bar = xt_bar[:, :c].reshape(h, w, c)
    y_bar = (yt_bar[:, :c] + yv_bar @ params.v.T).reshape(h, w, c)
    return {"x_feat": x_bar, "y_feat": y_bar, "q": q_bar, "k": k_bar, "v": v_bar}


def sow_weight(pixel, window_center, window_size: int) -> float:
    """Bilinear aggregation weight of a pixel w.r.t. one window center."""
    s = float(window_size)
    dx = abs(float(pixel[0]) - float(window_center[0]))
    dy = abs(float(pixel[1]) - float(window_center[1]))
    if dx > s / 2 or dy > s / 2:
        raise ContractViolationError("pixel lies outside the window")
    return (s - 2.0 * dx) * (s - 2.0 * dy) / (s * s)


def _check_window(h: int, w: int, window_size: int) -> None:
    if window_size <= 0 or window_size % 2 != 0:
        raise ConfigurationError(f"window size must be a positive even number, got {window_size}")
    if h % window_size or w % window_size:
        raise ConfigurationError(
            f"window size {window_size} must divide the extents ({h}, {w})"
        )


def _window_starts(extent: int, window_size: int, shifted: int):
    if shifted:
        return range(-window_size // 2, extent, window_size)
    return range(0, extent, window_size)


def _windows(h: int, w: int, window_size: int):
    """Yield (scheme_index, sy, sx, key_idx, q_idx, weights) per window.

    ``key_idx`` flat-indexes the full S x S window with edge replication;
    ``q_idx`` flat-indexes the real (in-bounds) query pixels; ``weights``
    are their aggregation weights.
    """
    s = window_size
    for j, (ox, oy) in enumerate(SCHEME_OFFSETS):
        for sy in _window_starts(h, s, oy):
            rows = np.clip(np.arange(sy, sy + s), 0, h - 1)
            r0, r1 = max(sy, 0), min(sy + s, h)
            for sx in _window_starts(w, s, ox):
                cols = np.clip(np.arange(sx, sx + s), 0, w - 1)
                c0, c1 = max(sx, 0), min(sx + s, w)
                key_idx = (rows[:, None] * w + cols[None, :]).ravel()
                qr = np.arange(r0, r1)
                qc = np.arange(c0, c1)
                q_idx = (qr[:, None] * w + qc[None, :]).ravel()
                cx = sx + (s - 1) / 2.0
                cy = sy + (s - 1) / 2.0
                wx = (s - 2.0 * np.abs(qc - cx)) / s
                wy = (s - 2.0 * np.abs(qr - cy)) / s
                weights = (wy[:, None] * wx[None, :]).ravel()
                yield j, key_idx, q_idx, weights


def aggregation_weights(h: int, w: int, window_size: int) -> np.ndarray:
    """Per-scheme aggregation weight of each pixel, shape (4, H, W)."""
    _check_window(h, w, window_size)
    out = np.zeros((4, h * w))
    for j, _key_idx, q_idx, weights in _windows(h, w, window_size):
        out[j, q_idx] = weights
    return out.reshape(4, h, w)


def _sow_prepare(x_feat, y_feat, x_lm, y_lm, window_size, params):
    x_feat, y_feat = _check_maps(x_feat, y_feat, params)
    h, w, c = x_feat.shape
    _check_window(h, w, window_size)
    # coarse alignment: warp the reference map into the source frame
    transform = tps_solve(x_lm, y_lm)
    grid = make_grid(transform, h, w)
    y_warp = bilinear_sample(y_feat, grid)
    xt = embed_map(x_feat, x_lm).reshape(h * w, -1)
    # after alignment the warped map lives in the source frame, so it is
    # embedded with the source landmarks
    yt = embed_map(y_warp, x_lm).reshape(h * w, -1)
    return x_feat, y_feat, y_warp, grid, xt, yt


def sow_attention(
    x_feat: np.ndarray,
    y_feat: np.ndarray,
    x_lm: LandmarkSet,
    y_lm: LandmarkSet,
    window_size: int,
    params: AttentionParams,
) -> np.ndarray:
    """Windowed cross-attention in four shifted overlapped schemes."""
    x_feat, _y, y_warp, _grid, xt, yt = _sow_prepare(
        x_feat, y_feat, x_lm, y_lm, window_size, params
    )
    h, w, c = x_feat.shape
    y_flat = y_warp.reshape(h * w, c)
    sqrt_c = math.sqrt(c)

    xq = _mm(xt, params.q, "projection")
    yk = _mm(yt, params.k, "projection")
    yv = _mm(y_flat, params.v, "projection")

    gamma = np.zeros((h * w, c))
    for _j, key_idx, q_idx, weights in _windows(h, w, window_size):
        scores = _mm(xq[q_idx], yk[key_idx].T, "score") / sqrt_c
        attn = softmax_rows(scores)
        out = _mm(attn, yv[key_idx], "value")
        gamma[q_idx] += out * weights[:, None]
    return gamma.reshape(h, w, c)


def sow_attention_vjp(
    x_feat: np.ndarray,
    y_feat: np.ndarray,
    x_lm: LandmarkSet,
    y_lm: LandmarkSet,
    window_size: int,
    params: AttentionParams,
    cotangent: np.ndarray,
) -> dict:
    """Gradients of sow_attention w.r.t. x_feat and y_feat."""
    x_feat, y_feat, y_warp, grid, xt, yt = _sow_prepare(
        x_feat, y_feat, x_lm, y_lm, window_size, params
    )
    h, w, c = x_feat.shape
    y_flat = y_warp.reshape(h * w, c)
    sqrt_c = math.sqrt(c)

    xq = xt @ params.q
    yk = yt @ params.k
    yv = y_flat @ params.v

    gbar = as_f64(cotangent).reshape(h * w, c)
    xq_bar = np.zeros_like(xq)
    yk_bar = np.zeros_like(yk)
    yv_bar = np.zeros_like(yv)
    for _j, key_idx, q_idx, weights in _windows(h, w, window_size):
        out_bar = gbar[q_idx] * weights[:, None]
        scores = (xq[q_idx] @ yk[key_idx].T) / sqrt_c
        attn = softmax_rows(scores)
        attn_bar = out_bar @ yv[key_idx].T
        np.add.at(yv_bar, key_idx, attn.T @ out_bar)
        s_bar = softmax_rows_vjp(attn, attn_bar) / sqrt_c
        xq_bar[q_idx] += s_bar @ yk[key_idx]
        np.add.at(yk_bar, key_idx, s_bar.T @ xq[q_idx])

    x_bar = (xq_bar @ params.q.T)[:, :c].reshape(h, w, c)
    ywarp_bar = ((yk_bar @ params.k.T)[:, :c] + yv_bar @ params.v.T).reshape(h, w, c)
    y_bar = bilinear_sample_vjp_image(y_feat.shape, grid, ywarp_bar)
    return {"x_feat": x_bar, "y_feat": y_bar}


@dataclass(frozen=True)
class CostReport:
    """Exact multiply-accumulate counts of the attention matrix products."""

    score_macs: int
    value_macs: int

    @property
    def total(self) -> int:
        return self.score_macs + self.value_macs


def attention_cost(
    height: int,
    width: int,
    channels: int,
    embed: int,
    window_size: Optional[int] = None,
    schemes: int = 4,
) -> CostReport:
    """Closed-form MAC counts for the score and value products.

    ``window_size=None`` means full pixel-wise attention. For windowed
    attention each real pixel attends to one S x S window per scheme, so both
    products cost ``schemes * HW * S^2 * C``.
    """
    if height <= 0 or width <= 0 or channels <= 0:
        raise ConfigurationError("extents and channels must be positive")
    hw = height * width
    if window_size is None:
        per = hw * hw * channels
        return CostReport(score_macs=per, value_macs=per)
    per = schemes * hw * window_size * window_size * channels
    return CostReport(score_macs=per, value_macs=per)
