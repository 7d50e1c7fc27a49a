"""Toy-resolution generator and patch discriminator forwards.

FAEnc builds a two-level feature pyramid, MTM produces low- and high-res
makeup feature maps via full and windowed attention, and MADec applies them
multiplicatively and decodes back to image resolution. Weights are random
(seeded); the point is shape checking, determinism, and loss plumbing, not
image quality.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .algebra import MakeupFeatureMap
from .attention import AttentionParams, cross_attention, sow_attention
from .core import as_f64
from .errors import ConfigurationError, DimensionError
from .geometry import LandmarkSet

EPS_INSTANCE_NORM = 1e-5


def conv2d(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int = 1, pad: int = 0) -> np.ndarray:
    """2-D convolution (cross-correlation), zero padding, NHWC single image."""
    kh, kw, cin, _cout = w.shape
    if x.shape[2] != cin:
        raise DimensionError(f"input has {x.shape[2]} channels, kernel expects {cin}")
    xp = np.pad(x, ((pad, pad), (pad, pad), (0, 0)))
    win = sliding_window_view(xp, (kh, kw), axis=(0, 1))[::stride, ::stride]
    return np.einsum("ijckl,klco->ijo", win, w) + b


def instance_norm(x: np.ndarray, eps: float = EPS_INSTANCE_NORM) -> np.ndarray:
    mean = x.mean(axis=(0, 1), keepdims=True)
    var = x.var(axis=(0, 1), keepdims=True)
    return (x - mean) / np.sqrt(var + eps)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-x))


def upsample2(x: np.ndarray) -> np.ndarray:
    return x.repeat(2, axis=0).repeat(2, axis=1)


@dataclass(frozen=True)
class GeneratorConfig:
    """Toy generator layout. ``full_scale()`` gives the full-size preset."""

    input_res: int = 64
    widths: Tuple[int, int, int] = (16, 32, 64)
    high_factor: int = 4
    low_factor: int = 16
    window: int = 8
    num_landmarks: int = 17
    seed: int = 0

    def __post_init__(self):
        if self.high_res % self.window:
            raise ConfigurationError(
                f"window {self.window} must divide the high-res extent {self.high_res}"
            )
        if self.low_res < 4:
            raise ConfigurationError(f"low-res extent {self.low_res} must be >= 4")

    @property
    def high_res(self) -> int:
        return self.input_res // self.high_factor

    @property
    def low_res(self) -> int:
        return self.input_res // self.low_factor

    @property
    def feat_channels(self) -> int:
        return self.widths[2]

    @property
    def embed_dim(self) -> int:
        return 2 * self.num_landmarks

    @classmethod
    def full_scale(cls) -> "GeneratorConfig":
        # untested at desk scale; provided for reference only
        return cls(input_res=256, widths=(64, 128, 256), window=8)


@dataclass(frozen=True)
class DiscriminatorConfig:
    """Patch discriminator: stack of stride-2 k4 convolutions.

    With three stride-2 layers plus the stride-1 head the receptive field is
    4 + 2*3 + 4*3 + 8*3 = 46 pixels at stride 8.
    """

    widths: Tuple[int, int, int] = (16, 32, 64)
    kernel: int = 4
    seed: int = 0


def _param_specs(cfg: GeneratorConfig) -> List[Tuple[str, Tuple[int, ...]]]:
    w0, w1, w2 = cfg.widths
    c, e = cfg.feat_channels, cfg.embed_dim
    specs: List[Tuple[str, Tuple[int, ...]]] = []

    def conv(name, cin, cout, k=3):
        specs.append((f"{name}.w", (k, k, cin, cout)))
        specs.append((f"{name}.b", (cout,)))

    conv("enc.stem", 3, w0)
    conv("enc.down1", w0, w1)
    conv("enc.down2", w1, w2)
    conv("enc.res_h.c1", w2, w2)
    conv("enc.res_h.c2", w2, w2)
    conv("enc.down3", w2, w2)
    conv("enc.down4", w2, w2)
    for level in ("low", "high"):
        specs.append((f"mtm.{level}.q", (c + e, c)))
        specs.append((f"mtm.{level}.k", (c + e, c)))
        specs.append((f"mtm.{level}.v", (c, c)))
    conv("dec.up1", w2, w2)
    conv("dec.up2", w2, w2)
    conv("dec.fuse", 2 * w2, w2)
    conv("dec.up3", w2, w1)
    conv("dec.up4", w1, w0)
    conv("dec.out", w0, 3)
    return specs


def init_generator_weights(cfg: GeneratorConfig) -> Dict[str, np.ndarray]:
    rng = np.random.default_rng(cfg.seed)
    return {
        name: rng.uniform(-0.08, 0.08, shape) for name, shape in _param_specs(cfg)
    }


def save_weights(path, weights: Dict[str, np.ndarray]) -> None:
    """Flat binary of float64 values plus a JSON sidecar with names/shapes."""
    names = list(weights.keys())
    flat = np.concatenate([as_f64(weights[n]).ravel() for n in names])
    path = Path(path)
    flat.tofile(path)
    sidecar = [{"name": n, "shape": list(weights[n].shape)} for n in names]
    path.with_suffix(path.suffix + ".json").write_text(json.dumps(sidecar, indent=1))


def load_weights(path) -> Dict[str, np.ndarray]:
    path = Path(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    flat = np.fromfile(path, dtype=np.float64)
    out = {}
    off = 0
    for entry in sidecar:
        size = int(np.prod(entry["shape"])) if entry["shape"] else 1
        out[entry["name"]] = flat[off : off + size].reshape(entry["shape"])
        off += size
    if off != flat.size:
        raise DimensionError("weight file size does not match its sidecar")
    return out


def _down(x, weights, name):
    return relu(instance_norm(conv2d(x, weights[f"{name}.w"], weights[f"{name}.b"], stride=2, pad=1)))


def _up(x, weights, name):
    x = upsample2(x)
    return relu(instance_norm(conv2d(x, weights[f"{name}.w"], weights[f"{name}.b"], pad=1)))


def _res(x, weights, name):
    h = relu(instance_norm(conv2d(x, weights[f"{name}.c1.w"], weights[f"{name}.c1.b"], pad=1)))
    h = instance_norm(conv2d(h, weights[f"{name}.c2.w"], weights[f"{name}.c2.b"], pad=1))
    return x + h


def faenc_forward(image: np.ndarray, cfg: GeneratorConfig, weights) -> Tuple[np.ndarray, np.ndarray]:
    """Encode an image in [-1, 1] into (X_H, X_L) feature maps."""
    image = as_f64(image)
    if image.shape != (cfg.input_res, cfg.input_res, 3):
        raise ConfigurationError(
            f"image shape {image.shape} does not match config resolution {cfg.input_res}"
        )
    h = relu(instance_norm(conv2d(image, weights["enc.stem.w"], weights["enc.stem.b"], pad=1)))
    h = _down(h, weights, "enc.down1")
    h = _down(h, weights, "enc.down2")
    x_high = _res(h, weights, "enc.res_h")
    h = _down(x_high, weights, "enc.down3")
    x_low = _down(h, weights, "enc.down4")
    return x_high, x_low


def _attention_params(weights, level: str) -> AttentionParams:
    return AttentionParams(
        q=weights[f"mtm.{level}.q"], k=weights[f"mtm.{level}.k"], v=weights[f"mtm.{level}.v"]
    )


def mtm_forward(
    x_high, x_low, y_high, y_low,
    x_lm: LandmarkSet, y_lm: LandmarkSet,
    cfg: GeneratorConfig, weights,
) -> Tuple[MakeupFeatureMap, MakeupFeatureMap]:
    """Low-res full attention and high-res windowed attention."""
    lm_xh = x_lm.scaled(cfg.high_res, cfg.high_res)
    lm_yh = y_lm.scaled(cfg.high_res, cfg.high_res)
    lm_xl = x_lm.scaled(cfg.low_res, cfg.low_res)
    lm_yl = y_lm.scaled(cfg.low_res, cfg.low_res)
    gamma_low = cross_attention(x_low, y_low, lm_xl, lm_yl, _attention_params(weights, "low"))
    gamma_high = sow_attention(
        x_high, y_high, lm_xh, lm_yh, cfg.window, _attention_params(weights, "high")
    )
    return MakeupFeatureMap(gamma_high, "high"), MakeupFeatureMap(gamma_low, "low")


def madec_forward(
    x_high, x_low,
    gamma_high: MakeupFeatureMap, gamma_low: MakeupFeatureMap,
    cfg: GeneratorConfig, weights,
) -> np.ndarray:
    """Decode the makeup-applied features to an image in [-1, 1]."""
    h = gamma_low.data * x_low
    h = _up(h, weights, "dec.up1")
    h = _up(h, weights, "dec.up2")
    h = np.concatenate([h, gamma_high.data * x_high], axis=-1)
    h = relu(instance_norm(conv2d(h, weights["dec.fuse.w"], weights["dec.fuse.b"], pad=1)))
    h = _up(h, weights, "dec.up3")
    h = _up(h, weights, "dec.up4")
    out = conv2d(h, weights["dec.out.w"], weights["dec.out.b"], pad=1)
    return np.tanh(out)


def generator_forward(
    x_img: np.ndarray, y_img: np.ndarray,
    x_lm: LandmarkSet, y_lm: LandmarkSet,
    cfg: GeneratorConfig, weights,
) -> np.ndarray:
    """Full transfer forward; inputs uint8 RGB, output float in [-1, 1]."""
    x = to_unit_range(x_img)
    y = to_unit_range(y_img)
    x_high, x_low = faenc_forward(x, cfg, weights)
    y_high, y_low = faenc_forward(y, cfg, weights)
    gamma_high, gamma_low = mtm_forward(
        x_high, x_low, y_high, y_low, x_lm, y_lm, cfg, weights
    )
    return madec_forward(x_high, x_low, gamma_high, gamma_low, cfg, weights)


def to_unit_range(img: np.ndarray) -> np.ndarray:
    """uint8 [0, 255] -> float [-1, 1] (floats pass through unchanged)."""
    img = np.asarray(img)
    if img.dtype == np.uint8:
        return img.astype(np.float64) / 127.5 - 1.0
    return as_f64(img)


def from_unit_range(img: np.ndarray) -> np.ndarray:
    return np.clip(np.rint((as_f64(img) + 1.0) * 127.5), 0, 255).astype(np.uint8)


def init_discriminator_weights(cfg: DiscriminatorConfig) -> Dict[str, np.ndarray]:
    rng = np.random.default_rng(cfg.seed)
    w0, w1, w2 = cfg.widths
    k = cfg.kernel
    shapes = {
        "d.c1.w": (k, k, 3, w0), "d.c1.b": (w0,),
        "d.c2.w": (k, k, w0, w1), "d.c2.b": (w1,),
        "d.c3.w": (k, k, w1, w2), "d.c3.b": (w2,),
        "d.head.w": (k, k, w2, 1), "d.head.b": (1,),
    }
    return {n: rng.uniform(-0.08, 0.08, s) for n, s in shapes.items()}


def patch_discriminator_forward(image: np.ndarray, cfg: DiscriminatorConfig, weights) -> np.ndarray:
    """Per-patch realness scores in (0, 1), shape (h, w)."""
    x = to_unit_range(image)
    k = cfg.kernel
    min_res = 8 * 2  # three stride-2 layers plus the head need >= 16 px
    if x.shape[0] < min_res or x.shape[1] < min_res:
        raise ConfigurationError(f"input {x.shape[:2]} below the receptive field")
    h = relu(conv2d(x, weights["d.c1.w"], weights["d.c1.b"], stride=2, pad=1))
    h = relu(instance_norm(conv2d(h, weights["d.c2.w"], weights["d.c2.b"], stride=2, pad=1)))
    h = relu(instance_norm(conv2d(h, weights["d.c3.w"], weights["d.c3.b"], stride=2, pad=1)))
    score = conv2d(h, weights["d.head.w"], weights["d.head.b"], stride=1, pad=1)
    return sigmoid(score[..., 0])


@dataclass(frozen=True)
class SeededConvExtractor:
    """Deterministic 3-layer strided conv stack used as the default
    perceptual feature extractor (a stand-in for a pretrained backbone)."""

    channels: Tuple[int, int, int] = (8, 16, 32)
    seed: int = 7
    _weights: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        cin = 3
        for i, cout in enumerate(self.channels):
            self._weights[f"w{i}"] = rng.uniform(-0.08, 0.08, (3, 3, cin, cout))
            self._weights[f"b{i}"] = rng.uniform(-0.08, 0.08, (cout,))
            cin = cout

    def features(self, image: np.ndarray) -> np.ndarray:
        h = to_unit_range(image)
        for i in range(len(self.channels)):
            h = relu(conv2d(h, self._weights[f"w{i}"], self._weights[f"b{i}"], stride=2, pad=1))
        return h
