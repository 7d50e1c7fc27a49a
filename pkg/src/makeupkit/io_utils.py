"""PNG image and mask file I/O.

Rasters are 8-bit RGB PNGs; masks are 8-bit single-channel PNGs thresholded
at 128 on load (0 = outside, 255 = inside).
"""

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionError


def load_image(path) -> np.ndarray:
    img = Image.open(path).convert("RGB")
    return np.asarray(img, dtype=np.uint8)


def save_image(path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.dtype != np.uint8 or image.ndim != 3 or image.shape[2] != 3:
        raise DimensionError("expected an 8-bit RGB array")
    Image.fromarray(image, mode="RGB").save(path, format="PNG")


def load_mask(path) -> np.ndarray:
    """Binary {0.0, 1.0} mask from an 8-bit single-channel PNG."""
    img = Image.open(path).convert("L")
    return (np.asarray(img) >= 128).astype(np.float64)


def save_mask(path, mask: np.ndarray) -> None:
    arr = (np.asarray(mask) > 0.5).astype(np.uint8) * 255
    Image.fromarray(arr, mode="L").save(path, format="PNG")


def mask_dir_paths(directory) -> dict:
    d = Path(directory)
    return {name: d / f"{name}.png" for name in ("skin", "lip", "eyeshadow")}
