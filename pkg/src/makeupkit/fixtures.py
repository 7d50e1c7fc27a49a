"""Procedurally generated synthetic face fixtures.

Two 64x64 source/reference pairs with hand-placed 17-point landmarks and
disjoint skin / lip / eyeshadow masks. Everything is deterministic so the
repository ships no photographs and golden files stay byte-stable.

Landmark layout: 0-4 face outline, 5-8 left eye ring, 9-12 right eye ring,
13-16 lip (see :mod:`makeupkit.pgt`).
"""

import sys
from pathlib import Path

import numpy as np

from .geometry import LandmarkSet, save_landmarks
from .io_utils import save_image, save_mask

SIZE = 64


def _ellipse(xs, ys, center, radii):
    return ((xs - center[0]) / radii[0]) ** 2 + ((ys - center[1]) / radii[1]) ** 2 <= 1.0


def _face_spec(variant: str) -> dict:
    if variant == "a":
        return {
            "center": (32.0, 34.0), "radii": (20.0, 25.0),
            "eye_dx": 8.0, "eye_dy": -7.0, "eye_radii": (4.0, 2.4),
            "lip_dy": 13.0, "lip_radii": (7.0, 3.2),
        }
    return {
        "center": (30.0, 31.0), "radii": (22.0, 27.0),
        "eye_dx": 9.0, "eye_dy": -8.0, "eye_radii": (4.5, 2.6),
        "lip_dy": 15.0, "lip_radii": (8.0, 3.6),
    }


def _landmarks(spec: dict) -> np.ndarray:
    cx, cy = spec["center"]
    rx, ry = spec["radii"]
    pts = []
    for deg in (-90.0, -18.0, 54.0, 126.0, 198.0):  # face outline
        th = np.deg2rad(deg)
        pts.append((cx + 0.92 * rx * np.cos(th), cy + 0.92 * ry * np.sin(th)))
    for side in (-1.0, 1.0):  # eye rings, left then right
        ex, ey = cx + side * spec["eye_dx"], cy + spec["eye_dy"]
        erx, ery = spec["eye_radii"]
        pts += [(ex - erx, ey), (ex + erx, ey), (ex, ey - ery), (ex, ey + ery)]
    lx, ly = cx, cy + spec["lip_dy"]
    lrx, lry = spec["lip_radii"]
    pts += [(lx - lrx, ly), (lx + lrx, ly), (lx, ly - lry), (lx, ly + lry)]
    return np.array(pts)


def _synth(variant: str, with_makeup: bool, seed: int):
    spec = _face_spec(variant)
    cx, cy = spec["center"]
    xs, ys = np.meshgrid(np.arange(SIZE, dtype=np.float64), np.arange(SIZE, dtype=np.float64))

    face = _ellipse(xs, ys, spec["center"], spec["radii"])
    eyes = np.zeros_like(face)
    rings = np.zeros_like(face)
    for side in (-1.0, 1.0):
        center = (cx + side * spec["eye_dx"], cy + spec["eye_dy"])
        erx, ery = spec["eye_radii"]
        eye = _ellipse(xs, ys, center, (erx, ery))
        ring = _ellipse(xs, ys, center, (erx + 2.5, ery + 2.5)) & ~eye
        eyes |= eye
        rings |= ring
    lip = _ellipse(xs, ys, (cx, cy + spec["lip_dy"]), spec["lip_radii"])
    rings &= face & ~lip
    skin = face & ~eyes & ~rings & ~lip

    img = np.zeros((SIZE, SIZE, 3), dtype=np.float64)
    img[...] = (40.0 + ys * 0.6)[:, :, None]  # background gradient
    skin_color = (228, 160, 150) if with_makeup else (224, 172, 140)
    lip_color = (205, 40, 70) if with_makeup else (180, 122, 118)
    ring_color = (150, 60, 160) if with_makeup else skin_color
    img[face] = skin_color
    img[rings] = ring_color
    img[eyes] = (235, 235, 235)
    for side in (-1.0, 1.0):
        pupil = _ellipse(xs, ys, (cx + side * spec["eye_dx"], cy + spec["eye_dy"]), (1.4, 1.4))
        img[pupil] = (45, 35, 30)
    img[lip] = lip_color

    rng = np.random.default_rng(seed)
    noise = rng.uniform(-8.0, 8.0, img.shape)
    img[face] += noise[face]
    img = np.clip(np.rint(img), 0, 255).astype(np.uint8)

    masks = {
        "skin": skin.astype(np.float64),
        "lip": lip.astype(np.float64),
        "eyeshadow": rings.astype(np.float64),
    }
    return img, _landmarks(spec), masks


def generate_fixtures(outdir) -> None:
    outdir = Path(outdir)
    pairs = {
        "pair1": {"src": ("a", False, 11), "ref": ("b", True, 12)},
        "pair2": {"src": ("b", False, 21), "ref": ("a", True, 22)},
    }
    for pair, roles in pairs.items():
        pdir = outdir / pair
        pdir.mkdir(parents=True, exist_ok=True)
        for role, (variant, makeup, seed) in roles.items():
            img, pts, masks = _synth(variant, makeup, seed)
            save_image(pdir / f"{role}.png", img)
            save_landmarks(pdir / f"{role}_landmarks.json", LandmarkSet(pts, SIZE, SIZE))
            mdir = pdir / f"{role}_masks"
            mdir.mkdir(exist_ok=True)
            for name, mask in masks.items():
                save_mask(mdir / f"{name}.png", mask)


if __name__ == "__main__":
    generate_fixtures(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
