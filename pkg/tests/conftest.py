import pathlib

import numpy as np
import pytest

from makeupkit.geometry import LandmarkSet, load_landmarks
from makeupkit.io_utils import load_image, load_mask
from makeupkit.pgt import RegionMasks

REPO = pathlib.Path(__file__).resolve().parents[1]
FIXTURES = REPO / "fixtures"
GOLDEN = pathlib.Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def fixtures_dir():
    assert FIXTURES.exists(), "run scripts/make_goldens.py to regenerate fixtures"
    return FIXTURES


@pytest.fixture(scope="session")
def pair1(fixtures_dir):
    return load_pair(fixtures_dir / "pair1")


@pytest.fixture(scope="session")
def pair2(fixtures_dir):
    return load_pair(fixtures_dir / "pair2")


def load_pair(pdir):
    out = {}
    for role in ("src", "ref"):
        img = load_image(pdir / f"{role}.png")
        h, w = img.shape[:2]
        out[role] = {
            "image": img,
            "landmarks": load_landmarks(pdir / f"{role}_landmarks.json", w, h),
            "masks": RegionMasks(
                **{
                    n: load_mask(pdir / f"{role}_masks" / f"{n}.png")
                    for n in ("skin", "lip", "eyeshadow")
                }
            ),
        }
    return out


def random_landmarks(rng, n, width, height) -> LandmarkSet:
    pts = np.stack(
        [rng.uniform(0.5, width - 0.6, n), rng.uniform(0.5, height - 0.6, n)], axis=1
    )
    return LandmarkSet(pts, width, height)
