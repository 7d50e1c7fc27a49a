"""The numba and numpy bilinear kernels must agree bit-for-bit, and the
environment flag must select the numpy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

from makeupkit import kernels
from makeupkit.backend import HAS_NUMBA, backend_name


def random_case(seed, h=9, w=7, c=3, oh=6, ow=5):
    rng = np.random.default_rng(seed)
    image = rng.normal(size=(h, w, c))
    grid = np.stack(
        [rng.uniform(-1.0, w + 1.0, (oh, ow)), rng.uniform(-1.0, h + 1.0, (oh, ow))],
        axis=-1,
    )
    cot = rng.normal(size=(oh, ow, c))
    return image, grid, cot


@pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")
class TestBackendParity:
    @pytest.mark.parametrize("seed", range(4))
    def test_forward_bit_identical(self, seed):
        image, grid, _ = random_case(seed)
        a = kernels.bilinear_forward_np(image, grid)
        b = kernels.bilinear_forward_nb(image, grid)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("seed", range(4))
    def test_vjp_bit_identical(self, seed):
        image, grid, cot = random_case(100 + seed)
        a = kernels.bilinear_vjp_image_np(image.shape, grid, cot)
        b = kernels.bilinear_vjp_image_nb(image.shape, grid, cot)
        assert np.array_equal(a, b)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, MAKEUPKIT_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c",
         "from makeupkit.backend import backend_name; print(backend_name())"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_backend_name_reports_active():
    assert backend_name() in ("numba", "numpy")
    if HAS_NUMBA and not os.environ.get("MAKEUPKIT_DISABLE_NUMBA"):
        assert backend_name() == "numba"
