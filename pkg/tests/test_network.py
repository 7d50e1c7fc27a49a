import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from makeupkit.algebra import MakeupFeatureMap
from makeupkit.errors import ConfigurationError
from makeupkit.network import (
    DiscriminatorConfig,
    GeneratorConfig,
    conv2d,
    faenc_forward,
    from_unit_range,
    generator_forward,
    init_discriminator_weights,
    init_generator_weights,
    instance_norm,
    load_weights,
    madec_forward,
    mtm_forward,
    patch_discriminator_forward,
    save_weights,
    to_unit_range,
)


@pytest.fixture(scope="module")
def cfg():
    return GeneratorConfig()


@pytest.fixture(scope="module")
def weights(cfg):
    return init_generator_weights(cfg)


@pytest.fixture(scope="module")
def encoded(pair1, cfg, weights):
    x = to_unit_range(pair1["src"]["image"])
    y = to_unit_range(pair1["ref"]["image"])
    return faenc_forward(x, cfg, weights), faenc_forward(y, cfg, weights)


class TestConfig:
    def test_resolutions(self, cfg):
        assert cfg.high_res == 16
        assert cfg.low_res == 4
        assert cfg.embed_dim == 34

    def test_window_must_divide(self):
        with pytest.raises(ConfigurationError):
            GeneratorConfig(input_res=48, high_factor=4, window=8)  # 12 % 8

    def test_low_res_floor(self):
        with pytest.raises(ConfigurationError):
            GeneratorConfig(input_res=32, low_factor=16)

    def test_full_scale_preset(self):
        big = GeneratorConfig.full_scale()
        assert big.input_res == 256
        assert big.high_res == 64
        assert big.low_res == 16

    @given(
        res_exp=st.integers(6, 8),
        high_exp=st.integers(1, 3),
        window_exp=st.integers(1, 2),
    )
    @settings(max_examples=20, deadline=None)
    def test_resolution_arithmetic(self, res_exp, high_exp, window_exp):
        res = 2 ** res_exp
        cfg = GeneratorConfig(
            input_res=res, high_factor=2 ** high_exp, window=2 ** window_exp
        )
        assert cfg.high_res * cfg.high_factor == res
        assert cfg.low_res * cfg.low_factor == res
        assert cfg.high_res % cfg.window == 0


class TestBuildingBlocks:
    def test_conv_shapes(self):
        x = np.zeros((8, 8, 3))
        w = np.zeros((3, 3, 3, 5))
        b = np.zeros(5)
        assert conv2d(x, w, b, pad=1).shape == (8, 8, 5)
        assert conv2d(x, w, b, stride=2, pad=1).shape == (4, 4, 5)

    def test_conv_identity_kernel(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(6, 6, 2))
        w = np.zeros((3, 3, 2, 2))
        w[1, 1, 0, 0] = 1.0
        w[1, 1, 1, 1] = 1.0
        out = conv2d(x, w, np.zeros(2), pad=1)
        assert np.allclose(out, x, atol=1e-12)

    def test_instance_norm_stats(self):
        rng = np.random.default_rng(1)
        x = rng.normal(3.0, 2.0, size=(16, 16, 4))
        out = instance_norm(x)
        assert np.allclose(out.mean(axis=(0, 1)), 0.0, atol=1e-10)
        assert np.allclose(out.var(axis=(0, 1)), 1.0, atol=1e-3)

    def test_instance_norm_zero_input_finite(self):
        out = instance_norm(np.zeros((8, 8, 3)))
        assert np.all(np.isfinite(out))
        assert np.all(out == 0.0)

    def test_unit_range_round_trip(self):
        img = np.arange(256, dtype=np.uint8).reshape(16, 16)[..., None].repeat(3, -1)
        assert np.array_equal(from_unit_range(to_unit_range(img)), img)


class TestFaenc:
    def test_shapes(self, encoded, cfg):
        (x_high, x_low), _ = encoded
        assert x_high.shape == (16, 16, cfg.feat_channels)
        assert x_low.shape == (4, 4, cfg.feat_channels)

    def test_determinism(self, pair1, cfg, weights):
        x = to_unit_range(pair1["src"]["image"])
        a_high, a_low = faenc_forward(x, cfg, weights)
        b_high, b_low = faenc_forward(x, cfg, weights)
        assert np.array_equal(a_high, b_high)
        assert np.array_equal(a_low, b_low)

    def test_zero_input_finite(self, cfg, weights):
        x_high, x_low = faenc_forward(np.zeros((64, 64, 3)), cfg, weights)
        assert np.all(np.isfinite(x_high)) and np.all(np.isfinite(x_low))

    def test_resolution_mismatch(self, cfg, weights):
        with pytest.raises(ConfigurationError):
            faenc_forward(np.zeros((32, 32, 3)), cfg, weights)


class TestMtm:
    def test_shapes(self, encoded, pair1, cfg, weights):
        (x_high, x_low), (y_high, y_low) = encoded
        g_high, g_low = mtm_forward(
            x_high, x_low, y_high, y_low,
            pair1["src"]["landmarks"], pair1["ref"]["landmarks"], cfg, weights,
        )
        assert g_high.data.shape == x_high.shape and g_high.resolution == "high"
        assert g_low.data.shape == x_low.shape and g_low.resolution == "low"

    def test_constant_reference(self, encoded, pair1, cfg, weights):
        (x_high, x_low), _ = encoded
        v_high = np.tile([0.3] * cfg.feat_channels, (16, 16, 1))
        v_low = np.tile([0.3] * cfg.feat_channels, (4, 4, 1))
        lm = pair1["src"]["landmarks"]
        g_high, g_low = mtm_forward(x_high, x_low, v_high, v_low, lm, lm, cfg, weights)
        for g in (g_high.data, g_low.data):
            spread = g.max(axis=(0, 1)) - g.min(axis=(0, 1))
            assert np.max(spread) < 1e-10


class TestMadec:
    def test_output_shape_and_range(self, encoded, pair1, cfg, weights):
        (x_high, x_low), (y_high, y_low) = encoded
        g_high, g_low = mtm_forward(
            x_high, x_low, y_high, y_low,
            pair1["src"]["landmarks"], pair1["ref"]["landmarks"], cfg, weights,
        )
        out = madec_forward(x_high, x_low, g_high, g_low, cfg, weights)
        assert out.shape == (64, 64, 3)
        assert np.all(out >= -1.0) and np.all(out <= 1.0)

    def test_gamma_sensitivity(self, encoded, pair1, cfg, weights):
        (x_high, x_low), (y_high, y_low) = encoded
        g_high, g_low = mtm_forward(
            x_high, x_low, y_high, y_low,
            pair1["src"]["landmarks"], pair1["ref"]["landmarks"], cfg, weights,
        )
        with_ref = madec_forward(x_high, x_low, g_high, g_low, cfg, weights)
        ones_high = MakeupFeatureMap(np.ones_like(x_high), "high")
        ones_low = MakeupFeatureMap(np.ones_like(x_low), "low")
        plain = madec_forward(x_high, x_low, ones_high, ones_low, cfg, weights)
        assert not np.array_equal(with_ref, plain)


class TestGeneratorForward:
    def test_pipeline_equals_manual_composition(self, pair1, cfg, weights):
        x_img, y_img = pair1["src"]["image"], pair1["ref"]["image"]
        x_lm, y_lm = pair1["src"]["landmarks"], pair1["ref"]["landmarks"]
        full = generator_forward(x_img, y_img, x_lm, y_lm, cfg, weights)
        x_high, x_low = faenc_forward(to_unit_range(x_img), cfg, weights)
        y_high, y_low = faenc_forward(to_unit_range(y_img), cfg, weights)
        g_high, g_low = mtm_forward(x_high, x_low, y_high, y_low, x_lm, y_lm, cfg, weights)
        manual = madec_forward(x_high, x_low, g_high, g_low, cfg, weights)
        assert np.array_equal(full, manual)

    def test_determinism(self, pair1, cfg, weights):
        x_img, y_img = pair1["src"]["image"], pair1["ref"]["image"]
        x_lm, y_lm = pair1["src"]["landmarks"], pair1["ref"]["landmarks"]
        a = generator_forward(x_img, y_img, x_lm, y_lm, cfg, weights)
        b = generator_forward(x_img, y_img, x_lm, y_lm, cfg, weights)
        assert np.array_equal(a, b)


class TestWeightsIO:
    def test_round_trip(self, cfg, weights, tmp_path):
        path = tmp_path / "gen.bin"
        save_weights(path, weights)
        loaded = load_weights(path)
        assert set(loaded) == set(weights)
        for name in weights:
            assert np.array_equal(loaded[name], weights[name])


class TestDiscriminator:
    def test_shape_and_range(self, pair1):
        cfg = DiscriminatorConfig()
        w = init_discriminator_weights(cfg)
        scores = patch_discriminator_forward(pair1["src"]["image"], cfg, w)
        assert scores.ndim == 2
        assert np.all(scores > 0.0) and np.all(scores < 1.0)

    def test_determinism(self, pair1):
        cfg = DiscriminatorConfig()
        w1 = init_discriminator_weights(cfg)
        w2 = init_discriminator_weights(cfg)
        s1 = patch_discriminator_forward(pair1["src"]["image"], cfg, w1)
        s2 = patch_discriminator_forward(pair1["src"]["image"], cfg, w2)
        assert np.array_equal(s1, s2)

    def test_impulse_shift_moves_scores(self):
        cfg = DiscriminatorConfig()
        w = init_discriminator_weights(cfg)
        base = np.zeros((64, 64, 3), np.uint8)
        a = base.copy()
        a[16:20, 16:20] = 255
        b = base.copy()
        b[16:20, 24:28] = 255  # shifted by one output stride (8 px)
        sa = patch_discriminator_forward(a, cfg, w)
        sb = patch_discriminator_forward(b, cfg, w)
        flat = patch_discriminator_forward(base, cfg, w)
        da = np.abs(sa - flat)
        db = np.abs(sb - flat)
        # the response peak follows the impulse by one column
        pa = np.unravel_index(np.argmax(da), da.shape)
        pb = np.unravel_index(np.argmax(db), db.shape)
        assert pb[0] == pa[0]
        assert pb[1] == pa[1] + 1

    def test_too_small_input(self):
        cfg = DiscriminatorConfig()
        w = init_discriminator_weights(cfg)
        with pytest.raises(ConfigurationError):
            patch_discriminator_forward(np.zeros((8, 8, 3), np.uint8), cfg, w)
