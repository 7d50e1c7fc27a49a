import pytest

from makeupkit.errors import ConfigurationError
from makeupkit.losses import LossWeights
from makeupkit.network import GeneratorConfig
from makeupkit.runconfig import RunConfig, load_runconfig, save_runconfig


class TestRunConfig:
    def test_serialize_round_trip(self):
        cfg = RunConfig(
            generator=GeneratorConfig(input_res=64, seed=3),
            loss_weights=LossWeights(adv=2.0),
            seed=11,
        )
        again = RunConfig.from_json(cfg.to_json())
        assert again == cfg
        assert again.to_json() == cfg.to_json()

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "run.json"
        cfg = RunConfig(seed=5)
        save_runconfig(path, cfg)
        assert load_runconfig(path) == cfg

    def test_schema_version_check(self):
        bad = RunConfig().to_json().replace('"schema_version": 1', '"schema_version": 99')
        with pytest.raises(ConfigurationError):
            RunConfig.from_json(bad)

    def test_missing_referenced_file(self, tmp_path):
        cfg = RunConfig(paths={"src": str(tmp_path / "nope.png")})
        with pytest.raises(ConfigurationError):
            RunConfig.from_json(cfg.to_json())
        # the check can be disabled for config-only tooling
        assert RunConfig.from_json(cfg.to_json(), check_paths=False).paths

    def test_default_schedule_is_usable(self):
        sched = RunConfig().blend_schedule()
        from makeupkit.pgt import schedule_eval

        vals = schedule_eval(sched, 0.5)
        assert set(vals) == {"skin", "lip", "eyeshadow"}
