"""Run configuration: a JSON-serializable bundle of generator settings,
blend-schedule breakpoints, loss weights, seed, and input file paths."""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List

from .errors import ConfigurationError
from .losses import LossWeights
from .network import GeneratorConfig
from .pgt import DEFAULT_BREAKPOINTS, BlendSchedule

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    schedule: Dict[str, List] = field(
        default_factory=lambda: {k: [list(p) for p in v] for k, v in DEFAULT_BREAKPOINTS.items()}
    )
    loss_weights: LossWeights = field(default_factory=LossWeights)
    seed: int = 0
    paths: Dict[str, str] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def blend_schedule(self) -> BlendSchedule:
        return BlendSchedule({k: [tuple(p) for p in v] for k, v in self.schedule.items()})

    def to_json(self) -> str:
        doc = {
            "schema_version": self.schema_version,
            "generator": asdict(self.generator),
            "schedule": self.schedule,
            "loss_weights": asdict(self.loss_weights),
            "seed": self.seed,
            "paths": self.paths,
        }
        return json.dumps(doc, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, check_paths: bool = True) -> "RunConfig":
        doc = json.loads(text)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ConfigurationError(
                f"unsupported schema_version {doc.get('schema_version')}"
            )
        gen = GeneratorConfig(**{**doc["generator"], "widths": tuple(doc["generator"]["widths"])})
        cfg = cls(
            generator=gen,
            schedule=doc["schedule"],
            loss_weights=LossWeights(**doc["loss_weights"]),
            seed=doc["seed"],
            paths=doc.get("paths", {}),
        )
        if check_paths:
            for key, p in cfg.paths.items():
                if not Path(p).exists():
                    raise ConfigurationError(f"referenced file missing: {key} -> {p}")
        return cfg


def load_runconfig(path, check_paths: bool = True) -> RunConfig:
    return RunConfig.from_json(Path(path).read_text(), check_paths=check_paths)


def save_runconfig(path, cfg: RunConfig) -> None:
    Path(path).write_text(cfg.to_json())
