"""Experiment configuration, read from TOML or JSON.

Example::

    name = "hypergrid-branin-currin"
    methods = ["gr", "op-baseline"]
    seeds = [0, 1, 2]
    out_dir = "runs/hg"

    [env]
    env = "hypergrid"
    d = 2
    H = 32
    objectives = ["branin", "currin"]

    [train]
    steps = 1000
    lr = 0.01
    temperature = 2.0

    [overrides.cheap-gr]
    temperature = 40.0

    [replay]
    capacity = 10000
    warmup = 1000

Keys under ``train`` are :class:`~paretoflow.gflownet.TrainConfig` fields
(``method`` and ``seed`` are filled per job). ``overrides.<method>`` patches
the training keys for one method.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

try:
    import tomllib
except ImportError:  # python < 3.11
    import tomli as tomllib

import tomli_w

from .gflownet import TrainConfig
from .replay import ReplayConfig

METHODS = ("gr", "gr-k", "cheap-gr", "nn", "nn-int", "op-baseline")
TRANSFORMS = ("raw", "softmax", "indicator")
_TRAIN_KEYS = {f.name for f in fields(TrainConfig)} - {"method", "seed", "replay"}
_REPLAY_KEYS = {f.name for f in fields(ReplayConfig)}


@dataclass
class ExperimentConfig:
    env: dict = field(default_factory=lambda: {"env": "hypergrid", "d": 2, "H": 32, "objectives": ["branin", "currin"]})
    methods: list = field(default_factory=lambda: ["gr"])
    seeds: list = field(default_factory=lambda: [0, 1, 2])
    train: dict = field(default_factory=dict)
    overrides: dict = field(default_factory=dict)
    replay: dict | None = None
    out_dir: str = "runs"
    name: str = "experiment"
    n_candidates: int = 1280

    def __post_init__(self):
        self.validate()

    def validate(self):
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        for where, keys in [("train", self.train)] + [(f"overrides.{m}", o) for m, o in self.overrides.items()]:
            bad = set(keys) - _TRAIN_KEYS
            if bad:
                raise ValueError(f"unknown keys in [{where}]: {sorted(bad)}")
            if keys.get("transform", "softmax") not in TRANSFORMS:
                raise ValueError(f"unknown transform {keys['transform']!r}")
        for m in self.overrides:
            if m not in METHODS:
                raise ValueError(f"override for unknown method {m!r}")
        if "gr-k" in self.methods:
            k = {**self.train, **self.overrides.get("gr-k", {})}.get("max_rank")
            if not k or int(k) < 1:
                raise ValueError("method gr-k needs train.max_rank >= 1")
        if self.replay is not None:
            bad = set(self.replay) - _REPLAY_KEYS
            if bad:
                raise ValueError(f"unknown keys in [replay]: {sorted(bad)}")
            ReplayConfig(**self.replay)
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be positive")

    def train_config(self, method: str, seed: int) -> TrainConfig:
        """Training settings for one (method, seed) job; op-baseline ignores the transform."""
        kw = {**self.train, **self.overrides.get(method, {})}
        if "hidden" in kw:
            kw["hidden"] = tuple(kw["hidden"])
        replay = ReplayConfig(**self.replay) if self.replay is not None else None
        return TrainConfig(method=method, seed=int(seed), replay=replay, **kw)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "methods": list(self.methods),
            "seeds": [int(s) for s in self.seeds],
            "out_dir": self.out_dir,
            "n_candidates": self.n_candidates,
            "env": copy.deepcopy(self.env),
            "train": copy.deepcopy(self.train),
        }
        if self.overrides:
            d["overrides"] = copy.deepcopy(self.overrides)
        if self.replay is not None:
            d["replay"] = dict(self.replay)
        return _drop_none(d)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in fields(cls)}
        if unknown:
            raise ValueError(f"unknown top-level keys: {sorted(unknown)}")
        return cls(**copy.deepcopy(d))

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path):
        path = Path(path)
        path.write_text(self.to_json() if path.suffix == ".json" else self.to_toml())


def _drop_none(d):
    if isinstance(d, dict):
        return {k: _drop_none(v) for k, v in d.items() if v is not None}
    return d


def parse_config(text: str, fmt: str = "toml") -> ExperimentConfig:
    data = json.loads(text) if fmt == "json" else tomllib.loads(text)
    return ExperimentConfig.from_dict(data)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file {path} does not exist")
    return parse_config(path.read_text(), "json" if path.suffix == ".json" else "toml")
