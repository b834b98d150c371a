"""Experiment configuration (TOML, schema ``v1``).

Example::

    schema = "v1"
    datasets = ["data/college_msg.toml"]
    definitions = ["I", "II", "III", "IV", "V", "VI", "VII"]
    seeds = [1, 2, 3]
    output_dir = "results"

    [[grid]]
    settings = ["random", "node_centric"]
    models = ["heuristic_forest", "mlp", "mlp_with_features", "gcn", "gtn"]

    [[grid]]
    settings = ["unsupervised"]
    models = ["stc_greedy"]

    [neural]
    max_epochs = 200

Without ``[[grid]]`` tables, top-level ``settings`` and ``models`` form one grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .io import InputError, read_toml
from .labeling import DEFINITIONS, DefinitionId, ThresholdConfig
from .learners import MODELS, ForestConfig, NeuralConfig
from .splits import MODES

SUPERVISED = tuple(m for m in MODELS if m != "stc_greedy")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridBlock:
    settings: tuple[str, ...]
    models: tuple[str, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[Path, ...]
    grids: tuple[GridBlock, ...]
    definitions: tuple[DefinitionId, ...] = DEFINITIONS
    seeds: tuple[int, ...] = (1, 2, 3)
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    forest: ForestConfig = field(default_factory=ForestConfig)
    neural: NeuralConfig = field(default_factory=NeuralConfig)
    output_dir: Path = Path("results")
    jobs: int = 1

    def __post_init__(self):
        validate(self)

    def cells(self):
        """Every (dataset, setting, definition, model, seed) in a fixed order."""
        for ds in self.datasets:
            for block in self.grids:
                for setting in block.settings:
                    for d in self.definitions:
                        for model in block.models:
                            for seed in self.seeds:
                                yield ds, setting, d, model, seed


def validate(cfg: ExperimentConfig) -> None:
    if not cfg.seeds:
        raise ConfigError("seeds must be non-empty")
    if not cfg.datasets:
        raise ConfigError("no datasets")
    if not cfg.definitions:
        raise ConfigError("no definitions")
    if not cfg.grids:
        raise ConfigError("no settings/models grid")
    for block in cfg.grids:
        for s in block.settings:
            if s not in MODES:
                raise ConfigError(f"unknown setting {s!r}; expected one of {MODES}")
        for m in block.models:
            if m not in MODELS:
                raise ConfigError(f"unknown model {m!r}; expected one of {MODELS}")
        if "unsupervised" in block.settings:
            bad = [m for m in block.models if m != "stc_greedy"]
            if bad:
                raise ConfigError(f"the unsupervised setting pairs only with stc_greedy, got {bad}")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be >= 1")


def _section(doc, name, cls):
    raw = doc.get(name, {})
    allowed = {f.name for f in fields(cls)}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"[{name}] has unknown keys {sorted(unknown)}")
    if cls is ThresholdConfig:
        raw = {k: tuple(v) for k, v in raw.items()}
    return cls(**raw)


def load_config(path, **overrides) -> ExperimentConfig:
    try:
        doc = read_toml(path)
    except InputError as exc:
        raise ConfigError(str(exc)) from None
    if doc.get("schema") != "v1":
        raise ConfigError(f"{path}: expected schema = \"v1\"")
    base = Path(path).parent
    if "grid" in doc:
        grids = tuple(GridBlock(tuple(g["settings"]), tuple(g["models"])) for g in doc["grid"])
    else:
        grids = (GridBlock(tuple(doc.get("settings", ())), tuple(doc.get("models", ()))),)
    try:
        defs = tuple(DefinitionId.parse(d) for d in doc.get("definitions", [d.value for d in DEFINITIONS]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    kwargs = dict(
        datasets=tuple(base / p for p in doc.get("datasets", [])),
        grids=grids,
        definitions=defs,
        seeds=tuple(int(s) for s in doc.get("seeds", (1, 2, 3))),
        thresholds=_section(doc, "thresholds", ThresholdConfig),
        forest=_section(doc, "forest", ForestConfig),
        neural=_section(doc, "neural", NeuralConfig),
        output_dir=base / doc.get("output_dir", "results"),
        jobs=int(doc.get("jobs", 1)),
    )
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kwargs)
