"""Pipeline configuration: JSON file + environment overrides for paths."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

# env var -> config path field (documented mapping)
ENV_PATH_OVERRIDES = {
    "GENIC_CORPUS": "corpus",
    "GENIC_LEXICON": "lexicon",
    "GENIC_TERMS": "terms",
    "GENIC_TRIGGERS": "triggers",
    "GENIC_SCHEMA": "schema",
    "GENIC_STORE": "store",
    "GENIC_OUTPUT": "output",
    "GENIC_RULES": "rules",
    "GENIC_ANNOTATIONS": "annotations",
    "GENIC_TRAINING": "training",
    "GENIC_GOLD_RELATIONS": "gold_relations",
    "GENIC_DECISIONS": "decisions",
    "GENIC_SYNONYMS": "synonyms",
}

COUNT_MODES = ("raw_mentions", "distinct_canonical")


@dataclass
class PipelineConfig:
    paths: dict[str, str | None]
    corpus_format: str = "medline_txt"
    count_mode: str = "raw_mentions"
    k_features: int = 100
    alpha: float = 1.0
    threshold: float = 0.5
    min_confidence: float = 0.8
    max_gap: int = 3
    slot_relations: tuple[str, ...] = ("Subject", "Object", "Prep", "NofN")
    cluster_threshold: float = 0.25
    path_length: int = 3
    neg_weight: float = 2.0
    noise_budget: int = 0
    folds: int = 10
    seed: int = 0
    port: int = 8000

    defaults_applied: list[str] = field(default_factory=list)

    def path(self, key: str) -> Path | None:
        value = self.paths.get(key)
        return Path(value) if value else None

    @property
    def output_dir(self) -> Path:
        return Path(self.paths.get("output") or "out")


class ConfigError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {v}" for v in violations))


_OPTIONAL_PATHS = ("terms", "triggers", "schema", "store", "output", "rules",
                   "annotations", "training", "gold_relations", "decisions", "synonyms")
_NUMERIC_RANGES = {
    "k_features": (1, None, int),
    "alpha": (0, None, float),           # exclusive lower bound checked below
    "threshold": (0.0, 1.0, float),
    "min_confidence": (0.0, 1.0, float),
    "max_gap": (0, None, int),
    "cluster_threshold": (0.0, 1.0, float),
    "path_length": (1, None, int),
    "neg_weight": (0.0, None, float),
    "noise_budget": (0, None, int),
    "folds": (2, None, int),
    "seed": (None, None, int),
    "port": (1, 65535, int),
}


def validate_config(path: str | Path, env: dict[str, str] | None = None) -> PipelineConfig:
    """Load, apply env overrides and defaults, and validate; raise ConfigError."""
    if env is None:
        env = dict(os.environ)
    violations: list[str] = []
    try:
        obj = json.loads(Path(path).read_text("utf-8"))
    except FileNotFoundError:
        raise ConfigError([f"config file not found: {path}"])
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config is not valid JSON: {exc}"])
    if not isinstance(obj, dict):
        raise ConfigError(["config root must be a JSON object"])

    paths = dict(obj.get("paths", {}))
    for var, key in ENV_PATH_OVERRIDES.items():
        if env.get(var):
            paths[key] = env[var]

    config = PipelineConfig(paths={k: paths.get(k) for k in ("corpus", "lexicon") + _OPTIONAL_PATHS})
    for key, value in paths.items():
        if key not in config.paths:
            violations.append(f"paths.{key}: unknown path field")

    known = {f for f in _NUMERIC_RANGES} | {"corpus_format", "count_mode", "slot_relations",
                                            "paths"}
    for key in obj:
        if key not in known:
            violations.append(f"{key}: unknown configuration field")

    for key, (lo, hi, typ) in _NUMERIC_RANGES.items():
        if key in obj:
            try:
                value = typ(obj[key])
            except (TypeError, ValueError):
                violations.append(f"{key}: expected {typ.__name__}, got {obj[key]!r}")
                continue
            if lo is not None and value < lo:
                violations.append(f"{key}: must be >= {lo} (got {value})")
            if hi is not None and value > hi:
                violations.append(f"{key}: must be <= {hi} (got {value})")
            setattr(config, key, value)
        else:
            config.defaults_applied.append(key)
    if config.alpha <= 0:
        violations.append(f"alpha: must be > 0 (got {config.alpha})")

    if "corpus_format" in obj:
        if obj["corpus_format"] not in ("medline_txt", "plain_tsv"):
            violations.append(f"corpus_format: unknown format {obj['corpus_format']!r}")
        else:
            config.corpus_format = obj["corpus_format"]
    if "count_mode" in obj:
        if obj["count_mode"] not in COUNT_MODES:
            violations.append(f"count_mode: must be one of {COUNT_MODES}")
        else:
            config.count_mode = obj["count_mode"]
    if "slot_relations" in obj:
        from .deps import RELATION_LABELS
        bad = [r for r in obj["slot_relations"] if r not in RELATION_LABELS]
        if bad:
            violations.append(f"slot_relations: unknown labels {bad}")
        else:
            config.slot_relations = tuple(obj["slot_relations"])

    for key in ("corpus", "lexicon") + _OPTIONAL_PATHS:
        value = config.paths.get(key)
        if value and key != "output" and not Path(value).exists():
            violations.append(f"paths.{key}: file does not exist: {value}")

    if violations:
        raise ConfigError(violations)
    return config
