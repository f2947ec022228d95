"""Pipeline configuration: a flat TOML document whose keys can all be overridden by flags."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any
from zoneinfo import ZoneInfo, ZoneInfoNotFoundError

from .cpi import DEFAULT_BINS, DEFAULT_CTS, CtsTable
from .errors import ConfigError
from .export import FORMATS
from .graph import EDGE_POLICIES, SENDER_TO_EACH_RECIPIENT
from .similarity import NEG_LOG, PATH_COSTS

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PATH_KEYS = ("inputs", "aliases", "designations", "output_dir")


@dataclass
class PipelineConfig:
    inputs: list[str] = field(default_factory=list)
    hosts: list[str] = field(default_factory=list)
    aliases: str | None = None
    designations: str | None = None
    fuse_aliases: bool = False
    allow_domains: list[str] | None = None
    include_bcc: bool = True
    edge_policy: str = SENDER_TO_EACH_RECIPIENT
    strict_edges: bool = False
    bins: int = DEFAULT_BINS
    cts_table: list[list[str]] = field(default_factory=lambda: [list(s) for s in DEFAULT_CTS])
    timezone: str | None = None
    alpha: float = 0.5
    alphas: list[float] | None = None
    attribute_weights: list[float] = field(default_factory=lambda: [1.0] * 5)
    k: int = 4
    k_range: list[int] | None = None
    max_iterations: int = 100
    formats: list[str] = field(default_factory=lambda: ["csv"])
    eq8_literal: bool = False
    direct_branch: bool = False
    path_cost: str = NEG_LOG
    cpi_outgoing_only: bool = False
    trace_quality: bool = False
    universe_size: int | None = None
    top_members: int = 1
    threads: int = 1
    output_dir: str = "pinet-out"

    def validate(self) -> "PipelineConfig":
        for a in [self.alpha, *(self.alphas or [])]:
            if not 0.0 <= float(a) <= 1.0:
                raise ConfigError(f"alpha must lie in [0, 1], got {a}")
        for k in [self.k, *(self.k_range or [])]:
            if int(k) < 1:
                raise ConfigError(f"k must be at least 1, got {k}")
        if self.edge_policy not in EDGE_POLICIES:
            raise ConfigError(f"edge_policy must be one of {EDGE_POLICIES}")
        if self.path_cost not in PATH_COSTS:
            raise ConfigError(f"path_cost must be one of {PATH_COSTS}")
        if len(self.attribute_weights) != 5:
            raise ConfigError("attribute_weights needs exactly 5 values")
        if any(w < 0 for w in self.attribute_weights) or sum(self.attribute_weights) <= 0:
            raise ConfigError("attribute_weights must be non-negative with a positive sum")
        if self.bins < 2:
            raise ConfigError("bins must be at least 2")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.top_members < 1:
            raise ConfigError("top_members must be at least 1")
        if self.universe_size is not None and self.universe_size < 1:
            raise ConfigError("universe_size must be positive")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unsupported export formats {bad}; choose from {FORMATS}")
        CtsTable.from_spec(self.cts_table)
        if self.timezone:
            try:
                ZoneInfo(self.timezone)
            except (ZoneInfoNotFoundError, ValueError):
                raise ConfigError(f"unknown timezone {self.timezone!r}") from None
        return self

    @property
    def sweep_alphas(self) -> list[float]:
        return list(self.alphas) if self.alphas else [self.alpha]

    @property
    def sweep_ks(self) -> list[int]:
        return list(self.k_range) if self.k_range else [self.k]


_FIELDS = {f.name: f for f in fields(PipelineConfig)}


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a TOML config; relative paths are resolved against the file's directory."""
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    base = path.parent
    for key in PATH_KEYS:
        if key not in data or data[key] is None:
            continue
        if key == "inputs":
            data[key] = [str(base / p) for p in data[key]]
        else:
            data[key] = str(base / data[key])
    return data


def make_config(file_values: dict[str, Any] | None = None, **overrides) -> PipelineConfig:
    values = dict(file_values or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = PipelineConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


def with_overrides(cfg: PipelineConfig, **overrides) -> PipelineConfig:
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None}).validate()


def parse_k_range(text: str) -> list[int]:
    """``"4"``, ``"2..10"`` or ``"2,3,5"``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad k range {text!r}") from None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad number list {text!r}") from None
