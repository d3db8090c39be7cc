"""Experiment configuration files (INI syntax).

Example::

    [experiment]
    datasets = FTB DNC
    indices = CLE SCF_CN SCF_RA CN
    runs = 100
    seed = 0
    test_fraction = 0.1
    auc_mode = exact          ; or "sampled"
    auc_n = 100000
    dense_cap = 5000
    workers = 1
    manifest = data/manifest.txt

    [grid]
    CLE_STAR = 0:1:0.05       ; alpha values, inclusive range start:stop:step
    KATZ = 0.001 0.005 0.01   ; beta values
    LP = 0.001, 0.01, 0.1     ; epsilon values

Lists are separated by whitespace or commas. ``test_fraction`` may be a
list (one evaluation per value). Command-line options override the file.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import UsageError
from .similarity import DEFAULT_DENSE_CAP, PARAMS, IndexConfig, IndexId

__all__ = ["ExperimentConfig", "load_config", "parse_grid", "parse_list"]


def parse_list(text: str) -> list[str]:
    return [t for t in re.split(r"[\s,]+", text.strip()) if t]


def parse_grid(text: str) -> list[float]:
    """``"0:1:0.25"`` gives ``[0, 0.25, 0.5, 0.75, 1]``; otherwise a plain list."""
    text = text.strip()
    if re.fullmatch(r"[^\s,]+:[^\s,]+:[^\s,]+", text):
        start, stop, step = (float(t) for t in text.split(":"))
        if step <= 0 or stop < start:
            raise UsageError(f"bad grid range {text!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [float(np.round(start + i * step, 12)) for i in range(count)]
    values = [float(t) for t in parse_list(text)]
    if not values:
        raise UsageError("empty parameter grid")
    return values


@dataclass
class ExperimentConfig:
    datasets: list[str] = field(default_factory=list)
    indices: list[IndexConfig] = field(default_factory=list)
    grids: dict[IndexId, list[float]] = field(default_factory=dict)
    test_fractions: list[float] = field(default_factory=lambda: [0.1])
    n_runs: int = 100
    base_seed: int = 0
    auc_mode: str = "exact"
    auc_n: int = 100_000
    dense_cap: int = DEFAULT_DENSE_CAP
    workers: int = 1
    out_dir: Path | None = None
    manifest: Path | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n_runs < 1:
            raise UsageError("runs must be >= 1")
        if self.auc_mode not in ("exact", "sampled"):
            raise UsageError("auc_mode must be 'exact' or 'sampled'")
        if self.auc_n < 1:
            raise UsageError("auc_n must be >= 1")
        if self.workers < 1:
            raise UsageError("workers must be >= 1")
        for f in self.test_fractions:
            if not 0 < f < 1:
                raise UsageError(f"test fraction {f} outside (0, 1)")
        for idx, grid in self.grids.items():
            if idx not in PARAMS:
                raise UsageError(f"{idx.value} has no tunable parameter")
            if not grid:
                raise UsageError(f"empty grid for {idx.value}")

    def seeds(self) -> list[int]:
        return [self.base_seed + r for r in range(self.n_runs)]

    def updated(self, **changes) -> "ExperimentConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        cfg = replace(self, **changes)
        cfg.validate()
        return cfg


def _parse_index(text: str) -> IndexConfig:
    try:
        return IndexConfig.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    if not cp.read(path, encoding="utf-8"):
        raise UsageError(f"cannot read config file {path}")
    kw: dict = {}
    if cp.has_section("experiment"):
        sec = cp["experiment"]
        if "datasets" in sec:
            kw["datasets"] = parse_list(sec["datasets"])
        if "indices" in sec:
            kw["indices"] = [_parse_index(t) for t in parse_list(sec["indices"])]
        if "test_fraction" in sec:
            kw["test_fractions"] = [float(t) for t in parse_list(sec["test_fraction"])]
        for key, name, conv in (("runs", "n_runs", int), ("seed", "base_seed", int),
                                ("auc_mode", "auc_mode", str), ("auc_n", "auc_n", int),
                                ("dense_cap", "dense_cap", int), ("workers", "workers", int)):
            if key in sec:
                kw[name] = conv(sec[key])
        if "manifest" in sec:
            m = Path(sec["manifest"])
            kw["manifest"] = m if m.is_absolute() else path.parent / m
        if "out" in sec:
            kw["out_dir"] = Path(sec["out"])
    grids = {}
    if cp.has_section("grid"):
        for key, value in cp["grid"].items():
            try:
                idx = IndexId(key.upper())
            except ValueError:
                raise UsageError(f"unknown index {key!r} in [grid]") from None
            grids[idx] = parse_grid(value)
    kw["grids"] = grids
    return ExperimentConfig(**kw)
