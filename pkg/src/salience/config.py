"""Run configuration shared by the pipeline and the command line."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    """Raised for out-of-range or malformed configuration values."""


@dataclass(frozen=True)
class RunConfig:
    leg_size: int = 200
    n_max: int = 6
    l0: float = 100.0
    delta_l: float | None = None  # None means tune on the first leg
    beta: float = 1.0
    base_k: int = 1
    max_k: int = 3
    passes: int = 1
    seed: int = 0
    format_hint: str | None = None
    output: str = "text"
    threshold_base: float = 10.0
    max_attention: int = 3
    stop_size: int = 20
    binder_filter: bool = False
    paragraph_rank: bool = False
    baseline_sentences: int = 400
    top: int = 50

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        def need(cond: bool, msg: str) -> None:
            if not cond:
                raise ConfigError(msg)

        need(self.leg_size >= 1, "leg_size must be >= 1")
        need(self.n_max >= 1, "n_max must be >= 1")
        need(self.l0 > 0, "l0 must be > 0")
        if self.delta_l is not None:
            need(0 < self.delta_l <= self.l0, "delta_l must satisfy 0 < delta_l <= l0")
        need(self.beta >= 0, "beta must be >= 0")
        need(1 <= self.base_k <= self.max_k, "need 1 <= base_k <= max_k")
        need(self.passes in (1, 2), "passes must be 1 or 2")
        need(0 <= self.seed < 2**64, "seed must fit in an unsigned 64-bit integer")
        need(self.format_hint in (None, "plain", "html", "latex"), "format_hint must be plain, html or latex")
        need(self.output in ("text", "json", "csv"), "output must be text, json or csv")
        need(self.threshold_base > 0, "threshold_base must be > 0")
        need(self.max_attention >= 0, "max_attention must be >= 0")
        need(self.stop_size >= 1, "stop_size must be >= 1")
        need(self.baseline_sentences >= 1, "baseline_sentences must be >= 1")
        need(self.top >= 1, "top must be >= 1")

    def replace(self, **changes: Any) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_mapping(cls, values: dict[str, Any], base: "RunConfig | None" = None) -> "RunConfig":
        base = base or cls()
        fields = {f.name: f for f in dataclasses.fields(cls)}
        changes = {}
        for key, raw in values.items():
            name = key.strip().replace("-", "_")
            if name not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            changes[name] = _coerce(name, raw, getattr(base, name))
        return dataclasses.replace(base, **changes)


_OPTIONAL_FLOAT = {"delta_l"}
_OPTIONAL_STR = {"format_hint"}


def _coerce(name: str, raw: Any, current: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if name in _OPTIONAL_FLOAT:
            return None if text.lower() in ("", "auto", "none") else float(text)
        if name in _OPTIONAL_STR:
            return None if text.lower() in ("", "auto", "none") else text
        if isinstance(current, bool):
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(current, int):
            return int(text)
        if isinstance(current, float):
            return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}") from None
    return text


def load_config_file(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return RunConfig.from_mapping(values, base)
