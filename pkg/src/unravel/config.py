"""Run configuration shared by all pipeline commands.

Values resolve with the precedence flags > config file > defaults. The
config file is plain text, one `key = value` per line, `#` comments and
blank lines allowed; keys are the RunConfig field names. Grid fields
take comma-separated numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .rules import CF_GRID, MIN_INSTANCES_GRID
from .saliency import POOLING_METHODS

ALLOWED_DIMS = (50, 100)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 7
    keyword_docs: int = 2000
    distractor_docs: int = 800
    d_h: int = 50
    d_e: int = 100
    epochs: int = 30
    pooling: str = "dot"
    top_per_doc: int = 50
    vocab_limit: int = 500
    cf_grid: tuple = CF_GRID
    min_instances_grid: tuple = MIN_INSTANCES_GRID
    out_dir: str = "out"
    threads: int = 1

    def validate(self) -> "RunConfig":
        if self.d_h not in ALLOWED_DIMS:
            raise ConfigError(f"d_h must be one of {ALLOWED_DIMS}, got {self.d_h}")
        if self.d_e not in ALLOWED_DIMS:
            raise ConfigError(f"d_e must be one of {ALLOWED_DIMS}, got {self.d_e}")
        if self.pooling not in POOLING_METHODS:
            raise ConfigError(
                f"pooling must be one of {POOLING_METHODS}, got {self.pooling!r}"
            )
        if self.epochs < 0:
            raise ConfigError("epochs must be ≥ 0")
        if self.threads < 1:
            raise ConfigError("threads must be ≥ 1")
        if self.top_per_doc < 1:
            raise ConfigError("top_per_doc must be ≥ 1")
        if self.vocab_limit < 1:
            raise ConfigError("vocab_limit must be ≥ 1")
        if not self.cf_grid or not self.min_instances_grid:
            raise ConfigError("induction grids must be non-empty")
        if not self.out_dir:
            raise ConfigError("out_dir must be a non-empty path")
        return self


_INT_FIELDS = frozenset(
    {
        "seed",
        "keyword_docs",
        "distractor_docs",
        "d_h",
        "d_e",
        "epochs",
        "top_per_doc",
        "vocab_limit",
        "threads",
    }
)
_STR_FIELDS = frozenset({"pooling", "out_dir"})
_FLOAT_TUPLE_FIELDS = frozenset({"cf_grid"})
_INT_TUPLE_FIELDS = frozenset({"min_instances_grid"})


def parse_config_file(path: str) -> dict[str, str]:
    """Raw key-value pairs; coercion happens during resolution."""
    values: dict[str, str] = {}
    known = {f.name for f in fields(RunConfig)}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in known:
                raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
            values[key] = value
    return values


def _coerce(name: str, text: str) -> object:
    try:
        if name in _INT_FIELDS:
            return int(text)
        if name in _FLOAT_TUPLE_FIELDS:
            return tuple(float(part) for part in text.split(","))
        if name in _INT_TUPLE_FIELDS:
            return tuple(int(part) for part in text.split(","))
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def resolve_config(
    flag_values: dict | None = None, file_values: dict[str, str] | None = None
) -> RunConfig:
    """flags > config file > defaults; unknown flag keys are rejected."""
    flag_values = flag_values or {}
    file_values = file_values or {}
    known = {f.name for f in fields(RunConfig)}
    stray = set(flag_values) - known
    if stray:
        raise ConfigError(f"unknown config fields: {sorted(stray)}")
    chosen: dict[str, object] = {}
    for name in known:
        if flag_values.get(name) is not None:
            chosen[name] = flag_values[name]
        elif name in file_values:
            chosen[name] = _coerce(name, file_values[name])
    return RunConfig(**chosen).validate()
