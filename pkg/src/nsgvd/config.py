"""Plain-text run configuration.

Files are `key = value` lines with optional `[section]` headers; a section
prefixes its keys with `section.`, so everything flattens to dotted keys
(e.g. `nsg.lambda = 0.1`). `#` starts a comment. No nesting beyond that;
the format is diff-friendly and trivially parseable from any language.

Every consumer documents a default for each key; command-line overrides win
over file values, and the effective flattened config is echoed into the run's
output directory so any run can be reproduced from its own artifacts.
"""

from __future__ import annotations

from .errors import ConfigError


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section:
                raise ConfigError(f"line {lineno}: empty section name")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        full = f"{section}.{key}" if section else key
        values[full] = value.strip()
    return values


def load_config(path) -> dict[str, str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def dump_config(values: dict[str, str]) -> str:
    """Deterministic flattened rendering (sorted dotted keys, no sections)."""
    return "".join(f"{k} = {values[k]}\n" for k in sorted(values))


class Config:
    """Typed access over flattened key/value strings."""

    def __init__(self, values: dict[str, str] | None = None):
        self.values = dict(values or {})

    def override(self, assignments) -> "Config":
        out = dict(self.values)
        for item in assignments:
            if "=" not in item:
                raise ConfigError(f"override must be key=value, got {item!r}")
            key, value = item.split("=", 1)
            out[key.strip()] = value.strip()
        return Config(out)

    def get(self, key: str, default: str) -> str:
        return self.values.get(key, default)

    def get_int(self, key: str, default: int) -> int:
        try:
            return int(self.values.get(key, default))
        except ValueError as exc:
            raise ConfigError(f"{key}: expected integer, got {self.values[key]!r}") from exc

    def get_float(self, key: str, default: float) -> float:
        try:
            return float(self.values.get(key, default))
        except ValueError as exc:
            raise ConfigError(f"{key}: expected number, got {self.values[key]!r}") from exc

    def get_bool(self, key: str, default: bool) -> bool:
        raw = str(self.values.get(key, default)).strip().lower()
        if raw in ("1", "true", "yes", "on"):
            return True
        if raw in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected boolean, got {raw!r}")

    def get_list(self, key: str, default: str) -> list[str]:
        raw = self.values.get(key, default)
        return [part.strip() for part in raw.split(",") if part.strip()]

    def get_floats(self, key: str, default: str) -> list[float]:
        return [float(p) for p in self.get_list(key, default)]

    def get_ints(self, key: str, default: str) -> list[int]:
        return [int(p) for p in self.get_list(key, default)]
