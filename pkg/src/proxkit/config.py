"""Pipeline settings shared by CLI subcommands.

Settings come from (highest precedence first): command-line flags, a
flat ``key = value`` config file named by ``--config`` or the
``PROXKIT_CONFIG`` environment variable, then built-in defaults.

Recognized keys::

    smoothing_window = 3        # odd >= 3, or 0 to disable smoothing
    tie_break = ips             # predominant-zone priority order
    share_denominator = on_grid # or: total (affects exported shares only)
    scale = path/to/scale.txt   # default scale definition for `survey`
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

from .model import ON_GRID_ZONES, Zone

ENV_VAR = "PROXKIT_CONFIG"

_ZONE_BY_CODE = {z.code: z for z in ON_GRID_ZONES}


@dataclass(frozen=True)
class PipelineSettings:
    smoothing_window: int | None = 3
    tie_break: tuple[Zone, Zone, Zone] = ON_GRID_ZONES
    share_denominator: str = "on_grid"
    scale_path: Path | None = None


def parse_tie_break(spec: str) -> tuple[Zone, Zone, Zone]:
    letters = spec.strip().lower()
    if sorted(letters) != ["i", "p", "s"]:
        raise ValueError(f"tie_break must be a permutation of 'ips', got {spec!r}")
    return tuple(_ZONE_BY_CODE[c] for c in letters)  # type: ignore[return-value]


def parse_smoothing_window(spec: str) -> int | None:
    value = int(spec)
    if value in (0, 1):
        return None  # smoothing disabled
    if value < 3 or value % 2 == 0:
        raise ValueError(f"smoothing_window must be odd >= 3 (or 0 to disable), got {value}")
    return value


def load_settings(config_path: str | None = None, env: dict | None = None) -> PipelineSettings:
    """Settings from a config file; missing file with explicit path is an error."""
    env = os.environ if env is None else env
    path = config_path or env.get(ENV_VAR)
    if not path:
        return PipelineSettings()
    text = Path(path).read_text(encoding="utf-8")
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ValueError(f"config line is not 'key = value': {raw!r}")
        values[key.strip()] = value.strip()

    known = {"smoothing_window", "tie_break", "share_denominator", "scale"}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")

    settings = PipelineSettings()
    if "smoothing_window" in values:
        settings = replace(settings, smoothing_window=parse_smoothing_window(values["smoothing_window"]))
    if "tie_break" in values:
        settings = replace(settings, tie_break=parse_tie_break(values["tie_break"]))
    if "share_denominator" in values:
        denom = values["share_denominator"]
        if denom not in ("on_grid", "total"):
            raise ValueError(f"share_denominator must be 'on_grid' or 'total', got {denom!r}")
        settings = replace(settings, share_denominator=denom)
    if "scale" in values:
        settings = replace(settings, scale_path=Path(values["scale"]))
    return settings
