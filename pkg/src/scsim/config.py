"""Line-oriented scenario configuration.

The format is deliberately small: ``[section]`` headers, ``key = value``
pairs, ``#`` comments. Every key has a default drawn from the reference
scenario, unknown keys are hard errors (typos should not silently run a
different experiment), and malformed values report their line number.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .energy import EnergyProfile
from .engine import Scenario
from .mobility import Highway, TrafficProfile
from .policy import BackhaulBudget
from .station import PowerModel

__all__ = [
    "ConfigError",
    "RunSettings",
    "DEFAULT_CACHE_SIZES",
    "parse_config",
    "parse_settings",
    "describe_schema",
]

DEFAULT_CACHE_SIZES = (0, 1, 2, 5, 10, 20, 31, 50, 100, 200, 500, 1000)


class ConfigError(ValueError):
    """Raised for any malformed, unknown, or inconsistent configuration."""


@dataclass(frozen=True)
class RunSettings:
    """Everything the command line needs: the scenario plus batch knobs."""

    scenario: Scenario
    cache_sizes: tuple[int, ...]
    workers: int


def _parse_int(raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ValueError("expected an integer") from None


def _parse_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValueError("expected a number") from None
    if math.isnan(value):
        raise ValueError("expected a number")
    return value


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError("expected a boolean (true/false)")


def _parse_str(raw: str) -> str:
    return raw


def _parse_int_list(raw: str) -> tuple[int, ...]:
    parts = [p.strip() for p in raw.split(",")]
    if not any(parts):
        raise ValueError("expected a comma-separated list of integers")
    out = []
    for p in parts:
        if not p:
            raise ValueError("empty entry in list")
        out.append(_parse_int(p))
    return tuple(out)


# section -> key -> (parser, default, documentation)
SCHEMA = {
    "highway": {
        "n_stations": (_parse_int, 10, "number of stations on the ring"),
        "coverage_radius_m": (_parse_float, 500.0, "station coverage radius; cell length is twice this"),
    },
    "catalog": {
        "n_files": (_parse_int, 1000, "content catalog size"),
        "gamma": (_parse_float, 1.0, "Zipf popularity exponent"),
    },
    "traffic": {
        "base_density": (_parse_float, 0.01, "rush-hour vehicles per meter per direction"),
        "speed_mps": (_parse_float, 25.0, "constant vehicle speed"),
        "daily_profile": (_parse_bool, True, "apply the two-peak daily demand profile"),
        "peak_hour_morning": (_parse_float, 8.0, "first rush peak, hour of day"),
        "peak_hour_evening": (_parse_float, 18.0, "second rush peak, hour of day"),
        "peak_width_h": (_parse_float, 1.5, "rush peak width in hours"),
        "floor_fraction": (_parse_float, 1.0 / 90.0, "overnight demand floor relative to peak"),
    },
    "energy": {
        "kind": (_parse_str, "solar-sine", "harvest profile: solar-sine, constant, or zero"),
        "peak_rate": (_parse_float, 1.0, "peak harvest rate in station power units"),
        "sunrise_h": (_parse_float, 6.0, "solar-sine rise hour"),
        "sunset_h": (_parse_float, 18.0, "solar-sine set hour"),
        "battery_capacity": (_parse_float, math.inf, "storage capacity in power-unit-seconds (inf allowed)"),
    },
    "station": {
        "cache_capacity": (_parse_int, 100, "cache slots per station"),
        "split_ratio": (_parse_float, 0.8, "fraction of slots for the popular partition"),
        "p_const": (_parse_float, 0.5, "constant power draw while active"),
        "p_per_user": (_parse_float, 0.05, "incremental power per served user"),
        "p_sleep": (_parse_float, 0.01, "power draw while asleep"),
        "max_users": (_parse_int, 10, "radio cap on concurrently served users"),
        "rate_per_user_mbps": (_parse_float, 10.0, "per-user service rate"),
    },
    "policy": {
        "name": (_parse_str, "sustainable", "controller: sustainable or greedy"),
        "backhaul_files_per_epoch": (_parse_int, 50, "nominal popular-cache updates per epoch"),
        "backhaul_variability_min": (_parse_float, 0.5, "lower budget factor per epoch"),
        "backhaul_variability_max": (_parse_float, 1.0, "upper budget factor per epoch"),
        "prefetch_budget": (_parse_int, 2, "prefetch fetches per station per step"),
        "low_watermark": (_parse_float, 360.0, "battery level flagging best-effort deferral"),
        "high_watermark": (_parse_float, 3240.0, "battery level enabling content pushing"),
        "greedy_partial": (_parse_bool, False, "let the greedy baseline degrade gracefully"),
    },
    "engine": {
        "delta_large": (_parse_int, 900, "planning epoch in seconds"),
        "delta_small": (_parse_int, 1, "service step in seconds"),
        "duration": (_parse_int, 86400, "run length in seconds"),
        "seed": (_parse_int, 42, "random seed"),
        "workers": (_parse_int, 1, "parallel processes for sweeps and batches"),
        "cache_sizes": (_parse_int_list, DEFAULT_CACHE_SIZES, "sizes visited by sweep-cache"),
    },
}


def describe_schema() -> str:
    """One line per key: section.key, default, and meaning."""
    lines = []
    for section, keys in SCHEMA.items():
        for key, (_, default, doc) in keys.items():
            if isinstance(default, tuple):
                shown = ",".join(str(v) for v in default)
            else:
                shown = str(default)
            lines.append(f"{section}.{key} = {shown}  # {doc}")
    return "\n".join(lines)


def _parse_lines(text: str) -> dict[tuple[str, str], object]:
    values: dict[tuple[str, str], object] = {}
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SCHEMA:
                known = ", ".join(SCHEMA)
                raise ConfigError(
                    f"line {lineno}: unknown section [{section}] (known: {known})"
                )
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown key {key!r} in section [{section}]")
        parser = SCHEMA[section][key][0]
        try:
            values[(section, key)] = parser(raw_value)
        except ValueError as exc:
            raise ConfigError(
                f"line {lineno}: bad value for {section}.{key}: {raw_value!r} ({exc})"
            ) from None
    return values


def _apply_overrides(
    values: dict[tuple[str, str], object], overrides: tuple[str, ...]
) -> None:
    for spec in overrides:
        head, eq, raw_value = spec.partition("=")
        if not eq:
            raise ConfigError(f"override {spec!r}: expected section.key=value")
        section, dot, key = head.strip().partition(".")
        key = key.strip()
        if not dot or not section or not key:
            raise ConfigError(f"override {spec!r}: expected section.key=value")
        if section not in SCHEMA:
            raise ConfigError(f"override {spec!r}: unknown section [{section}]")
        if key not in SCHEMA[section]:
            raise ConfigError(f"override {spec!r}: unknown key {key!r} in section [{section}]")
        parser = SCHEMA[section][key][0]
        try:
            values[(section, key)] = parser(raw_value.strip())
        except ValueError as exc:
            raise ConfigError(
                f"override {spec!r}: bad value for {section}.{key} ({exc})"
            ) from None


def parse_settings(text: str, overrides: tuple[str, ...] = ()) -> RunSettings:
    """Parse config text plus command-line overrides into run settings.

    Overrides use ``section.key=value`` and take precedence over file
    values, which take precedence over defaults.
    """
    values = _parse_lines(text)
    _apply_overrides(values, tuple(overrides))

    def get(section: str, key: str):
        return values.get((section, key), SCHEMA[section][key][1])

    try:
        highway = Highway(
            n_stations=get("highway", "n_stations"),
            cell_length=2.0 * get("highway", "coverage_radius_m"),
        )
        traffic = TrafficProfile(
            base_density=get("traffic", "base_density"),
            enabled=get("traffic", "daily_profile"),
            peak_hours=(
                get("traffic", "peak_hour_morning"),
                get("traffic", "peak_hour_evening"),
            ),
            peak_width_h=get("traffic", "peak_width_h"),
            floor_fraction=get("traffic", "floor_fraction"),
        )
        energy = EnergyProfile(
            kind=get("energy", "kind"),
            peak_rate=get("energy", "peak_rate"),
            sunrise_h=get("energy", "sunrise_h"),
            sunset_h=get("energy", "sunset_h"),
        )
        power = PowerModel(
            p_const=get("station", "p_const"),
            p_per_user=get("station", "p_per_user"),
            p_sleep=get("station", "p_sleep"),
            max_users=get("station", "max_users"),
            rate_per_user_mbps=get("station", "rate_per_user_mbps"),
        )
        backhaul = BackhaulBudget(
            files_per_epoch=get("policy", "backhaul_files_per_epoch"),
            variability=(
                get("policy", "backhaul_variability_min"),
                get("policy", "backhaul_variability_max"),
            ),
        )
        scenario = Scenario(
            highway=highway,
            n_files=get("catalog", "n_files"),
            gamma=get("catalog", "gamma"),
            traffic=traffic,
            speed=get("traffic", "speed_mps"),
            energy=energy,
            battery_capacity=get("energy", "battery_capacity"),
            power=power,
            cache_capacity=get("station", "cache_capacity"),
            split_ratio=get("station", "split_ratio"),
            backhaul=backhaul,
            prefetch_budget=get("policy", "prefetch_budget"),
            low_watermark=get("policy", "low_watermark"),
            high_watermark=get("policy", "high_watermark"),
            greedy_partial=get("policy", "greedy_partial"),
            policy=get("policy", "name"),
            epoch_seconds=get("engine", "delta_large"),
            step_seconds=get("engine", "delta_small"),
            duration=get("engine", "duration"),
            seed=get("engine", "seed"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    workers = get("engine", "workers")
    if workers < 1:
        raise ConfigError("engine.workers must be >= 1")
    cache_sizes = tuple(get("engine", "cache_sizes"))
    if any(c < 0 for c in cache_sizes):
        raise ConfigError("engine.cache_sizes entries must be >= 0")
    return RunSettings(scenario=scenario, cache_sizes=cache_sizes, workers=workers)


def parse_config(text: str) -> Scenario:
    """Parse config text alone into a scenario (defaults fill the gaps)."""
    return parse_settings(text).scenario
