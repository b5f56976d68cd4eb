"""Run configuration and its flat ``key = value`` file format."""

from __future__ import annotations

import dataclasses
import enum
import hashlib
from dataclasses import dataclass
from typing import Iterable

from .dynamics import IndicatorMode
from .graph import FormatError, _lines


class EdgeGate(str, enum.Enum):
    OFF = "off"
    BERNOULLI = "bernoulli"


class EpsilonRule(str, enum.Enum):
    THRESHOLD = "threshold"


class Model(str, enum.Enum):
    UAPE = "uape"
    IC = "ic"


@dataclass(frozen=True)
class SimulationConfig:
    """Everything that determines a run besides the graph and initial attitudes.

    ``topic=None`` runs every topic in turn over shared state. ``ic_probability``
    only applies to the IC baseline; ``None`` there means per-edge weights.
    """

    rounds: int = 10
    topic: int | None = None
    rng_seed: int = 0
    indicator_mode: IndicatorMode = IndicatorMode.XOR_INDICATOR
    initial_persistence: float = 0.5
    epsilon_rule: EpsilonRule = EpsilonRule.THRESHOLD
    edge_gate: EdgeGate = EdgeGate.OFF
    global_edge_probability: float = 1.0
    monte_carlo_runs: int = 1
    model: Model = Model.UAPE
    ic_probability: float | None = None

    def __post_init__(self):
        for name, kind in (("indicator_mode", IndicatorMode), ("epsilon_rule", EpsilonRule),
                           ("edge_gate", EdgeGate), ("model", Model)):
            object.__setattr__(self, name, kind(getattr(self, name)))
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.topic is not None and self.topic < 0:
            raise ValueError("topic must be a non-negative index or None for all topics")
        if self.monte_carlo_runs < 1:
            raise ValueError("monte_carlo_runs must be >= 1")
        for name in ("initial_persistence", "global_edge_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.ic_probability is not None and not 0.0 <= self.ic_probability <= 1.0:
            raise ValueError("ic_probability must lie in [0, 1]")

    def replace(self, **changes) -> SimulationConfig:
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        """Canonical serialization with every key materialized."""
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                text = "all" if f.name == "topic" else "edge"
            else:
                text = _format_value(value)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()


def _format_value(value) -> str:
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_int(text: str) -> int:
    return int(text)


def _parse_topic(text: str) -> int | None:
    return None if text.lower() in ("all", "none", "") else int(text)


def _parse_optional_float(text: str) -> float | None:
    return None if text.lower() in ("none", "edge", "") else float(text)


_PARSERS = {
    "rounds": _parse_int,
    "topic": _parse_topic,
    "rng_seed": _parse_int,
    "indicator_mode": IndicatorMode,
    "initial_persistence": float,
    "epsilon_rule": EpsilonRule,
    "edge_gate": EdgeGate,
    "global_edge_probability": float,
    "monte_carlo_runs": _parse_int,
    "model": Model,
    "ic_probability": _parse_optional_float,
}


def parse_config(stream: Iterable[str] | str, base: SimulationConfig | None = None) -> SimulationConfig:
    """Parse ``key = value`` lines; unknown or repeated keys are errors."""
    values = {}
    for lineno, raw in enumerate(_lines(stream), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
        elif ":" in line:
            key, _, value = line.partition(":")
        else:
            raise FormatError(f"expected 'key = value', got {line!r}", lineno)
        key, value = key.strip(), value.strip()
        if key not in _PARSERS:
            raise FormatError(f"unknown config key {key!r}", lineno)
        if key in values:
            raise FormatError(f"config key {key!r} given twice", lineno)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError:
            raise FormatError(f"bad value {value!r} for config key {key!r}", lineno) from None
    try:
        return dataclasses.replace(base or SimulationConfig(), **values)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
