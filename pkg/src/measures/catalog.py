"""The eight reliability measures and how each one orders instances for rejection."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Tuple

from src.evaluation.arc import Direction


class MeasureKind(Enum):
    UNCERTAINTY = "uncertainty"
    ROBUSTNESS = "robustness"


class Measure(Enum):
    """Measure ids as they appear in configs and reports."""

    U_MAX = "u_max"
    U_CONF = "u_conf"
    U_H = "u_H"
    U_T = "u_t"
    U_A = "u_a"
    U_E = "u_e"
    R_GLOB = "r_glob"
    R_LOC = "r_loc"

    @property
    def kind(self) -> MeasureKind:
        return MeasureKind.ROBUSTNESS if self in (Measure.R_GLOB, Measure.R_LOC) else MeasureKind.UNCERTAINTY

    @property
    def higher_is_reliable(self) -> bool:
        """True for the margin of confidence and both robustness measures."""
        return self in (Measure.U_CONF, Measure.R_GLOB, Measure.R_LOC)

    @property
    def direction(self) -> Direction:
        """Less reliable first: high values first unless higher means more reliable."""
        return Direction.REJECT_LOW_FIRST if self.higher_is_reliable else Direction.REJECT_HIGH_FIRST

    @property
    def needs_ensemble(self) -> bool:
        return self in ENSEMBLE_MEASURES

    @classmethod
    def parse(cls, text: str) -> "Measure":
        """Case-insensitive lookup by id, e.g. ``"u_h"`` -> ``Measure.U_H``."""
        wanted = text.strip().lower()
        for measure in cls:
            if measure.value.lower() == wanted:
                return measure
        raise ValueError(f"Unknown measure '{text}'. Known: {', '.join(m.value for m in cls)}")


ALL_MEASURES: Tuple[Measure, ...] = tuple(Measure)
ENSEMBLE_MEASURES = frozenset({Measure.U_T, Measure.U_A, Measure.U_E})


def parse_measures(names: Iterable[str]) -> List[Measure]:
    """Parse measure ids, keeping catalogue order; an empty input selects all eight."""
    chosen = {Measure.parse(name) for name in names}
    return [m for m in ALL_MEASURES if m in chosen] if chosen else list(ALL_MEASURES)


@dataclass(frozen=True, slots=True)
class ReliabilityValue:
    """One measure's value for one instance."""

    measure: Measure
    value: float

    @property
    def orientation(self) -> str:
        return "higher = more reliable" if self.measure.higher_is_reliable else "higher = less reliable"


@dataclass(frozen=True, slots=True)
class UncertaintyValue(ReliabilityValue):
    def __post_init__(self) -> None:
        if self.measure.kind is not MeasureKind.UNCERTAINTY:
            raise ValueError(f"{self.measure.value} is not an uncertainty measure")


@dataclass(frozen=True, slots=True)
class RobustnessValue(ReliabilityValue):
    def __post_init__(self) -> None:
        if self.measure.kind is not MeasureKind.ROBUSTNESS:
            raise ValueError(f"{self.measure.value} is not a robustness measure")
        if not (0.0 <= self.value < 1.0):
            raise ValueError(f"Robustness must lie in [0, 1), got {self.value}")


__all__ = [
    "MeasureKind",
    "Measure",
    "ALL_MEASURES",
    "ENSEMBLE_MEASURES",
    "parse_measures",
    "ReliabilityValue",
    "UncertaintyValue",
    "RobustnessValue",
]
