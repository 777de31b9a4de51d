"""Evidence kinds accepted by posterior queries and the sampling oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union


@dataclass(frozen=True)
class StateObservation:
    """A discrete node observed in a named state."""

    label: str


@dataclass(frozen=True)
class ValueObservation:
    """A continuous node observed at an exact numeric value."""

    value: float


@dataclass(frozen=True)
class CountObservation:
    """Observed success count for a Binomial-distributed count node."""

    count: int


Observation = Union[StateObservation, ValueObservation, CountObservation]
Evidence = Mapping[str, Observation]
