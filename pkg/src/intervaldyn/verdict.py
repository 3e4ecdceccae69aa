from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Optional

from .exactset import DEFAULT_COMPONENT_CAP
from .mapmodel import DEFAULT_PIECE_CAP


class Status(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNKNOWN = "Unknown"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Budget:
    """Resource caps shared by every check.  Exhausting one never raises
    out of a check; it shows up as an Unknown verdict or an unconverged hull."""

    hull_iterations: int = 512
    components: int = DEFAULT_COMPONENT_CAP
    pieces: int = DEFAULT_PIECE_CAP
    family_depth: int = 20
    orbit_bits: int = 4096


DEFAULT_BUDGET = Budget()


@dataclass
class Verdict:
    """Outcome of one property check.

    ``Fails`` always carries a witness that can be re-checked with exact
    operations.  ``Holds`` with ``certified=False`` is only claimed at
    ``resolution``; ``Unknown`` means some budget ran out first.
    """

    property: str
    status: Status
    certified: bool = False
    resolution: Optional[int] = None
    witness: Optional[dict[str, Any]] = None
    budget_used: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.status is Status.FAILS and self.witness is None:
            raise ValueError(f"{self.property}: a Fails verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    @property
    def decided(self) -> bool:
        return self.status is not Status.UNKNOWN


def conjunction(a: Status, b: Status) -> Status:
    if Status.FAILS in (a, b):
        return Status.FAILS
    if a is Status.HOLDS and b is Status.HOLDS:
        return Status.HOLDS
    return Status.UNKNOWN


class PreconditionError(ValueError):
    pass


class InternalConsistencyError(RuntimeError):
    pass
