"""Injectable monotonic clocks.

All timing in the harness goes through a clock object so that runs with a
mock clock are fully deterministic: chunk arrival is simulated by the
session driver and decode time by the backends.
"""

from __future__ import annotations

import time
from typing import Protocol, runtime_checkable


@runtime_checkable
class Clock(Protocol):
    def now(self) -> float: ...


class RealClock:
    """Wall time from time.monotonic."""

    def now(self) -> float:
        return time.monotonic()


class MockClock:
    """Manually advanced clock; never moves backwards."""

    def __init__(self, start: float = 0.0) -> None:
        self._now = start

    def now(self) -> float:
        return self._now

    def advance(self, dt: float) -> None:
        if dt < 0:
            raise ValueError(f"cannot advance a monotonic clock by {dt}")
        self._now += dt

    def advance_to(self, t: float) -> None:
        self._now = max(self._now, t)
