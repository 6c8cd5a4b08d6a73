"""Generic hyperbolic geodesics as continued-fraction digit streams.

A geodesic entering the Farey tessellation through the imaginary axis is
coded by the continued fraction digits of its positive endpoint: runs of
left/right triangle crossings alternate, and the k-th run length is the
k-th digit.  Iterating the Gauss map x -> 1/x - floor(1/x) on a random
starting point produces exactly this digit process with the correct
correlations; starting points are drawn from the invariant density
1/((1+x) ln 2) itself (inverse CDF 2^u - 1), so restarts are stationary
for the digit process and do not bias its statistics.  Any absolutely
continuous start is generic here.

Each digit carries the hyperbolic time 2 ln(1/x) of the suspension roof
function; Birkhoff averages against it normalize the exponents per unit
geodesic length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

#: refresh unconditionally before x would produce a digit >= 2^31
_DIGIT_CAP_X = 2.0 ** -31


class DigitEvent(NamedTuple):
    digit: int           # continued fraction digit, >= 1
    letter: str          # "L" or "R", alternating within one orbit
    roof_time: float     # 2 ln(1/x) attributed to this digit
    refreshed: bool      # True when the digit came from a freshly sampled x


@dataclass
class GaussState:
    """Mutable state of one simulated geodesic.

    Double precision loses about log2(digit) bits per Gauss step, so the
    orbit is restarted from a fresh uniform point every refresh_period
    digits (or earlier if x falls below the guard).  Restarting costs a
    bounded transport discrepancy per segment, far below the statistical
    error at realistic run lengths.
    """

    rng: np.random.Generator
    refresh_period: int = 32
    guard: float = 1e-9
    x: float = 0.0
    digits_since_refresh: int = 0
    phase: int = 0          # 0 -> next letter L, 1 -> next letter R
    started: bool = False

    @classmethod
    def from_seed(cls, seed: int, refresh_period: int = 32, guard: float = 1e-9) -> "GaussState":
        return cls(rng=np.random.default_rng(seed),
                   refresh_period=refresh_period, guard=guard)

    def _fresh_x(self) -> float:
        # inverse CDF of the Gauss measure: u uniform -> 2^u - 1
        x = 2.0 ** self.rng.random() - 1.0
        while not (self.guard <= x < 1.0):
            x = 2.0 ** self.rng.random() - 1.0
        return x


def gauss_step(state: GaussState) -> DigitEvent:
    """Emit one digit and advance the Gauss orbit.

    Resamples x from the invariant density (marking the event as
    refreshed and resetting the letter phase to L) when the refresh
    period is reached or the previous step left x below the guard.
    """
    refreshed = False
    if (not state.started
            or state.digits_since_refresh >= state.refresh_period
            or state.x < max(state.guard, _DIGIT_CAP_X)):
        state.x = state._fresh_x()
        state.digits_since_refresh = 0
        state.phase = 0
        state.started = True
        refreshed = True
    inv = 1.0 / state.x
    digit = int(inv)
    roof_time = 2.0 * math.log(inv)
    state.x = inv - digit
    letter = "L" if state.phase == 0 else "R"
    state.phase ^= 1
    state.digits_since_refresh += 1
    return DigitEvent(digit, letter, roof_time, refreshed)


def digit_stream(seed: int, count: int,
                 refresh_period: int = 32, guard: float = 1e-9) -> Iterator[DigitEvent]:
    """Deterministic stream of `count` digit events for a given seed."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    state = GaussState.from_seed(seed, refresh_period, guard)
    for _ in range(count):
        yield gauss_step(state)


def gauss_kuzmin(k: int) -> float:
    """Asymptotic frequency log2(1 + 1/(k(k+2))) of the digit k."""
    return math.log2(1.0 + 1.0 / (k * (k + 2)))


#: Gauss-measure mean of the roof function, pi^2 / (6 ln 2)
LEVY_MEAN_ROOF = math.pi ** 2 / (6.0 * math.log(2.0))
