"""Parameter lists of the hypergeometric equation, reduced mod 1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidParams


def parse_parameter(text: str) -> float:
    """Parse a decimal or rational string ("0.25", "1/12") into a float.

    Rational strings are reduced exactly as fractions before the single
    conversion to binary floating point.
    """
    s = str(text).strip()
    if "/" in s:
        return float(Fraction(s))
    return float(s)


def reduce_mod_one(values: Iterable[float]) -> tuple[float, ...]:
    """Reduce every value to the half-open interval [0, 1)."""
    return tuple(v - math.floor(v) for v in values)


@dataclass(frozen=True)
class HGParams:
    """The two parameter lists of the rank-n hypergeometric equation.

    Values are stored reduced to [0, 1); the monodromy only depends on
    the classes mod 1.  All 2n reduced values must be pairwise distinct,
    which the generic monodromy construction requires.
    """

    alpha: tuple[float, ...]
    beta: tuple[float, ...]

    def __init__(self, alpha: Sequence[float], beta: Sequence[float]):
        a = reduce_mod_one(float(v) for v in alpha)
        b = reduce_mod_one(float(v) for v in beta)
        if len(a) < 1:
            raise InvalidParams("need at least one parameter pair")
        if len(a) != len(b):
            raise InvalidParams(
                f"alpha and beta must have equal length, got {len(a)} and {len(b)}"
            )
        combined = a + b
        if len(set(combined)) != len(combined):
            raise InvalidParams(
                f"reduced parameters must be pairwise distinct, got {combined}"
            )
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def n(self) -> int:
        return len(self.alpha)

    @classmethod
    def from_strings(cls, alpha: Sequence[str], beta: Sequence[str]) -> "HGParams":
        return cls([parse_parameter(s) for s in alpha], [parse_parameter(s) for s in beta])

    def shifted(self, delta: float) -> "HGParams":
        """Translate every parameter by delta (mod 1)."""
        return HGParams([a + delta for a in self.alpha], [b + delta for b in self.beta])
