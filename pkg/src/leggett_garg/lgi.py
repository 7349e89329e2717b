"""The four-correlator Leggett-Garg combination and its evaluation record."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

__all__ = ["LGI_BOUND", "QUANTUM_BOUND", "LgiEvaluation", "combine", "violation_ratio"]

LGI_BOUND = 2.0
QUANTUM_BOUND = 2.0 * math.sqrt(2.0)


def combine(c12, c23, c34, c14):
    return c12 + c23 + c34 - c14


def violation_ratio(c_value):
    """Fraction by which ``c_value`` exceeds the realist bound of 2."""
    return (c_value - LGI_BOUND) / LGI_BOUND


@dataclass(frozen=True)
class LgiEvaluation:
    """
    C = C12 + C23 + C34 - C14 together with its components.

    Fields may be floats or equally shaped arrays when evaluated on a grid.
    ``point`` records the parameters that produced the value (a TimeQuad,
    or a dict of grid coordinates).
    """

    c12: Any
    c23: Any
    c34: Any
    c14: Any
    point: Any = None

    @property
    def c(self):
        return combine(self.c12, self.c23, self.c34, self.c14)

    @property
    def violates(self):
        return self.c > LGI_BOUND

    @property
    def ratio(self):
        return violation_ratio(self.c)
