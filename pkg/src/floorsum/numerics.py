"""Certified values and compensated (Neumaier) summation."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Iterable, Union

import numba
import numpy as np

EPS = sys.float_info.epsilon
# Per-term allowance, in units of EPS, for rounding inside a summand
# (one pow, up to two products, one int->float conversion) plus the
# compensated accumulation itself.
CERT_FACTOR = 2.0

Number = Union[int, float]


@dataclass(frozen=True)
class CertifiedValue:
    """A value together with a rigorous bound on its absolute error.

    Exact integer results carry ``abs_error == 0``.
    """

    value: Number
    abs_error: float = 0.0
    terms: int = 0

    def __post_init__(self) -> None:
        if self.abs_error < 0 or math.isnan(self.abs_error):
            raise ValueError("abs_error must be a non-negative number")

    @property
    def exact(self) -> bool:
        return isinstance(self.value, int) and self.abs_error == 0

    @property
    def lo(self) -> float:
        return float(self.value) - self.abs_error

    @property
    def hi(self) -> float:
        return float(self.value) + self.abs_error

    def contains(self, other: Number) -> bool:
        return abs(float(other) - float(self.value)) <= self.abs_error

    def __float__(self) -> float:
        return float(self.value)


def rounding_certificate(terms: int, abs_sum: float) -> float:
    """Error bound for a float sum of ``terms`` summands with absolute sum ``abs_sum``."""
    return CERT_FACTOR * (terms + 1) * EPS * abs_sum


class NeumaierSum:
    """Running compensated sum that also tracks the absolute sum of inputs."""

    __slots__ = ("_s", "_c", "abs_sum", "terms")

    def __init__(self) -> None:
        self._s = 0.0
        self._c = 0.0
        self.abs_sum = 0.0
        self.terms = 0

    def add(self, x: float) -> None:
        s = self._s
        t = s + x
        if abs(s) >= abs(x):
            self._c += (s - t) + x
        else:
            self._c += (x - t) + s
        self._s = t
        self.abs_sum += abs(x)
        self.terms += 1

    def extend(self, xs: Iterable[float]) -> None:
        for x in xs:
            self.add(x)

    def merge(self, total: float, abs_sum: float, terms: int) -> None:
        """Fold in a partial result produced by :func:`neumaier_array`."""
        self.add(total)
        self.abs_sum += abs_sum - abs(total)
        self.terms += terms - 1

    @property
    def value(self) -> float:
        return self._s + self._c

    def certified(self) -> CertifiedValue:
        return CertifiedValue(
            self.value, rounding_certificate(self.terms, self.abs_sum), self.terms
        )


@numba.njit(cache=True)
def neumaier_array(xs):
    """Compensated sum of a float array; returns ``(sum, abs_sum)``."""
    s = 0.0
    c = 0.0
    a = 0.0
    for i in range(xs.shape[0]):
        x = xs[i]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        a += abs(x)
    return s + c, a


def certified_array_sum(xs: np.ndarray) -> CertifiedValue:
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    total, abs_sum = neumaier_array(xs)
    n = int(xs.shape[0])
    return CertifiedValue(float(total), rounding_certificate(n, float(abs_sum)), n)
