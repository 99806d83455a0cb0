"""Scalar and vector field descriptors on the unit interval / unit square.

A field is called with an ``(m, d)`` array of points and returns ``(m,)``
values (``(m, 2)`` for vector fields). Descriptors are frozen dataclasses so
they can be compared, hashed and printed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return x


@dataclass(frozen=True)
class ConstantField:
    value: float

    def __call__(self, x):
        return np.full(_points(x).shape[0], float(self.value))


@dataclass(frozen=True)
class SineModeField:
    """``amplitude * prod_k sin(freqs[k] * pi * x_k)``."""

    amplitude: float
    freqs: tuple[int, ...]

    def __call__(self, x):
        x = _points(x)
        if x.shape[1] != len(self.freqs):
            raise ValueError(f"field is {len(self.freqs)}D, points are {x.shape[1]}D")
        out = np.full(x.shape[0], float(self.amplitude))
        for k, f in enumerate(self.freqs):
            out *= np.sin(f * np.pi * x[:, k])
        return out


@dataclass(frozen=True)
class CellIndicatorField:
    """``amplitude`` on ``lo <= x_axis < hi`` (``hi`` inclusive when it is 1), zero elsewhere."""

    amplitude: float
    lo: float
    hi: float
    axis: int = 0

    def __call__(self, x):
        x = _points(x)[:, self.axis]
        upper = x <= self.hi if self.hi >= 1.0 else x < self.hi
        return np.where((x >= self.lo) & upper, float(self.amplitude), 0.0)


@dataclass(frozen=True)
class SumField:
    """Pointwise linear combination of fields."""

    parts: tuple
    coeffs: tuple[float, ...]

    def __call__(self, x):
        out = np.zeros(_points(x).shape[0])
        for c, f in zip(self.coeffs, self.parts):
            out += c * f(x)
        return out


@dataclass(frozen=True)
class ConstantVectorField:
    value: tuple[float, float]

    def __call__(self, x):
        n = _points(x).shape[0]
        return np.tile(np.asarray(self.value, dtype=float), (n, 1))


@dataclass(frozen=True)
class CallableField:
    """Wraps an arbitrary callable; used for ad-hoc weights."""

    func: object

    def __call__(self, x):
        return np.asarray(self.func(_points(x)), dtype=float)
