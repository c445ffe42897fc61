"""Affine calibration from normalized glove position readings to fingertip distance.

The glove reports each digit's flexion as a reading in ``[0, 1]``. With the
finger held in a fixed pose the thumb-to-index distance is close to affine in
that reading, so a least-squares line is enough to turn readings into
millimetres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _csvio
from .errors import DegenerateInput, MalformedRow, OutOfRange, TooFewSamples

CSV_HEADER = ("reading", "distance_mm")

DEFAULT_SLOPE_MM = 86.2
DEFAULT_INTERCEPT_MM = 3.1


@dataclass(frozen=True)
class CalSample:
    reading: float
    distance: float

    def __post_init__(self):
        if not 0.0 <= self.reading <= 1.0:
            raise OutOfRange(f"reading {self.reading} outside [0, 1]")
        if not (math.isfinite(self.distance) and self.distance >= 0.0):
            raise OutOfRange(f"distance {self.distance} must be finite and >= 0")


@dataclass(frozen=True)
class LinearMap:
    slope: float
    intercept: float
    reading_range: tuple[float, float] = (0.0, 1.0)
    r_squared: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.slope) or self.slope == 0.0:
            raise DegenerateInput(f"slope must be finite and nonzero, got {self.slope}")
        lo, hi = self.reading_range
        if not 0.0 <= lo < hi <= 1.0:
            raise OutOfRange(f"reading_range {self.reading_range} must satisfy 0 <= lo < hi <= 1")
        if not 0.0 <= self.r_squared <= 1.0:
            raise OutOfRange(f"r_squared {self.r_squared} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "reading_range": list(self.reading_range),
            "r_squared": self.r_squared,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearMap":
        return cls(
            slope=float(d["slope"]),
            intercept=float(d["intercept"]),
            reading_range=tuple(d.get("reading_range", (0.0, 1.0))),
            r_squared=float(d.get("r_squared", 1.0)),
        )


DEFAULT_MAP = LinearMap(DEFAULT_SLOPE_MM, DEFAULT_INTERCEPT_MM)

_EDGE_TOL = 1e-12


def ols_line(x, y) -> tuple[float, float, float]:
    """Ordinary least-squares line ``y = slope * x + intercept``.

    Returns ``(slope, intercept, r_squared)``. Raises :class:`TooFewSamples`
    for fewer than two points and :class:`DegenerateInput` when ``x`` has no
    spread.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise TooFewSamples(f"need at least 2 samples, got {x.size}")
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0 or np.ptp(x) == 0.0:
        raise DegenerateInput("zero variance in the independent variable")
    slope = float(dx @ (y - ym)) / sxx
    intercept = float(ym - slope * xm)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    dy = y - ym
    ss_tot = float(dy @ dy)
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return slope, intercept, r2


def fit_line(samples: Sequence[CalSample]) -> LinearMap:
    if len(samples) < 2:
        raise TooFewSamples(f"need at least 2 calibration samples, got {len(samples)}")
    r = np.array([s.reading for s in samples])
    d = np.array([s.distance for s in samples])
    slope, intercept, r2 = ols_line(r, d)
    if slope == 0.0:
        raise DegenerateInput("fitted slope is zero; distance does not depend on reading")
    return LinearMap(slope, intercept, (float(r.min()), float(r.max())), r2)


def reading_to_distance(cal: LinearMap, reading: float) -> float:
    if not 0.0 <= reading <= 1.0:
        raise OutOfRange(f"reading {reading} outside [0, 1]")
    return cal.slope * reading + cal.intercept


def distance_to_reading(cal: LinearMap, distance: float) -> float:
    reading = (distance - cal.intercept) / cal.slope
    # image endpoints may land a rounding step outside [0, 1]
    if -_EDGE_TOL <= reading < 0.0:
        reading = 0.0
    elif 1.0 < reading <= 1.0 + _EDGE_TOL:
        reading = 1.0
    if not 0.0 <= reading <= 1.0:
        raise OutOfRange(
            f"distance {distance} mm maps to reading {reading:.6g}, outside [0, 1]"
        )
    return reading


def load_samples(source) -> list[CalSample]:
    """Read ``reading,distance_mm`` CSV from a path, text, or open stream."""
    samples = []
    for lineno, (r, d) in _csvio.read_columns(source, CSV_HEADER, with_lines=True):
        try:
            samples.append(CalSample(r, d))
        except OutOfRange as exc:
            raise MalformedRow(lineno, str(exc)) from None
    return samples


def dump_samples(samples: Iterable[CalSample]) -> str:
    return _csvio.write_columns(CSV_HEADER, ((s.reading, s.distance) for s in samples))
