"""Spring-rate estimation and hysteresis analysis from force/displacement traces."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .calib import ols_line
from .errors import MissingPhase, NonPositiveInput, OutOfRange, TooFewSamples

SENSOR_CAP_N = 10.0
FLAT_TOLERANCE_MM = 0.05


@dataclass(frozen=True, eq=False)
class ForceDisplacementTrace:
    """Timestamped samples: ``t`` in s, ``x`` in mm from free length, ``f`` in N."""

    t: np.ndarray
    x: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).ravel()
        x = np.asarray(self.x, dtype=float).ravel()
        f = np.asarray(self.f, dtype=float).ravel()
        if not (len(t) == len(x) == len(f)):
            raise ValueError("t, x and f must have the same length")
        if len(t) > 1 and np.any(np.diff(t) <= 0.0):
            raise OutOfRange("timestamps must be strictly increasing")
        if np.any(x < 0.0):
            raise OutOfRange("displacement must be >= 0")
        if np.any(f < 0.0) or np.any(f > SENSOR_CAP_N):
            raise OutOfRange(f"force must lie in [0, {SENSOR_CAP_N}] N")
        for name, arr in (("t", t), ("x", x), ("f", f)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.t)

    @classmethod
    def from_rows(cls, rows) -> "ForceDisplacementTrace":
        arr = np.asarray(list(rows), dtype=float).reshape(-1, 3)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2])

    def rows(self) -> np.ndarray:
        return np.column_stack([self.t, self.x, self.f])

    @classmethod
    def empty(cls) -> "ForceDisplacementTrace":
        return cls(np.zeros(0), np.zeros(0), np.zeros(0))


@dataclass(frozen=True)
class SpringEstimate:
    k: float
    intercept: float
    r_squared: float


@dataclass(frozen=True)
class HysteresisReport:
    k_up: float
    k_down: float
    release_drop: float


class Direction(Enum):
    COMPRESSION = "compression"
    RELEASE = "release"
    FLAT = "flat"


@dataclass(frozen=True)
class Segment:
    start: int  # first sample index
    stop: int  # one past the last sample index
    direction: Direction


def estimate_spring_rate(trace: ForceDisplacementTrace) -> SpringEstimate:
    k, b, r2 = ols_line(trace.x, trace.f)
    return SpringEstimate(k, b, r2)


def segment_cycles(
    trace: ForceDisplacementTrace, flat_tol: float = FLAT_TOLERANCE_MM
) -> list[Segment]:
    """Split a trace into maximal monotone runs of displacement.

    A step with ``|dx| <= flat_tol`` is flat and joins the preceding run
    (or the following one at the start of the trace). The peak sample of a
    compression belongs to the compression; the release starts one sample
    later.
    """
    n = len(trace)
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    dx = np.diff(trace.x)
    step = np.where(dx > flat_tol, 1, np.where(dx < -flat_tol, -1, 0))
    moving = np.flatnonzero(step)
    if moving.size == 0:
        return [Segment(0, n, Direction.FLAT)]
    # forward-fill flats from the previous moving step; leading flats take the first
    filled = step.copy()
    last = step[moving[0]]
    for i in range(len(filled)):
        if filled[i] == 0:
            filled[i] = last
        else:
            last = filled[i]
    # sample j >= 1 inherits the label of the step that reached it
    labels = np.concatenate([[filled[0]], filled])
    cuts = np.flatnonzero(np.diff(labels)) + 1
    bounds = np.concatenate([[0], cuts, [n]])
    return [
        Segment(
            int(a),
            int(b),
            Direction.COMPRESSION if labels[a] > 0 else Direction.RELEASE,
        )
        for a, b in zip(bounds[:-1], bounds[1:])
    ]


def analyze_hysteresis(
    trace: ForceDisplacementTrace, flat_tol: float = FLAT_TOLERANCE_MM
) -> HysteresisReport:
    """Separate compression and release slopes and the force drop at each peak.

    ``k_up`` and ``k_down`` are single least-squares lines pooled over all
    compression (resp. release) samples. The drop at a peak is the gap
    between the two fitted lines at the peak displacement, averaged over
    every compression immediately followed by a release.
    """
    segs = segment_cycles(trace, flat_tol)
    up = [s for s in segs if s.direction is Direction.COMPRESSION]
    down = [s for s in segs if s.direction is Direction.RELEASE]
    if not up or not down:
        raise MissingPhase("trace needs at least one compression and one release")

    def pooled(group):
        idx = np.concatenate([np.arange(s.start, s.stop) for s in group])
        return ols_line(trace.x[idx], trace.f[idx])

    k_up, b_up, _ = pooled(up)
    k_down, b_down, _ = pooled(down)

    drops = []
    for cur, nxt in zip(segs[:-1], segs[1:]):
        if cur.direction is Direction.COMPRESSION and nxt.direction is Direction.RELEASE:
            xp = trace.x[cur.stop - 1]
            drops.append((k_up * xp + b_up) - (k_down * xp + b_down))
    drop = max(0.0, float(np.mean(drops))) if drops else 0.0
    return HysteresisReport(k_up, k_down, drop)


def spring_rate_from_modulus(G: float, d: float, D: float, n_coils: float) -> float:
    """Helical compression spring rate ``k = G d^4 / (8 n D^3)`` in N/mm."""
    _check_positive(G=G, d=d, D=D, n_coils=n_coils)
    return G * d**4 / (8.0 * n_coils * D**3)


def shear_modulus(k: float, d: float, D: float, n_coils: float) -> float:
    """Shear modulus in N/mm^2 from a measured rate and coil geometry."""
    _check_positive(k=k, d=d, D=D, n_coils=n_coils)
    return 8.0 * n_coils * k * D**3 / d**4


def _check_positive(**values):
    for name, v in values.items():
        if not v > 0.0:
            raise NonPositiveInput(f"{name} must be > 0, got {v}")
