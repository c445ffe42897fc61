"""Deterministic stand-ins for the glove, tracker, and a human operator.

Everything here is synthetic: rigid poses for tracker/world alignment,
scripted scan sessions generated from a ground-truth arm profile, and noisy
spring compression traces. Random streams are created per call from the
caller's seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _csvio
from .calib import LinearMap, distance_to_reading
from .elasticity import SENSOR_CAP_N, ForceDisplacementTrace
from .errors import InvalidRotation, MalformedRow, NonPositiveInput, OutOfRange

ORTHO_TOL = 1e-9
READING_QUANTUM = 0.01
TRACE_HEADER = ("t_s", "x_mm", "f_n")


@dataclass(frozen=True, eq=False)
class RigidTransform:
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if not np.all(np.isfinite(R)) or not np.all(np.isfinite(t)):
            raise InvalidRotation("pose contains non-finite values")
        if np.max(np.abs(R.T @ R - np.eye(3))) > ORTHO_TOL:
            raise InvalidRotation("rotation is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > ORTHO_TOL:
            raise InvalidRotation("rotation has determinant -1 (reflection)")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def __matmul__(self, other: "RigidTransform") -> "RigidTransform":
        """``(self @ other)(p) == self(other(p))``."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        Rt = self.rotation.T
        return RigidTransform(Rt, -Rt @ self.translation)

    def apply(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.rotation.T + self.translation


def rotation_about_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def random_pose(rng: np.random.Generator, max_translation: float = 500.0) -> RigidTransform:
    # QR of a Gaussian matrix with sign fix gives a Haar-uniform rotation
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return RigidTransform(q, rng.uniform(-max_translation, max_translation, 3))


def sync_frames(tracker_pose: RigidTransform, world_pose: RigidTransform) -> RigidTransform:
    """Correction ``T`` with ``T @ tracker_pose == world_pose``.

    Computed at the moment the user's hand rests on the virtual hand model,
    when the tracked palm pose and the model's world pose coincide.
    """
    return world_pose @ tracker_pose.inverse()


@dataclass(frozen=True)
class GloveState:
    digit_readings: tuple[float, float, float, float, float]
    palm_pose: RigidTransform

    def __post_init__(self):
        if len(self.digit_readings) != 5:
            raise ValueError("expected five digit readings (thumb..little)")
        for r in self.digit_readings:
            if not 0.0 <= r <= 1.0:
                raise OutOfRange(f"digit reading {r} outside [0, 1]")

    @property
    def index_reading(self) -> float:
        return self.digit_readings[1]

    def in_world(self, sync: RigidTransform) -> "GloveState":
        return GloveState(self.digit_readings, sync @ self.palm_pose)


@dataclass(frozen=True)
class Station:
    z_mm: float
    width_mm: float
    height_mm: float


@dataclass(frozen=True)
class ArmProfile:
    stations: tuple[Station, ...]

    def __post_init__(self):
        zs = [s.z_mm for s in self.stations]
        if any(b <= a for a, b in zip(zs, zs[1:])):
            raise OutOfRange("station positions must be strictly increasing")
        for s in self.stations:
            if not (s.width_mm >= s.height_mm > 0.0):
                raise OutOfRange(f"station at z={s.z_mm}: need width >= height > 0")

    @classmethod
    def from_json(cls, source) -> "ArmProfile":
        if isinstance(source, (str, Path)):
            data = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            data = json.load(source)
        return cls(tuple(Station(float(d["z_mm"]), float(d["width_mm"]), float(d["height_mm"])) for d in data))

    def to_json(self) -> str:
        rows = [{"z_mm": s.z_mm, "width_mm": s.width_mm, "height_mm": s.height_mm} for s in self.stations]
        return json.dumps(rows, indent=2) + "\n"


def quantize_reading(reading: float, quantum: float = READING_QUANTUM) -> float:
    steps = round(1.0 / quantum)
    return round(reading * steps) / steps


def scripted_scan_session(
    profile: ArmProfile,
    calibration: LinearMap,
    quantum: float = READING_QUANTUM,
) -> list[dict]:
    """Scan-script events an operator would produce for ``profile``."""
    events: list[dict] = []
    for st in profile.stations:
        w = quantize_reading(distance_to_reading(calibration, st.width_mm), quantum)
        h = quantize_reading(distance_to_reading(calibration, st.height_mm), quantum)
        events += [
            {"type": "pinch", "reading": w},
            {"type": "command", "token": "vertical"},
            {"type": "pinch", "reading": h},
            {"type": "command", "token": "next"},
        ]
    events.append({"type": "command", "token": "done"})
    return events


def synth_spring_trace(
    k: float,
    cycles: int = 3,
    peak_x: float = 20.0,
    sigma_f: float = 0.0,
    sigma_x: float = 0.0,
    seed: int = 0,
    samples_per_cycle: int = 200,
    dt: float = 0.01,
) -> ForceDisplacementTrace:
    """Triangle-wave compressions of a Hooke spring with Gaussian sensor noise.

    Both channels are clipped into their valid ranges after noise is added.
    """
    if not (k > 0.0 and cycles >= 1 and peak_x > 0.0 and samples_per_cycle >= 2):
        raise NonPositiveInput("k, cycles, peak_x and samples_per_cycle must be positive")
    if sigma_f < 0.0 or sigma_x < 0.0:
        raise NonPositiveInput("noise levels must be >= 0")
    rng = np.random.default_rng(seed)
    n = cycles * samples_per_cycle + 1
    phase = (np.arange(n) % samples_per_cycle) / samples_per_cycle
    x = peak_x * (1.0 - np.abs(2.0 * phase - 1.0))
    x[-1] = 0.0
    f = k * x
    x_noisy = np.clip(x + rng.normal(0.0, sigma_x, n), 0.0, None) if sigma_x else x
    f_noisy = np.clip(f + rng.normal(0.0, sigma_f, n), 0.0, SENSOR_CAP_N) if sigma_f else np.clip(f, 0.0, SENSOR_CAP_N)
    return ForceDisplacementTrace(np.arange(n) * dt, x_noisy, f_noisy)


def save_trace(trace: ForceDisplacementTrace, path=None) -> str:
    text = _csvio.write_columns(TRACE_HEADER, trace.rows())
    if path is not None:
        Path(path).write_text(text, encoding="utf-8", newline="\n")
    return text


def load_trace(source) -> ForceDisplacementTrace:
    rows = _csvio.read_columns(source, TRACE_HEADER, with_lines=True)
    if not rows:
        return ForceDisplacementTrace.empty()
    try:
        return ForceDisplacementTrace.from_rows(v for _, v in rows)
    except OutOfRange as exc:
        raise MalformedRow(_first_bad_line(rows), str(exc)) from None


def _first_bad_line(rows: Sequence) -> int:
    prev_t = None
    for lineno, (t, x, f) in rows:
        if (prev_t is not None and t <= prev_t) or x < 0.0 or not 0.0 <= f <= SENSOR_CAP_N:
            return lineno
        prev_t = t
    return rows[0][0]
