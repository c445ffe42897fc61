"""Limb contour capture with elliptic rings, ring lofting, and OBJ output.

A scan is a sequence of pinch readings and voice-command tokens. Each ring
is captured as a horizontal pinch (major axis) followed by a vertical pinch
(minor axis); consecutive rings are then lofted into a triangle band.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .calib import DEFAULT_MAP, LinearMap, reading_to_distance
from .errors import (
    InvalidRingSize,
    OutOfRange,
    ProtocolViolation,
    TooFewRings,
    UnknownToken,
)

DEFAULT_RING_SPACING_MM = 75.0
DEFAULT_VERTEX_COUNT = 64


@dataclass(frozen=True)
class EllipticRing:
    semi_major: float
    semi_minor: float
    axial_pos: float
    vertex_count: int = DEFAULT_VERTEX_COUNT

    def __post_init__(self):
        if not self.semi_minor > 0.0:
            raise OutOfRange(f"semi_minor must be > 0, got {self.semi_minor}")
        if self.semi_major < self.semi_minor:
            raise OutOfRange("semi_major must be >= semi_minor")
        if self.vertex_count < 3:
            raise InvalidRingSize(f"vertex_count must be >= 3, got {self.vertex_count}")


class Phase(Enum):
    AWAIT_HORIZONTAL = "AwaitHorizontal"
    AWAIT_VERTICAL = "AwaitVertical"
    DONE = "Done"


@dataclass(frozen=True)
class Pinch:
    reading: float


@dataclass(frozen=True)
class Command:
    token: str


ScanEvent = Union[Pinch, Command]

TOKENS = ("vertical", "next", "done")


@dataclass(frozen=True)
class ScanSession:
    rings: tuple[EllipticRing, ...] = ()
    phase: Phase = Phase.AWAIT_HORIZONTAL
    ring_spacing: float = DEFAULT_RING_SPACING_MM
    pending_width: float | None = None
    pending_height: float | None = None
    calibration: LinearMap = field(default=DEFAULT_MAP)

    def __post_init__(self):
        if not self.ring_spacing > 0.0:
            raise OutOfRange(f"ring_spacing must be > 0, got {self.ring_spacing}")


def scan_step(session: ScanSession, event: ScanEvent) -> ScanSession:
    """Advance the scan state machine by one event, returning a new session."""
    if session.phase is Phase.DONE:
        raise ProtocolViolation("scan already finished")

    if isinstance(event, Pinch):
        d = reading_to_distance(session.calibration, event.reading)
        # repeated pinches overwrite: the user adjusts until the ring fits
        if session.phase is Phase.AWAIT_HORIZONTAL:
            return replace(session, pending_width=d)
        return replace(session, pending_height=d)

    if not isinstance(event, Command):
        raise TypeError(f"unsupported scan event {event!r}")
    token = event.token.strip().lower()
    if token not in TOKENS:
        raise UnknownToken(f"unknown command token {event.token!r}")

    if token == "vertical":
        if session.phase is not Phase.AWAIT_HORIZONTAL:
            raise ProtocolViolation("'vertical' given twice for the same ring")
        if session.pending_width is None:
            raise ProtocolViolation("'vertical' before the horizontal pinch")
        return replace(session, phase=Phase.AWAIT_VERTICAL)

    if token == "next":
        if session.phase is not Phase.AWAIT_VERTICAL or session.pending_height is None:
            raise ProtocolViolation("'next' before both axes were captured")
        w, h = session.pending_width, session.pending_height
        major, minor = max(w, h) / 2.0, min(w, h) / 2.0
        ring = EllipticRing(major, minor, len(session.rings) * session.ring_spacing)
        return replace(
            session,
            rings=session.rings + (ring,),
            phase=Phase.AWAIT_HORIZONTAL,
            pending_width=None,
            pending_height=None,
        )

    # done
    if session.phase is not Phase.AWAIT_HORIZONTAL or session.pending_width is not None:
        raise ProtocolViolation("'done' with a partially captured ring")
    return replace(session, phase=Phase.DONE)


def parse_event(obj: dict) -> ScanEvent:
    kind = obj.get("type")
    if kind == "pinch":
        return Pinch(float(obj["reading"]))
    if kind == "command":
        return Command(str(obj["token"]))
    raise UnknownToken(f"unknown event type {kind!r}")


def event_to_json(event: ScanEvent) -> dict:
    if isinstance(event, Pinch):
        return {"type": "pinch", "reading": event.reading}
    return {"type": "command", "token": event.token}


def load_script(source) -> list[ScanEvent]:
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = json.load(source)
    if not isinstance(data, list):
        raise ProtocolViolation("scan script must be a JSON list of events")
    return [parse_event(e) for e in data]


def replay(
    events: Iterable[ScanEvent],
    calibration: LinearMap = DEFAULT_MAP,
    ring_spacing: float = DEFAULT_RING_SPACING_MM,
) -> ScanSession:
    session = ScanSession(ring_spacing=ring_spacing, calibration=calibration)
    for ev in events:
        session = scan_step(session, ev)
    return session


def ring_vertices(ring: EllipticRing) -> np.ndarray:
    n = ring.vertex_count
    theta = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack(
        [
            ring.semi_major * np.cos(theta),
            ring.semi_minor * np.sin(theta),
            np.full(n, float(ring.axial_pos)),
        ]
    )


def band_faces(n: int, close_seam: bool = True) -> np.ndarray:
    """Triangles joining ring block ``[0, n)`` to ring block ``[n, 2n)``.

    Each quad between vertex ``i`` and ``i + 1`` gives the pair
    ``(n+i, i, i+1)`` and ``(i+1, n+i+1, n+i)``. The open form stops at
    ``i = n - 2``; ``close_seam`` adds the quad from ``n - 1`` back to 0.
    """
    if n < 3:
        raise InvalidRingSize(f"ring needs at least 3 vertices, got {n}")
    i = np.arange(n if close_seam else n - 1)
    j = (i + 1) % n
    f1 = np.column_stack([n + i, i, j])
    f2 = np.column_stack([j, n + j, n + i])
    return np.stack([f1, f2], axis=1).reshape(-1, 3)


@dataclass(frozen=True, eq=False)
class TriMesh:
    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        f = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if f.size:
            if f.min() < 0 or f.max() >= len(v):
                raise ValueError("face index out of range")
            if np.any((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])):
                raise ValueError("degenerate face with repeated vertex index")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    def __eq__(self, other):
        if not isinstance(other, TriMesh):
            return NotImplemented
        return (
            self.vertices.shape == other.vertices.shape
            and np.array_equal(self.faces, other.faces)
            and np.array_equal(self.vertices, other.vertices)
        )


def build_cast_mesh(
    session: ScanSession,
    vertex_count: int = DEFAULT_VERTEX_COUNT,
    close_seam: bool = True,
) -> TriMesh:
    if session.phase is not Phase.DONE:
        raise ProtocolViolation("scan is not finished; send 'done' first")
    return loft_rings(session.rings, vertex_count, close_seam)


def loft_rings(
    rings: Sequence[EllipticRing],
    vertex_count: int = DEFAULT_VERTEX_COUNT,
    close_seam: bool = True,
) -> TriMesh:
    if len(rings) < 2:
        raise TooFewRings(f"need at least 2 rings, got {len(rings)}")
    n = vertex_count
    band = band_faces(n, close_seam)
    verts = [ring_vertices(replace(r, vertex_count=n)) for r in rings]
    faces = [band + k * n for k in range(len(rings) - 1)]
    return TriMesh(np.vstack(verts), np.vstack(faces))


def _submesh(mesh: TriMesh, faces: np.ndarray) -> TriMesh:
    used = np.unique(faces)
    remap = np.full(len(mesh.vertices), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return TriMesh(mesh.vertices[used], remap[faces])


def split_halves(mesh: TriMesh) -> tuple[TriMesh, TriMesh]:
    """Partition faces by the polar angle of their centroid: [0, pi) and [pi, 2pi)."""
    if len(mesh.faces) == 0:
        empty = TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
        return empty, empty
    c = mesh.vertices[mesh.faces].mean(axis=1)
    ang = np.arctan2(c[:, 1], c[:, 0])
    ang = np.where(ang < 0.0, ang + 2.0 * np.pi, ang)
    first = ang < np.pi
    return _submesh(mesh, mesh.faces[first]), _submesh(mesh, mesh.faces[~first])


def write_obj(mesh: TriMesh) -> str:
    out = [f"v {x:.6f} {y:.6f} {z:.6f}\n" for x, y, z in mesh.vertices]
    out += [f"f {a + 1} {b + 1} {c + 1}\n" for a, b, c in mesh.faces]
    return "".join(out)


def read_obj(text: str) -> TriMesh:
    verts, faces = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "f":
            idx = [int(p.split("/")[0]) for p in parts[1:]]
            if len(idx) != 3:
                raise ValueError(f"line {lineno}: only triangular faces are supported")
            faces.append([i - 1 for i in idx])
    return TriMesh(
        np.array(verts, dtype=float).reshape(-1, 3),
        np.array(faces, dtype=np.int64).reshape(-1, 3),
    )


def mesh_summary(mesh: TriMesh) -> dict:
    return {"vertices": int(len(mesh.vertices)), "faces": int(len(mesh.faces))}


def ring_to_dict(ring: EllipticRing) -> dict:
    return {
        "semi_major_mm": ring.semi_major,
        "semi_minor_mm": ring.semi_minor,
        "axial_pos_mm": ring.axial_pos,
    }
