"""Glove actuator model, inverse-actuator network, and virtual-spring controllers.

The glove takes two command parameters, stiffness in [0, 5] and offset in
[0, 1], and its force response is proprietary. A small 2-5-2 network is
trained to map (finger position, desired force) to a command; the force it
actually delivers is always judged through the actuator model.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from . import kernels
from .calib import LinearMap, reading_to_distance
from .elasticity import SENSOR_CAP_N, ForceDisplacementTrace
from .errors import EmptyDataset, EmptyGrid, NonConvergence, NonPositiveInput, OutOfRange

STIFFNESS_MAX = 5.0
OFFSET_MAX = 1.0
HIDDEN_UNITS = 5
DEFAULT_KI = 0.2
DEFAULT_GRID = (11, 11, 51)
DEFAULT_VALIDATION_GRID = (10, 10, 50)

# virtual spring displacement is zero at reading 0 (spring at free length)
SPRING_MAP = LinearMap(86.2, 0.0)


def _check_unit(name: str, v: float, hi: float = 1.0):
    if not 0.0 <= v <= hi:
        raise OutOfRange(f"{name} {v} outside [0, {hi}]")


@dataclass(frozen=True)
class ActuatorCommand:
    stiffness: float
    offset: float

    def __post_init__(self):
        _check_unit("stiffness", self.stiffness, STIFFNESS_MAX)
        _check_unit("offset", self.offset, OFFSET_MAX)


ZERO_COMMAND = ActuatorCommand(0.0, 0.0)


@dataclass(frozen=True)
class ActuatorModel:
    """Saturating engagement curve standing in for the glove motor.

    ``F = f_max * (stiffness / 5) * (1 - exp(-beta * max(0, position - offset)))``
    """

    f_max: float = 10.0
    beta: float = 4.0

    def __post_init__(self):
        if not (self.f_max > 0.0 and self.beta > 0.0):
            raise NonPositiveInput("f_max and beta must be > 0")


def simulate_actuator(model: ActuatorModel, cmd: ActuatorCommand, position: float) -> float:
    _check_unit("position", position)
    e = max(0.0, position - cmd.offset)
    return model.f_max * (cmd.stiffness / STIFFNESS_MAX) * (1.0 - math.exp(-model.beta * e))


def actuator_forces(model: ActuatorModel, stiffness, offset, position) -> np.ndarray:
    """Vectorized :func:`simulate_actuator` (no range checks)."""
    s, o, p = np.broadcast_arrays(
        np.asarray(stiffness, dtype=float),
        np.asarray(offset, dtype=float),
        np.asarray(position, dtype=float),
    )
    flat = [np.ascontiguousarray(a.ravel()) for a in (s, o, p)]
    out = kernels.actuator_force(*flat, model.f_max, model.beta, STIFFNESS_MAX)
    return np.asarray(out).reshape(s.shape)


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Rows of ``(position, force) -> (stiffness, offset)``."""

    position: np.ndarray
    force: np.ndarray
    stiffness: np.ndarray
    offset: np.ndarray

    def __len__(self) -> int:
        return len(self.position)

    def rows(self):
        for p, f, s, o in zip(self.position, self.force, self.stiffness, self.offset):
            yield (float(p), float(f)), (float(s), float(o))

    @classmethod
    def from_rows(cls, rows) -> "TrainingSet":
        arr = np.array([[p, f, s, o] for (p, f), (s, o) in rows], dtype=float).reshape(-1, 4)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])


def _grid_axes(steps: Sequence[int]):
    ns, no, npos = steps
    if min(ns, no, npos) < 2:
        raise EmptyGrid(f"every grid axis needs at least 2 points, got {tuple(steps)}")
    return (
        np.linspace(0.0, STIFFNESS_MAX, ns),
        np.linspace(0.0, OFFSET_MAX, no),
        np.linspace(0.0, 1.0, npos),
    )


def _rows_from_axes(model, s_axis, o_axis, p_axis) -> TrainingSet:
    S, O, P = np.meshgrid(s_axis, o_axis, p_axis, indexing="ij")
    s, o, p = S.ravel(), O.ravel(), P.ravel()
    return TrainingSet(p, actuator_forces(model, s, o, p), s, o)


def generate_training_set(
    model: ActuatorModel, grid: Sequence[int] = DEFAULT_GRID
) -> TrainingSet:
    """Exhaustive stiffness x offset x position sweep through the actuator.

    Disengaged rows (zero force) are kept, as a recording session would.
    """
    return _rows_from_axes(model, *_grid_axes(grid))


def validation_grid(
    model: ActuatorModel, grid: Sequence[int] = DEFAULT_VALIDATION_GRID
) -> TrainingSet:
    """Held-out rows at cell midpoints, disjoint from any endpoint-aligned grid."""
    if min(grid) < 1:
        raise EmptyGrid(f"validation grid needs at least 1 point per axis, got {tuple(grid)}")

    def mids(n, hi):
        return (np.arange(n) + 0.5) * hi / n

    ns, no, npos = grid
    return _rows_from_axes(model, mids(ns, STIFFNESS_MAX), mids(no, OFFSET_MAX), mids(npos, 1.0))


@dataclass(eq=False)
class Mlp:
    """2-5-2 network: logistic hidden layer, affine output clamped to the command box."""

    w1: np.ndarray  # (2, 5)
    b1: np.ndarray  # (5,)
    w2: np.ndarray  # (5, 2)
    b2: np.ndarray  # (2,)
    input_lo: tuple[float, float] = (0.0, 0.0)
    input_hi: tuple[float, float] = (1.0, 10.0)
    output_lo: tuple[float, float] = (0.0, 0.0)
    output_hi: tuple[float, float] = (STIFFNESS_MAX, OFFSET_MAX)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.w1 = np.ascontiguousarray(self.w1, dtype=float).reshape(2, HIDDEN_UNITS)
        self.b1 = np.ascontiguousarray(self.b1, dtype=float).reshape(HIDDEN_UNITS)
        self.w2 = np.ascontiguousarray(self.w2, dtype=float).reshape(HIDDEN_UNITS, 2)
        self.b2 = np.ascontiguousarray(self.b2, dtype=float).reshape(2)

    @property
    def f_max(self) -> float:
        return self.input_hi[1]

    def normalize_inputs(self, position, force) -> np.ndarray:
        lo = np.asarray(self.input_lo)
        hi = np.asarray(self.input_hi)
        raw = np.column_stack([np.ravel(position), np.ravel(force)]).astype(float)
        return np.ascontiguousarray(2.0 * (raw - lo) / (hi - lo) - 1.0)

    def raw_outputs(self, position, force) -> np.ndarray:
        """Unclamped outputs on the normalized [0, 1] command scale."""
        X = self.normalize_inputs(position, force)
        return np.asarray(kernels.mlp_forward(X, self.w1, self.b1, self.w2, self.b2))

    def predict(self, position, force) -> tuple[np.ndarray, np.ndarray]:
        """Batched inference; returns clamped ``(stiffness, offset)`` arrays."""
        y = np.clip(self.raw_outputs(position, force), 0.0, 1.0)
        lo = np.asarray(self.output_lo)
        hi = np.asarray(self.output_hi)
        cmd = lo + y * (hi - lo)
        return cmd[:, 0], cmd[:, 1]

    def to_dict(self) -> dict:
        return {
            "layer_sizes": [2, HIDDEN_UNITS, 2],
            "hidden_activation": "logistic",
            "output_activation": "affine+clamp",
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2.tolist(),
            "input_lo": list(self.input_lo),
            "input_hi": list(self.input_hi),
            "output_lo": list(self.output_lo),
            "output_hi": list(self.output_hi),
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Mlp":
        if list(d.get("layer_sizes", [2, HIDDEN_UNITS, 2])) != [2, HIDDEN_UNITS, 2]:
            raise ValueError(f"unsupported layer sizes {d['layer_sizes']}")
        return cls(
            w1=np.array(d["w1"]),
            b1=np.array(d["b1"]),
            w2=np.array(d["w2"]),
            b2=np.array(d["b2"]),
            input_lo=tuple(d["input_lo"]),
            input_hi=tuple(d["input_hi"]),
            output_lo=tuple(d["output_lo"]),
            output_hi=tuple(d["output_hi"]),
            meta=dict(d.get("meta", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "Mlp":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for :func:`train_inverse_mlp`.

    The first ``warmup_epochs`` fit the recorded (stiffness, offset) targets
    directly. After that the objective switches to the force the predicted
    command delivers through the actuator, with ``param_weight`` keeping a
    small pull toward the recorded targets. The step size follows a cosine
    decay from ``learning_rate`` down to ``learning_rate * lr_floor``.
    """

    seed: int = 42
    epochs: int = 6000
    learning_rate: float = 0.05
    lr_floor: float = 0.05
    warmup_epochs: int = 500
    param_weight: float = 1e-4
    val_fraction: float = 0.2


def _init_params(rng: np.random.Generator):
    w1 = rng.normal(0.0, 1.0 / math.sqrt(2.0), (2, HIDDEN_UNITS))
    b1 = np.zeros(HIDDEN_UNITS)
    w2 = rng.normal(0.0, 1.0 / math.sqrt(HIDDEN_UNITS), (HIDDEN_UNITS, 2))
    b2 = np.full(2, 0.5)
    return [w1, b1, w2, b2]


def _split(n: int, frac: float, rng: np.random.Generator):
    perm = rng.permutation(n)
    n_val = int(round(n * frac))
    if n_val == 0 or n_val == n:
        return perm, perm
    return perm[n_val:], perm[:n_val]


def train_inverse_mlp(
    data: TrainingSet,
    model: ActuatorModel = ActuatorModel(),
    config: TrainConfig = TrainConfig(),
    target_rms: float | None = None,
) -> Mlp:
    """Full-batch Adam on the inverse-actuator network.

    Returns the weights from the post-warmup epoch with the lowest
    validation force error. ``meta`` records the loss at the first and
    final epoch, the chosen epoch, and its validation force RMS in newtons.
    Raises :class:`NonConvergence` if ``target_rms`` is given and not met.
    """
    if len(data) == 0:
        raise EmptyDataset("training set is empty")
    rng = np.random.default_rng(config.seed)
    params = _init_params(rng)
    template = Mlp(*params, input_hi=(1.0, model.f_max))

    X_all = template.normalize_inputs(data.position, data.force)
    T_all = np.column_stack([data.stiffness / STIFFNESS_MAX, data.offset / OFFSET_MAX])
    tr, va = _split(len(data), config.val_fraction, rng)

    def part(idx):
        return (
            np.ascontiguousarray(X_all[idx]),
            np.ascontiguousarray(T_all[idx]),
            np.ascontiguousarray(data.position[idx], dtype=float),
            np.ascontiguousarray(data.force[idx], dtype=float),
        )

    Xt, Tt, Pt, Ft = part(tr)
    Xv, Tv, Pv, Fv = part(va)

    m = [np.zeros_like(a) for a in params]
    v = [np.zeros_like(a) for a in params]
    b1_, b2_, eps = 0.9, 0.999, 1e-8
    losses = []
    best = (math.inf, None, 0)
    all_warm = config.epochs <= config.warmup_epochs
    for ep in range(1, config.epochs + 1):
        warm = ep <= config.warmup_epochs
        w_param = 1.0 if warm else config.param_weight
        w_force = 0.0 if warm else 1.0
        frac = (ep - 1) / max(1, config.epochs - 1)
        lr = config.learning_rate * (
            config.lr_floor + (1.0 - config.lr_floor) * 0.5 * (1.0 + math.cos(math.pi * frac))
        )
        loss, *grads = kernels.loss_and_grads(
            Xt, Tt, Pt, Ft, *params, model.f_max, model.beta, w_param, w_force
        )
        losses.append(loss)
        for i, g in enumerate(grads):
            m[i] = b1_ * m[i] + (1.0 - b1_) * g
            v[i] = b2_ * v[i] + (1.0 - b2_) * g * g
            mhat = m[i] / (1.0 - b1_**ep)
            vhat = v[i] / (1.0 - b2_**ep)
            params[i] = params[i] - lr * mhat / (np.sqrt(vhat) + eps)

        if all_warm or not warm:
            val_force_mse, *_ = kernels.loss_and_grads(
                Xv, Tv, Pv, Fv, *params, model.f_max, model.beta, 0.0, 1.0
            )
            if all_warm or val_force_mse < best[0]:
                best = (val_force_mse, [p.copy() for p in params], ep)

    val_mse, best_params, best_ep = best
    val_rms = model.f_max * math.sqrt(val_mse)
    mlp = Mlp(
        *best_params,
        input_hi=template.input_hi,
        meta={
            "seed": config.seed,
            "epochs": config.epochs,
            "best_epoch": best_ep,
            "loss_first": losses[0],
            "loss_final": losses[-1],
            "val_force_rms_n": val_rms,
            "train_rows": int(len(tr)),
            "val_rows": int(len(va)),
        },
    )
    if target_rms is not None and val_rms > target_rms:
        raise NonConvergence(
            f"validation force RMS {val_rms:.4f} N exceeds target {target_rms} N "
            f"after {config.epochs} epochs"
        )
    return mlp


def mlp_infer(mlp: Mlp, position: float, desired_force: float) -> ActuatorCommand:
    _check_unit("position", position)
    _check_unit("desired_force", desired_force, mlp.f_max)
    s, o = mlp.predict([position], [desired_force])
    return ActuatorCommand(float(s[0]), float(o[0]))


def composite_errors(mlp: Mlp, model: ActuatorModel, position, force) -> np.ndarray:
    """Delivered minus desired force when the network's command drives the actuator."""
    position = np.asarray(position, dtype=float)
    force = np.asarray(force, dtype=float)
    s, o = mlp.predict(position, force)
    return actuator_forces(model, s, o, position) - force


def evaluate_composite(mlp: Mlp, model: ActuatorModel, data: TrainingSet) -> dict:
    err = composite_errors(mlp, model, data.position, data.force)
    return {
        "composite_rms_n": float(np.sqrt(np.mean(err**2))),
        "composite_max_n": float(np.max(np.abs(err))),
        "rows": int(len(err)),
    }


@dataclass(frozen=True)
class VirtualSpring:
    k: float = 0.1
    calibration: LinearMap = SPRING_MAP

    def __post_init__(self):
        if not self.k > 0.0:
            raise NonPositiveInput(f"spring rate must be > 0, got {self.k}")

    def displacement(self, position: float) -> float:
        return reading_to_distance(self.calibration, position)

    def desired_force(self, position: float, f_max: float) -> float:
        return min(self.k * self.displacement(position), f_max)


def open_loop_step(
    spring: VirtualSpring,
    mlp: Mlp,
    position: float,
    model: ActuatorModel = ActuatorModel(),
) -> tuple[ActuatorCommand, float]:
    f_des = spring.desired_force(position, model.f_max)
    cmd = mlp_infer(mlp, position, f_des)
    return cmd, simulate_actuator(model, cmd, position)


@dataclass(frozen=True)
class ClosedLoopState:
    accumulator: float = 0.0
    ki: float = DEFAULT_KI


def closed_loop_step(
    state: ClosedLoopState,
    spring: VirtualSpring,
    mlp: Mlp,
    position: float,
    measured_force: float,
    model: ActuatorModel = ActuatorModel(),
) -> tuple[ActuatorCommand, ClosedLoopState]:
    """Integral correction of the network's force input from measured force."""
    _check_unit("measured_force", measured_force, model.f_max)
    f_des = spring.desired_force(position, model.f_max)
    err = f_des - measured_force
    acc = min(model.f_max, max(-model.f_max, state.accumulator + state.ki * err))
    f_in = min(model.f_max, max(0.0, f_des + acc))
    return mlp_infer(mlp, position, f_in), replace(state, accumulator=acc)


class Mode(Enum):
    OPEN = "open"
    CLOSED = "closed"


def triangle_trajectory(
    cycles: int = 3,
    peak: float = 0.8,
    steps_per_stroke: int = 200,
    dt: float = 0.01,
) -> list[tuple[float, float]]:
    """Press/release cycles from reading 0 up to ``peak`` and back."""
    if cycles < 1 or steps_per_stroke < 1:
        raise NonPositiveInput("cycles and steps_per_stroke must be >= 1")
    _check_unit("peak", peak)
    up = np.arange(steps_per_stroke + 1) * (peak / steps_per_stroke)
    stroke = np.concatenate([up[1:], up[::-1][1:]])
    pos = np.concatenate([[0.0], np.tile(stroke, cycles)])
    return [(i * dt, float(p)) for i, p in enumerate(pos)]


def run_interaction(
    spring: VirtualSpring,
    mlp: Mlp,
    trajectory: Sequence[tuple[float, float]],
    mode: Mode | str = Mode.OPEN,
    model: ActuatorModel = ActuatorModel(),
    ki: float = DEFAULT_KI,
) -> ForceDisplacementTrace:
    """Drive the virtual spring along ``trajectory`` and record what the sensor sees.

    Each command is held until the next sample, so the force measured at a
    sample comes from the command computed at the previous one. The first
    sample sees the idle (zero-stiffness) command.
    """
    mode = Mode(mode)
    if not trajectory:
        return ForceDisplacementTrace.empty()
    cmd = ZERO_COMMAND
    state = ClosedLoopState(ki=ki)
    rows = []
    for t, p in trajectory:
        measured = min(simulate_actuator(model, cmd, p), SENSOR_CAP_N)
        rows.append((t, spring.displacement(p), measured))
        if mode is Mode.OPEN:
            cmd, _ = open_loop_step(spring, mlp, p, model)
        else:
            cmd, state = closed_loop_step(state, spring, mlp, p, measured, model)
    return ForceDisplacementTrace.from_rows(rows)


def tracking_rms(trace: ForceDisplacementTrace, spring: VirtualSpring, f_max: float = 10.0) -> float:
    """RMS gap between recorded force and the spring's desired force."""
    if len(trace) == 0:
        return 0.0
    desired = np.minimum(spring.k * trace.x, f_max)
    return float(np.sqrt(np.mean((trace.f - desired) ** 2)))
