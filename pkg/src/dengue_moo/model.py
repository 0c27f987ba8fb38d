"""Dengue transmission model with adulticide control.

Eight normalized compartments: four for humans (susceptible, exposed,
infected, resistant) and four for mosquitoes (aquatic, susceptible,
exposed, infected). The control ``c(t)`` in [0, 1] is the level of
insecticide applied to adult mosquitoes.

The hot path (RK4 over 1000 steps) is compiled with numba; everything else
is plain numpy.
"""

from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import NamedTuple

import numba
import numpy as np

HORIZON_DAYS = 84.0
N_STEPS = 1000
STATE_NAMES = ("s_h", "e_h", "i_h", "r_h", "a_m", "s_m", "e_m", "i_m")
TRAJECTORY_HEADER = ("t", *STATE_NAMES, "c")


@dataclass(frozen=True)
class ModelParameters:
    """Model parameters; defaults are the Cape Verde 2009 outbreak values.

    ``N_h`` only enters through the normalization and is kept for
    completeness.
    """

    N_h: float = 480000.0
    B: float = 1.0
    beta_mh: float = 0.375
    beta_hm: float = 0.375
    mu_h: float = 1.0 / (71 * 365)
    eta_h: float = 1.0 / 3.0
    mu_m: float = 1.0 / 11.0
    phi: float = 6.0
    mu_A: float = 1.0 / 4.0
    eta_A: float = 0.08
    eta_m: float = 1.0 / 11.0
    nu_h: float = 1.0 / 4.0
    m: float = 6.0
    k: float = 3.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"parameter {f.name} must be strictly positive, got {value!r}")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)

    def replace(self, **overrides: float) -> "ModelParameters":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        unknown = set(overrides) - set(values)
        if unknown:
            raise ValueError(f"unknown model parameters: {sorted(unknown)}")
        values.update({k: float(v) for k, v in overrides.items()})
        return ModelParameters(**values)


DEFAULT_PARAMETERS = ModelParameters()


class EpidemicState(NamedTuple):
    s_h: float
    e_h: float
    i_h: float
    r_h: float
    a_m: float
    s_m: float
    e_m: float
    i_m: float


INITIAL_STATE = EpidemicState(
    s_h=0.99865, e_h=0.00035, i_h=0.001, r_h=0.0, a_m=1.0, s_m=1.0, e_m=0.0, i_m=0.0
)


class ObjectiveVector(NamedTuple):
    """Integrated infected-human fraction and integrated control effort (days)."""

    f1: float
    f2: float


@dataclass(frozen=True)
class ScalarCostWeights:
    gamma_D: float = 1.0
    gamma_S: float = 1.0

    def __post_init__(self):
        if not (self.gamma_D > 0 and self.gamma_S > 0):
            raise ValueError("cost weights must be strictly positive")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (nodes, 8)
    control: np.ndarray

    def state(self, index: int) -> EpidemicState:
        return EpidemicState(*(float(v) for v in self.states[index]))

    @property
    def infected(self) -> np.ndarray:
        return self.states[:, 2]

    def human_sum(self) -> np.ndarray:
        return self.states[:, :4].sum(axis=1)

    def write_csv(self, path: str | Path) -> None:
        write_trajectory_csv(self, path)


# Parameter vector layout follows ModelParameters field order:
# N_h, B, beta_mh, beta_hm, mu_h, eta_h, mu_m, phi, mu_A, eta_A, eta_m, nu_h, m, k


@numba.njit(cache=True)
def _dengue_rhs(y, c, p, out):
    B = p[1]
    beta_mh = p[2]
    beta_hm = p[3]
    mu_h = p[4]
    eta_h = p[5]
    mu_m = p[6]
    phi = p[7]
    mu_A = p[8]
    eta_A = p[9]
    eta_m = p[10]
    nu_h = p[11]
    m = p[12]
    k = p[13]
    s_h, e_h, i_h, r_h, a_m, s_m, e_m, i_m = y[0], y[1], y[2], y[3], y[4], y[5], y[6], y[7]

    force_h = B * beta_mh * m * i_m
    force_m = B * beta_hm * i_h
    out[0] = mu_h - (force_h + mu_h) * s_h
    out[1] = force_h * s_h - (nu_h + mu_h) * e_h
    out[2] = nu_h * e_h - (eta_h + mu_h) * i_h
    out[3] = eta_h * i_h - mu_h * r_h
    out[4] = phi * (m / k) * (1.0 - a_m) * (s_m + e_m + i_m) - (eta_A + mu_A) * a_m
    out[5] = eta_A * (k / m) * a_m - (force_m + mu_m) * s_m - c * s_m
    out[6] = force_m * s_m - (mu_m + eta_m) * e_m - c * e_m
    out[7] = eta_m * e_m - mu_m * i_m - c * i_m


# Kernels receiving a jitted function as an argument cannot be cached on disk.
@numba.njit
def rk4_core(rhs, y0, params, control, h, states):
    """Classical RK4 with one step per control interval.

    Stage controls are linearly interpolated, so the half-step value is the
    midpoint average of the two bracketing nodes. ``states`` must have shape
    ``(len(control), len(y0))`` and receives every node; row 0 is ``y0``.
    """
    dim = y0.shape[0]
    steps = control.shape[0] - 1
    y = y0.copy()
    k1 = np.empty(dim)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    tmp = np.empty(dim)
    states[0, :] = y
    for i in range(steps):
        c0 = control[i]
        c1 = control[i + 1]
        cm = 0.5 * (c0 + c1)
        rhs(y, c0, params, k1)
        for j in range(dim):
            tmp[j] = y[j] + 0.5 * h * k1[j]
        rhs(tmp, cm, params, k2)
        for j in range(dim):
            tmp[j] = y[j] + 0.5 * h * k2[j]
        rhs(tmp, cm, params, k3)
        for j in range(dim):
            tmp[j] = y[j] + h * k3[j]
        rhs(tmp, c1, params, k4)
        for j in range(dim):
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        states[i + 1, :] = y


@numba.njit(cache=True)
def _trapezoid_weighted(values, horizon):
    # horizon * (interior + ends / 2) / steps keeps constant inputs exact
    steps = values.shape[0] - 1
    acc = 0.5 * (values[0] + values[steps])
    for i in range(1, steps):
        acc += values[i]
    return horizon * acc / steps


@numba.njit
def _objectives_kernel(y0, params, control, horizon, states, out):
    h = horizon / (control.shape[0] - 1)
    rk4_core(_dengue_rhs, y0, params, control, h, states)
    steps = control.shape[0] - 1
    ih0 = max(states[0, 2], 0.0)
    ihn = max(states[steps, 2], 0.0)
    acc = 0.5 * (ih0 + ihn)
    for i in range(1, steps):
        acc += max(states[i, 2], 0.0)
    out[0] = horizon * acc / steps
    out[1] = _trapezoid_weighted(control, horizon)


@numba.njit
def _objectives_batch(y0, params, controls, horizon, out):
    states = np.empty((controls.shape[1], y0.shape[0]))
    row = np.empty(2)
    for r in range(controls.shape[0]):
        _objectives_kernel(y0, params, controls[r], horizon, states, row)
        out[r, 0] = row[0]
        out[r, 1] = row[1]


def derivative(state, params: ModelParameters = DEFAULT_PARAMETERS, c: float = 0.0) -> EpidemicState:
    """Right-hand side of the state equations at ``state`` with control level ``c``."""
    if not 0.0 <= c <= 1.0:
        raise ValueError(f"control level must lie in [0, 1], got {c!r}")
    out = np.empty(8)
    _dengue_rhs(np.asarray(state, dtype=np.float64), float(c), params.as_array(), out)
    return EpidemicState(*(float(v) for v in out))


def validate_control(control, steps: int = N_STEPS) -> np.ndarray:
    values = np.ascontiguousarray(control, dtype=np.float64)
    if values.ndim != 1 or values.shape[0] != steps + 1:
        raise ValueError(f"control must have {steps + 1} nodes, got shape {values.shape}")
    if not np.all((values >= 0.0) & (values <= 1.0)):
        raise ValueError("control values must lie in [0, 1]")
    return values


def constant_control(level: float, steps: int = N_STEPS) -> np.ndarray:
    return np.full(steps + 1, float(level))


def integrate_rk4(
    params: ModelParameters = DEFAULT_PARAMETERS,
    control=None,
    horizon: float = HORIZON_DAYS,
    steps: int = N_STEPS,
    initial_state=INITIAL_STATE,
) -> Trajectory:
    """Integrate the model over ``[0, horizon]`` with ``steps`` RK4 steps.

    Args:
        params: Model parameters.
        control: ``steps + 1`` control values on the uniform grid. ``None``
            means no insecticide.
        horizon: Length of the period in days.
        steps: Number of RK4 steps; the control grid must have one more node.
        initial_state: Starting compartments. Defaults to the outbreak's
            initial condition.

    Raises:
        ValueError: On a grid-length mismatch or out-of-range control.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if control is None:
        control = constant_control(0.0, steps)
    control = validate_control(control, steps)
    y0 = np.asarray(initial_state, dtype=np.float64)
    states = np.empty((steps + 1, 8))
    rk4_core(_dengue_rhs, y0, params.as_array(), control, horizon / steps, states)
    times = np.linspace(0.0, horizon, steps + 1)
    return Trajectory(times=times, states=states, control=control)


def trapezoid(values: np.ndarray, horizon: float = HORIZON_DAYS) -> float:
    """Trapezoidal integral of samples on a uniform grid spanning ``[0, horizon]``."""
    return float(_trapezoid_weighted(np.ascontiguousarray(values, dtype=np.float64), float(horizon)))


def evaluate_objectives(
    control,
    params: ModelParameters = DEFAULT_PARAMETERS,
    horizon: float = HORIZON_DAYS,
    steps: int = N_STEPS,
) -> ObjectiveVector:
    control = validate_control(control, steps)
    out = np.empty(2)
    states = np.empty((steps + 1, 8))
    _objectives_kernel(
        np.asarray(INITIAL_STATE, dtype=np.float64), params.as_array(), control, float(horizon), states, out
    )
    return ObjectiveVector(float(out[0]), float(out[1]))


def evaluate_many(
    controls,
    params: ModelParameters = DEFAULT_PARAMETERS,
    horizon: float = HORIZON_DAYS,
) -> np.ndarray:
    """Objectives for a batch of controls, one row each. Inputs are not validated."""
    controls = np.ascontiguousarray(np.atleast_2d(controls), dtype=np.float64)
    out = np.empty((controls.shape[0], 2))
    _objectives_batch(np.asarray(INITIAL_STATE, dtype=np.float64), params.as_array(), controls, float(horizon), out)
    return out


def scalar_cost(
    control,
    weights: ScalarCostWeights = ScalarCostWeights(),
    params: ModelParameters = DEFAULT_PARAMETERS,
    horizon: float = HORIZON_DAYS,
    steps: int = N_STEPS,
    initial_state=INITIAL_STATE,
) -> float:
    """Quadratic cost ``∫ gamma_D i_h² + gamma_S c² dt`` by the trapezoidal rule."""
    traj = integrate_rk4(params, control, horizon, steps, initial_state)
    ih = np.maximum(traj.infected, 0.0)
    integrand = weights.gamma_D * ih**2 + weights.gamma_S * traj.control**2
    return trapezoid(integrand, horizon)


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER)
        for t, row, c in zip(traj.times, traj.states, traj.control):
            writer.writerow([repr(float(t)), *(repr(float(v)) for v in row), repr(float(c))])


def read_trajectory_csv(path: str | Path) -> Trajectory:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Trajectory(times=data[:, 0], states=data[:, 1:9], control=data[:, 9])
