"""Time integration of the model and its reduced form.

A Dormand-Prince 5(4) embedded pair drives adaptive steps with relative
tolerance 1e-8 and absolute tolerance 1e-10 by default.  Accepted steps
are floored at zero componentwise (the orthant is forward-invariant;
undershoot beyond the absolute tolerance would only be integration
noise).  Integration ends early when the state lands on one of the
analytic steady states: targets come from :func:`equilibria.steady_states`,
so simulation corroborates the analytic picture instead of rediscovering
it.

The linear change of variables s1 = (k2/k1) S1, x1 = k2 X1, s2 = S2,
x2 = k3 X2 turns the model into its yield-free reduced form; both the
map and the reduced vector field are provided so trajectory equivalence
can be tested end to end.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .equilibria import Label, ModelParams, OperatingPoint, steady_states, vector_field


class State(NamedTuple):
    """Convenience constructor for the (S1, X1, S2, X2) state vector."""

    s1: float
    x1: float
    s2: float
    x2: float


class Terminal(enum.Enum):
    CONVERGED = "converged"
    MAX_TIME = "max-time"
    DIVERGED = "diverged"


class IntegrationError(RuntimeError):
    """Step size underflow or non-finite state during integration."""


@dataclass
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # (n, 4)
    qch4: np.ndarray
    terminal: Terminal
    attracted_to: Label | None = None


# Dormand-Prince 5(4) tableau; the propagated solution is 5th order and
# the last stage is FSAL.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)

#: componentwise relative closeness to a target required for convergence
CONVERGE_RTOL = 1e-6
#: vector-field sup-norm required for convergence
CONVERGE_RESIDUAL = 1e-8
#: states larger than this are treated as divergence
DIVERGE_NORM = 1e12
#: step-size ceiling (d); without it the controller lets the step grow
#: near an equilibrium until the local error matches the tolerance, and
#: the state then hovers too far out for the residual gate to ever pass
H_MAX = 5.0


def _targets(params: ModelParams, pt: OperatingPoint):
    out = []
    for st in steady_states(params, pt):
        if st.exists:
            comps = st.components
            out.append((st.label, comps, np.maximum(1.0, np.abs(comps))))
    return out


def _check_converged(f, x, targets) -> Label | None:
    for label, comps, scale in targets:
        if np.max(np.abs(x - comps) / scale) <= CONVERGE_RTOL:
            if np.max(np.abs(f(x))) < CONVERGE_RESIDUAL:
                return label
    return None


def _near_target(x, targets, factor: float = 100.0) -> bool:
    return any(
        np.max(np.abs(x - comps) / scale) <= factor * CONVERGE_RTOL
        for _, comps, scale in targets
    )


def _initial_step(f, x0, rtol, atol) -> float:
    d0 = np.max(np.abs(f(x0)))
    scale = atol + rtol * max(1.0, float(np.max(np.abs(x0))))
    if d0 <= 0.0:
        return 1e-3
    return min(1.0, 0.01 * scale ** 0.2 / d0 ** 0.8 + 1e-4)


def _integrate(
    f: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    t_max: float,
    rtol: float,
    atol: float,
    targets,
    checkpoints: Sequence[float] | None,
    record: bool,
    max_steps: int = 2_000_000,
):
    """Adaptive DOPRI5 loop shared by the full and the reduced system."""
    x = np.asarray(x0, dtype=float).copy()
    t = 0.0
    ts, xs = [t], [x.copy()]
    pending = sorted(c for c in (checkpoints or ()) if 0.0 < c <= t_max)

    label = _check_converged(f, x, targets) if targets else None
    if label is not None:
        return np.array(ts), np.stack(xs), Terminal.CONVERGED, label

    h = min(_initial_step(f, x, rtol, atol), H_MAX, t_max)
    k = np.empty((7, x.size))
    k[0] = f(x)
    # near an equilibrium the step is stability-limited, so the per-step
    # local error (and with it the distance the state hovers from the
    # equilibrium) is pinned at the tolerance; tighten once close to a
    # target so the residual convergence gate becomes reachable
    tail = False
    for _ in range(max_steps):
        if t >= t_max:
            return np.array(ts), np.stack(xs), Terminal.MAX_TIME, None
        h = min(h, t_max - t)
        if pending:
            h = min(h, pending[0] - t)
        for i in range(1, 7):
            k[i] = f(x + h * (_A[i] @ k[:i]))
        x_new = x + h * (_B5 @ k)
        err_vec = h * (_E @ k)
        scale = atol + rtol * np.maximum(np.abs(x), np.abs(x_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            t += h
            np.maximum(x_new, 0.0, out=x_new)
            x = x_new
            if not np.all(np.isfinite(x)):
                raise IntegrationError(f"non-finite state at t={t}")
            if float(np.max(np.abs(x))) > DIVERGE_NORM:
                return np.array(ts), np.stack(xs), Terminal.DIVERGED, None
            hit_checkpoint = bool(pending) and t >= pending[0] - 1e-14
            if hit_checkpoint:
                pending.pop(0)
            if record or hit_checkpoint or t >= t_max:
                ts.append(t)
                xs.append(x.copy())
            k[0] = f(x)  # re-evaluate: clamping may have moved the state
            if targets:
                label = _check_converged(f, x, targets)
                if label is not None:
                    if not (record or (ts and ts[-1] == t)):
                        ts.append(t)
                        xs.append(x.copy())
                    return np.array(ts), np.stack(xs), Terminal.CONVERGED, label
                if not tail and _near_target(x, targets):
                    tail = True
                    rtol, atol = rtol * 1e-4, atol * 1e-4
            h = min(H_MAX, h * min(5.0, max(0.2, 0.9 * err ** -0.2 if err > 0 else 5.0)))
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
        if h < 1e-14 * max(1.0, t):
            raise IntegrationError(f"step size underflow at t={t}")
    raise IntegrationError("step budget exhausted")


def methane_flow(params: ModelParams, states: np.ndarray) -> np.ndarray:
    """Methane mass flow k4 * mu2(S2) * X2 for one state or a stack of states."""
    arr = np.atleast_2d(states)
    q = np.array([params.k4 * params.mu2(float(s2)) * x2 for _, _, s2, x2 in arr])
    return q if states.ndim > 1 else q[0]


def integrate(
    params: ModelParams,
    pt: OperatingPoint,
    x0,
    t_max: float = 1000.0,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    checkpoints: Sequence[float] | None = None,
    record: bool = True,
) -> Trajectory:
    """Integrate from ``x0`` until convergence to a steady state or ``t_max``.

    ``checkpoints`` forces exact landing on the given times (recorded
    even when ``record`` is off).  The trajectory carries the methane
    flow at every recorded sample.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (4,) or np.any(x0 < 0):
        raise ValueError("x0 must be four nonnegative components")
    if t_max <= 0:
        raise ValueError("t_max must be positive")

    def f(x: np.ndarray) -> np.ndarray:
        return vector_field(params, pt, x)

    ts, states, terminal, label = _integrate(
        f, x0, t_max, rtol, atol, _targets(params, pt), checkpoints, record
    )
    return Trajectory(ts, states, methane_flow(params, states), terminal, label)


def integrate_batch(
    params: ModelParams,
    pt: OperatingPoint,
    x0s,
    t_max: float = 1000.0,
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> list[Label | None]:
    """Attractor labels for a batch of initial states (None = no convergence).

    All rows share the adaptive step; converged rows are frozen at their
    target so they stop constraining the step size.  Used by the
    corroboration sweeps where only the terminal verdict matters.
    """
    from .kinetics import Haldane, Monod

    xs = np.array(x0s, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != 4:
        raise ValueError("x0s must be (n, 4)")
    n = xs.shape[0]
    targets = _targets(params, pt)
    t_arr = np.stack([comps for _, comps, _ in targets])
    t_scale = np.stack([scale for _, _, scale in targets])
    labels: list[Label | None] = [None] * n
    active = np.ones(n, dtype=bool)

    mu1, mu2 = params.mu1, params.mu2
    if isinstance(mu1, Monod):
        rate1 = lambda s: mu1.m * s / (mu1.K + s)
    else:
        rate1 = lambda s: np.array([mu1(float(v)) for v in s])
    if isinstance(mu2, Haldane):
        rate2 = lambda s: mu2.m * s / (mu2.K + s + s * s / mu2.K_I)
    else:
        rate2 = lambda s: np.array([mu2(float(v)) for v in s])

    def f(x: np.ndarray) -> np.ndarray:
        s1, x1, s2, x2 = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
        m1 = rate1(s1)
        m2 = rate2(s2)
        ad = params.alpha * pt.D
        return np.column_stack(
            [
                pt.D * (pt.s1in - s1) - params.k1 * m1 * x1,
                (m1 - ad) * x1,
                pt.D * (pt.s2in - s2) + params.k2 * m1 * x1 - params.k3 * m2 * x2,
                (m2 - ad) * x2,
            ]
        )

    def settle(x: np.ndarray, fx: np.ndarray) -> None:
        for i in np.nonzero(active)[0]:
            d = np.max(np.abs(x[i] - t_arr) / t_scale, axis=1)
            j = int(np.argmin(d))
            if d[j] <= CONVERGE_RTOL and np.max(np.abs(fx[i])) < CONVERGE_RESIDUAL:
                labels[i] = targets[j][0]
                active[i] = False
                x[i] = t_arr[j]

    t = 0.0
    fx = f(xs)
    settle(xs, fx)
    d0 = max(1e-12, float(np.max(np.abs(fx))))
    h = min(1.0, 0.01 * (1.0 + float(np.max(np.abs(xs)))) / d0, H_MAX, t_max)
    k = np.empty((7, n, 4))
    k[0] = f(xs)
    k[0][~active] = 0.0
    steps = 0
    while t < t_max and np.any(active):
        steps += 1
        if steps > 2_000_000:
            raise IntegrationError("step budget exhausted")
        h = min(h, t_max - t)
        for i in range(1, 7):
            k[i] = f(xs + h * np.tensordot(_A[i], k[:i], axes=(0, 0)))
            k[i][~active] = 0.0
        x_new = xs + h * np.tensordot(_B5, k, axes=(0, 0))
        err_vec = h * np.tensordot(_E, k, axes=(0, 0))
        scale = atol + rtol * np.maximum(np.abs(xs), np.abs(x_new))
        per_row = np.sqrt(np.mean((err_vec / scale) ** 2, axis=1))
        err = float(np.max(per_row[active])) if np.any(active) else 0.0
        if err <= 1.0:
            t += h
            np.maximum(x_new, 0.0, out=x_new)
            xs = np.where(active[:, None], x_new, xs)
            fx = f(xs)
            settle(xs, fx)
            k[0] = f(xs)
            k[0][~active] = 0.0
            h = min(H_MAX, h * min(5.0, max(0.2, 0.9 * err ** -0.2 if err > 0 else 5.0)))
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
        if h < 1e-14 * max(1.0, t):
            raise IntegrationError(f"step size underflow at t={t}")
    return labels


# ---------------------------------------------------------------------------
# reduced form


def to_reduced(params: ModelParams, x) -> np.ndarray:
    """Apply the yield-eliminating linear map to a state (stacks allowed)."""
    arr = np.asarray(x, dtype=float)
    w = np.array([params.feed_ratio, params.k2, 1.0, params.k3])
    return arr * w


def from_reduced(params: ModelParams, y) -> np.ndarray:
    arr = np.asarray(y, dtype=float)
    w = np.array([params.feed_ratio, params.k2, 1.0, params.k3])
    return arr / w


def reduced_vector_field(params: ModelParams, pt: OperatingPoint, y) -> np.ndarray:
    """Right-hand side of the reduced system in (s1, x1, s2, x2) variables."""
    s1, x1, s2, x2 = y
    f1 = params.mu1(s1 / params.feed_ratio)
    f2 = params.mu2(s2)
    ad = params.alpha * pt.D
    s1in = params.feed_ratio * pt.s1in
    return np.array(
        [
            pt.D * (s1in - s1) - f1 * x1,
            (f1 - ad) * x1,
            pt.D * (pt.s2in - s2) + f1 * x1 - f2 * x2,
            (f2 - ad) * x2,
        ]
    )


def integrate_reduced(
    params: ModelParams,
    pt: OperatingPoint,
    y0,
    t_max: float = 1000.0,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    checkpoints: Sequence[float] | None = None,
    record: bool = True,
) -> Trajectory:
    """Integrate the reduced system; no convergence targets, runs to ``t_max``."""
    y0 = np.asarray(y0, dtype=float)

    def f(y: np.ndarray) -> np.ndarray:
        return reduced_vector_field(params, pt, y)

    ts, states, terminal, _ = _integrate(
        f, y0, t_max, rtol, atol, [], checkpoints, record
    )
    qch4 = np.array([params.k4 * params.mu2(s2) * x2 / params.k3 for _, _, s2, x2 in states])
    return Trajectory(ts, states, qch4, terminal, None)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,S1,X1,S2,X2,QCH4\n")
        for i in range(traj.t.shape[0]):
            s1, x1, s2, x2 = traj.states[i]
            fh.write(
                f"{traj.t[i]:.9g},{s1:.9g},{x1:.9g},{s2:.9g},{x2:.9g},{traj.qch4[i]:.9g}\n"
            )


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ts, states, q = [], [], []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "t,S1,X1,S2,X2,QCH4":
            raise ValueError(f"unexpected trajectory CSV header: {header!r}")
        for line in fh:
            vals = [float(v) for v in line.strip().split(",")]
            ts.append(vals[0])
            states.append(vals[1:5])
            q.append(vals[5])
    return np.array(ts), np.array(states), np.array(q)
