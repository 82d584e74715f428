"""Explicit Runge-Kutta integration with dense output.

Two steppers: an adaptive Dormand-Prince 5(4) embedded pair (the default)
and a fixed-step classical RK4 kept for reproducible step-count runs.
Both produce a :class:`Trajectory` that can be evaluated at any time in the
integration span, which is what the quadrature- and shooting-based layers
above build on.

The right-hand-side convention throughout the package is ``rhs(y, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import NumericalError


class IntegrationError(NumericalError):
    """Base class for integration failures."""


class StepSizeUnderflowError(IntegrationError):
    """The adaptive step collapsed, signalling stiffness or a singularity."""


class NonFiniteFieldError(IntegrationError):
    """The vector field returned NaN or infinity."""


_METHOD_ALIASES = {
    "rk45": "rk45",
    "rk45-adaptive": "rk45",
    "rk4": "rk4",
    "rk4-fixed": "rk4",
}


@dataclass(frozen=True)
class IntegratorSpec:
    """Integration settings.

    ``method`` selects the stepper ("rk45" adaptive or "rk4" fixed step).
    For the fixed-step method the step is ``initial_step`` if given, else
    ``max_step`` (one of the two must be finite).
    """

    method: str = "rk45"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_step: float = math.inf
    initial_step: float | None = None

    def __post_init__(self) -> None:
        if self.method not in _METHOD_ALIASES:
            raise ValueError(f"unknown integrator method {self.method!r}")
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("integrator tolerances must be positive")
        if not self.max_step > 0.0:
            raise ValueError("max_step must be positive")
        if self.initial_step is not None and not self.initial_step > 0.0:
            raise ValueError("initial_step must be positive when given")

    @property
    def kind(self) -> str:
        return _METHOD_ALIASES[self.method]


DEFAULT_INTEGRATOR = IntegratorSpec()

# Dormand-Prince 5(4) tableau.  _B propagates the 5th-order solution,
# _E = b - b_hat yields the embedded error estimate, and _P holds the
# standard 4th-order dense-output interpolant coefficients.
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_DP_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
_DP_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9


class Trajectory:
    """Dense ODE solution on [t0, t1].

    Calling the trajectory with a scalar time returns the state vector;
    calling it with an array of times returns an ``(m, d)`` array.  Per-step
    interpolation polynomials are stored so evaluation never re-integrates.
    """

    def __init__(self, ts: np.ndarray, ys: np.ndarray, coeffs: np.ndarray, n_rhs_evals: int):
        self._ts = ts
        self._ys = ys
        self._coeffs = coeffs  # (n_steps, d, 4) polynomial in the step fraction
        self.n_rhs_evals = n_rhs_evals

    @property
    def ts(self) -> np.ndarray:
        return self._ts

    @property
    def ys(self) -> np.ndarray:
        return self._ys

    @property
    def t0(self) -> float:
        return float(self._ts[0])

    @property
    def t1(self) -> float:
        return float(self._ts[-1])

    @property
    def y_end(self) -> np.ndarray:
        return self._ys[-1].copy()

    @property
    def n_steps(self) -> int:
        return len(self._ts) - 1

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        tv = np.atleast_1d(t_arr)
        slack = 1e-9 * (1.0 + abs(self.t1 - self.t0))
        if np.any(tv < self.t0 - slack) or np.any(tv > self.t1 + slack):
            raise ValueError("evaluation time outside the integration span")
        tv = np.clip(tv, self.t0, self.t1)
        idx = np.searchsorted(self._ts, tv, side="right") - 1
        idx = np.clip(idx, 0, len(self._ts) - 2)
        h = self._ts[idx + 1] - self._ts[idx]
        theta = (tv - self._ts[idx]) / h
        powers = np.stack([theta, theta**2, theta**3, theta**4], axis=-1)  # (m, 4)
        # y = y_left + h * (Q @ powers) per sample
        out = self._ys[idx] + h[:, None] * np.einsum("mdp,mp->md", self._coeffs[idx], powers)
        return out[0] if scalar else out


def _check_finite(value: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(value)):
        raise NonFiniteFieldError(f"vector field returned a non-finite value at t={t!r}")


def _initial_step(rhs, t0, y0, f0, t1, spec: IntegratorSpec) -> float:
    """Hairer-style starting step estimate (costs one extra rhs call)."""
    scale = spec.abs_tol + spec.rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d1 < 1e-5 or d0 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t1 - t0)
    y1 = y0 + h0 * f0
    f1 = np.asarray(rhs(y1, t0 + h0), dtype=float)
    _check_finite(f1, t0 + h0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, spec.max_step, t1 - t0)


def integrate(
    rhs: Callable[[np.ndarray, float], np.ndarray],
    y0: Sequence[float] | np.ndarray,
    t_span: tuple[float, float],
    spec: IntegratorSpec = DEFAULT_INTEGRATOR,
) -> Trajectory:
    """Integrate ``y' = rhs(y, t)`` over ``t_span`` and return a dense trajectory.

    Adaptive runs bound the local error per step by ``abs_tol + rel_tol*|y|``;
    a collapsing step raises :class:`StepSizeUnderflowError` and non-finite
    field values raise :class:`NonFiniteFieldError`.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must satisfy t1 > t0")
    y = np.array(y0, dtype=float, copy=True)
    if y.ndim != 1:
        raise ValueError("y0 must be one-dimensional")
    if spec.kind == "rk4":
        return _integrate_rk4(rhs, y, t0, t1, spec)
    return _integrate_dopri5(rhs, y, t0, t1, spec)


def _integrate_dopri5(rhs, y, t0, t1, spec: IntegratorSpec) -> Trajectory:
    d = y.size
    f = np.asarray(rhs(y, t0), dtype=float)
    _check_finite(f, t0)
    n_evals = 1
    h = spec.initial_step if spec.initial_step is not None else _initial_step(rhs, t0, y, f, t1, spec)
    if spec.initial_step is None:
        n_evals += 1
    h = min(h, spec.max_step, t1 - t0)

    ts = [t0]
    ys = [y.copy()]
    coeffs = []
    K = np.empty((7, d))
    t = t0
    while t < t1:
        h = min(h, spec.max_step, t1 - t)
        if h <= 1e-14 * max(1.0, abs(t)):
            raise StepSizeUnderflowError(f"step size underflow at t={t!r} (h={h!r})")
        K[0] = f
        for i in range(5):
            yi = y + h * (K[: i + 1].T @ np.asarray(_DP_A[i]))
            K[i + 1] = rhs(yi, t + _DP_C[i + 1] * h)
        y_high = y + h * (K[:6].T @ np.asarray(_DP_A[5]))
        K[6] = rhs(y_high, t + h)
        n_evals += 6
        _check_finite(K, t)

        err = h * (K.T @ _DP_E)
        scale = spec.abs_tol + spec.rel_tol * np.maximum(np.abs(y), np.abs(y_high))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        if err_norm <= 1.0:
            coeffs.append(K.T @ _DP_P)
            t = t1 if (t + h) >= t1 else t + h
            y = y_high
            f = K[6].copy()  # FSAL
            ts.append(t)
            ys.append(y.copy())
            factor = _MAX_FACTOR if err_norm == 0.0 else min(_MAX_FACTOR, _SAFETY * err_norm**-0.2)
        else:
            factor = max(_MIN_FACTOR, _SAFETY * err_norm**-0.2)
        h *= factor
    return Trajectory(np.array(ts), np.array(ys), np.array(coeffs), n_evals)


def _integrate_rk4(rhs, y, t0, t1, spec: IntegratorSpec) -> Trajectory:
    step = spec.initial_step if spec.initial_step is not None else spec.max_step
    if not math.isfinite(step):
        raise ValueError("fixed-step RK4 needs a finite initial_step or max_step")
    n = max(1, math.ceil((t1 - t0) / step - 1e-12))
    h = (t1 - t0) / n
    d = y.size
    ts = np.linspace(t0, t1, n + 1)
    ys = np.empty((n + 1, d))
    coeffs = np.empty((n, d, 4))
    ys[0] = y
    f0 = np.asarray(rhs(y, t0), dtype=float)
    _check_finite(f0, t0)
    n_evals = 1
    for i in range(n):
        t = ts[i]
        k1 = f0
        k2 = np.asarray(rhs(y + 0.5 * h * k1, t + 0.5 * h), dtype=float)
        k3 = np.asarray(rhs(y + 0.5 * h * k2, t + 0.5 * h), dtype=float)
        k4 = np.asarray(rhs(y + h * k3, t + h), dtype=float)
        y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        f1 = np.asarray(rhs(y_new, t + h), dtype=float)
        _check_finite(np.concatenate([k2, k3, k4, f1]), t)
        n_evals += 4
        # cubic Hermite on (y, f) at the step ends
        delta = (y_new - y) / h
        coeffs[i, :, 0] = k1
        coeffs[i, :, 1] = 3.0 * delta - 2.0 * k1 - f1
        coeffs[i, :, 2] = k1 + f1 - 2.0 * delta
        coeffs[i, :, 3] = 0.0
        y = y_new
        f0 = f1
        ys[i + 1] = y
    return Trajectory(ts, ys, coeffs, n_evals)
