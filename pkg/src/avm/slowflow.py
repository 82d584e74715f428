"""Averaged two-mode slow flow: perturbed system, integrable core, orbit family.

State is the triple (rho, theta, delta): a radius-like amplitude, a mode
mixing angle in (0, pi/2), and the phase difference in (0, pi).  With the
forcing off the flow conserves rho and the first integral
I = sin(2 theta) sin(delta), whose level sets are closed orbits with known
closed-form solutions.  For every rho above a threshold one level set closes
after exactly the forcing period 2 pi / P; that one-parameter family is what
the Melnikov layer integrates along.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .numerics import DEFAULT_INTEGRATOR, IntegratorSpec, integrate

_SINGULAR_GUARD = 1e-12


class SingularPhaseError(NumericalError):
    """Forcing terms divide by sin(theta) or cos(theta); the state is too close."""


class BelowFamilyThresholdError(ValueError):
    """rho is at or below the existence threshold of the resonant orbit family."""


@dataclass(frozen=True)
class SlowFlowParams:
    """Parameters of the perturbed slow flow.

    ``P`` is the shared linear mode frequency, ``k`` the integer multiple
    setting the rotating-frame rate k*P, ``eps`` the forcing size, and
    (mu1, mu2) the unit-circle forcing weights.  ``beta1`` is the constant
    phase offset of the forcing.
    """

    P: float = 1.0
    k: int = 1
    eps: float = 0.0
    mu1: float = 0.0
    mu2: float = 1.0
    beta1: float = 0.0

    def __post_init__(self) -> None:
        if not self.P > 0.0:
            raise ValueError("P must be positive")
        if not (isinstance(self.k, int) and self.k >= 1):
            raise ValueError("k must be a positive integer")
        if abs(self.mu1**2 + self.mu2**2 - 1.0) > 1e-12:
            raise ValueError("forcing weights must satisfy mu1^2 + mu2^2 = 1")

    @property
    def omega(self) -> float:
        """Rotating-frame rate k*P."""
        return self.k * self.P

    @property
    def forcing_period(self) -> float:
        return 2.0 * math.pi / self.P


@dataclass
class SlowFlowState:
    rho: float
    theta: float
    delta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.rho, self.theta, self.delta])

    @classmethod
    def from_array(cls, y: np.ndarray) -> "SlowFlowState":
        return cls(float(y[0]), float(y[1]), float(y[2]))


@dataclass(frozen=True)
class OrbitFamilyPoint:
    """A resonant family member: radius, first-integral level, period."""

    rho: float
    K: float
    period: float


def _acot(x: float) -> float:
    """Inverse cotangent with range (0, pi), continuous through x = 0."""
    return 0.5 * math.pi - math.atan(x)


def _clamped_acos(x: float) -> float:
    if x > 1.0:
        if x > 1.0 + 1e-12:
            raise ValueError(f"acos argument {x} out of range")
        x = 1.0
    elif x < -1.0:
        if x < -1.0 - 1e-12:
            raise ValueError(f"acos argument {x} out of range")
        x = -1.0
    return math.acos(x)


def slow_flow_rhs(y: np.ndarray, tau: float, params: SlowFlowParams) -> np.ndarray:
    """Field of the periodically perturbed slow flow on (rho, theta, delta)."""
    rho, theta, delta = float(y[0]), float(y[1]), float(y[2])
    k, P, eps = params.k, params.P, params.eps
    kp3 = k**3 * P**3
    sin2t = math.sin(2.0 * theta)
    cos2t = math.cos(2.0 * theta)
    sin_d = math.sin(delta)
    rho_dot = 0.0
    theta_dot = -(rho * rho) / (16.0 * kp3) * sin2t * math.sin(2.0 * delta)
    delta_dot = (rho * rho) / (4.0 * kp3) * cos2t * sin_d * sin_d
    if eps != 0.0:
        sin_t = math.sin(theta)
        cos_t = math.cos(theta)
        if abs(sin_t) < _SINGULAR_GUARD or abs(cos_t) < _SINGULAR_GUARD or rho == 0.0:
            raise SingularPhaseError(
                f"perturbed field is singular near theta={theta!r}, rho={rho!r}"
            )
        drive = math.cos(P * tau)
        phase1 = k * P * tau + params.beta1
        phase2 = phase1 + delta
        c1, s1 = math.cos(phase1), math.sin(phase1)
        c2, s2 = math.cos(phase2), math.sin(phase2)
        rho_dot += -eps * params.mu1 * sin_t * drive * c1 - eps * params.mu2 * cos_t * drive * c2
        theta_dot += (
            -eps * params.mu1 * (cos_t / rho) * drive * c1
            + eps * params.mu2 * (sin_t / rho) * drive * c2
        )
        delta_dot += (
            -eps * params.mu1 / (rho * sin_t) * drive * s1
            + eps * params.mu2 / (rho * cos_t) * drive * s2
        )
    return np.array([rho_dot, theta_dot, delta_dot])


def unperturbed_rhs(y: np.ndarray, tau: float, params: SlowFlowParams) -> np.ndarray:
    """Forcing-free slow flow (rho is constant along it)."""
    rho, theta, delta = float(y[0]), float(y[1]), float(y[2])
    kp3 = params.k**3 * params.P**3
    sin_d = math.sin(delta)
    return np.array(
        [
            0.0,
            -(rho * rho) / (16.0 * kp3) * math.sin(2.0 * theta) * math.sin(2.0 * delta),
            (rho * rho) / (4.0 * kp3) * math.cos(2.0 * theta) * sin_d * sin_d,
        ]
    )


def unperturbed_rhs_tau2(y: np.ndarray, tau2: float = 0.0) -> np.ndarray:
    """Integrable core on (theta, delta) in the rescaled time."""
    theta, delta = float(y[0]), float(y[1])
    sin_d = math.sin(delta)
    return np.array(
        [
            -0.5 * math.sin(2.0 * theta) * math.sin(2.0 * delta),
            2.0 * math.cos(2.0 * theta) * sin_d * sin_d,
        ]
    )


def time_rescale(rho: float, params: SlowFlowParams) -> float:
    """Factor mapping tau to the core's time: tau2 = rho^2 / (8 k^3 P^3) * tau."""
    return rho * rho / (8.0 * params.k**3 * params.P**3)


def first_integral(theta: float, delta: float) -> float:
    """Conserved quantity sin(2 theta) sin(delta) of the unperturbed flow."""
    return math.sin(2.0 * theta) * math.sin(delta)


def exact_solution_tau2(K: float, tau2):
    """Closed-form orbit of the core on the level set I = K, K in (0, 1).

    Starts at theta = 0.5*acos(sqrt(1 - K^2)), delta = pi/2 and has period
    pi / K.  ``tau2`` may be a scalar or an array.
    """
    if not 0.0 < K < 1.0:
        raise ValueError(f"level K={K} outside (0, 1)")
    root = math.sqrt(1.0 - K * K)
    tau2_arr = np.asarray(tau2, dtype=float)
    theta = 0.5 * np.arccos(np.clip(root * np.cos(2.0 * K * tau2_arr), -1.0, 1.0))
    delta = math.pi - (0.5 * math.pi - np.arctan((root / K) * np.sin(2.0 * K * tau2_arr)))
    if tau2_arr.ndim == 0:
        return float(theta), float(delta)
    return theta, delta


def tau2_period(K: float) -> float:
    """Period pi / K of the core orbit on level K."""
    if not 0.0 < K < 1.0:
        raise ValueError(f"level K={K} outside (0, 1)")
    return math.pi / K


def rho_threshold(params: SlowFlowParams) -> float:
    """Smallest radius carrying a forcing-period orbit: 2 k P^2 sqrt(k)."""
    return 2.0 * params.k * params.P**2 * math.sqrt(params.k)


def family_K(rho: float, params: SlowFlowParams) -> float:
    """First-integral level of the resonant orbit at radius rho."""
    _require_above_threshold(rho, params)
    return 4.0 * params.k**3 * params.P**4 / (rho * rho)


def rho_for_K(K: float, params: SlowFlowParams) -> float:
    """Radius whose resonant orbit sits on level K."""
    if not 0.0 < K < 1.0:
        raise ValueError(f"level K={K} outside (0, 1)")
    return math.sqrt(4.0 * params.k**3 * params.P**4 / K)


def family_dK_drho(rho: float, params: SlowFlowParams) -> float:
    """Analytic derivative of the family level with respect to rho."""
    _require_above_threshold(rho, params)
    return -8.0 * params.k**3 * params.P**4 / rho**3


def family_point(rho: float, params: SlowFlowParams) -> OrbitFamilyPoint:
    return OrbitFamilyPoint(rho, family_K(rho, params), params.forcing_period)


def _require_above_threshold(rho: float, params: SlowFlowParams) -> None:
    if not rho > rho_threshold(params):
        raise BelowFamilyThresholdError(
            f"rho={rho} is not above the family threshold {rho_threshold(params)}"
        )


def periodic_family(rho: float, tau, params: SlowFlowParams):
    """The forcing-period orbit at radius rho (closed form).

    Valid for rho above the threshold; ``tau`` may be scalar or array.
    """
    _require_above_threshold(rho, params)
    k, P = params.k, params.P
    spread = math.sqrt(rho**4 - 16.0 * k**6 * P**8)
    tau_arr = np.asarray(tau, dtype=float)
    theta = 0.5 * np.arccos(np.clip(spread / rho**2 * np.cos(P * tau_arr), -1.0, 1.0))
    delta = 0.5 * math.pi + np.arctan(spread / (4.0 * k**3 * P**4) * np.sin(P * tau_arr))
    if tau_arr.ndim == 0:
        return float(theta), float(delta)
    return theta, delta


def family_state(rho: float, tau: float, params: SlowFlowParams) -> np.ndarray:
    """Full (rho, theta, delta) state on the resonant orbit at time tau."""
    theta, delta = periodic_family(rho, tau, params)
    return np.array([rho, theta, delta])


def family_limit(tau, params: SlowFlowParams):
    """Large-radius limit of the family: a tent in theta, a square wave in delta.

    theta -> P tau / 2 on the first half-period and pi - P tau / 2 on the
    second; delta -> pi (first half), 0 (second half), pi/2 at the switches.
    """
    P = params.P
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    phase = np.mod(P * tau_arr, 2.0 * math.pi)
    theta = np.where(phase <= math.pi, 0.5 * phase, math.pi - 0.5 * phase)
    delta = np.where(np.isclose(np.sin(phase), 0.0, atol=1e-15), 0.5 * math.pi,
                     np.where(phase < math.pi, math.pi, 0.0))
    if np.asarray(tau).ndim == 0:
        return float(theta[0]), float(delta[0])
    return theta, delta


def family_residual(
    rho: float,
    params: SlowFlowParams,
    spec: IntegratorSpec = DEFAULT_INTEGRATOR,
) -> float:
    """Integrate the unperturbed flow once around the forcing period.

    Returns the sup-norm distance between the endpoint and the family's
    starting state; the closed form predicts an exact return.
    """
    y0 = family_state(rho, 0.0, params)
    traj = integrate(lambda y, t: unperturbed_rhs(y, t, params), y0, (0.0, params.forcing_period), spec)
    return float(np.max(np.abs(traj.y_end - y0)))
