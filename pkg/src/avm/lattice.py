"""Lattice models: exact in-plane chain, reduced transverse system, modal forms.

The exact chain couples N identical particles through identical linear
springs with fixed ends, optional damping and transverse modal forcing.  In
the low-energy regime its transverse motion is governed by a reduced system
whose only stiffness is the geometric (cubic) one -- the "acoustic vacuum".
The reduced system diagonalizes exactly in the sine-mode basis, giving the
modal and two-mode forms used by the averaging and Melnikov layers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NumericalError
from .numerics import DEFAULT_INTEGRATOR, IntegratorSpec, integrate

# quarter-period shape constant of u'' + g*u^3 = 0: integral of
# (1 - x^4)^(-1/2) over [0, 1]; see tests for the quadrature cross-check.
QUARTIC_PERIOD_CONSTANT = 1.3110287771460598


class DegenerateSpringError(NumericalError):
    """A spring collapsed to zero length, so its direction is undefined."""


@dataclass(frozen=True)
class ModalForcing:
    """Transverse forcing shaped like mode ``mode`` with the given amplitude.

    ``frequency`` defaults to the mode's natural linear frequency; overriding
    it is a config extension and off by default.
    """

    mode: int
    amplitude: float
    frequency: float | None = None


@dataclass(frozen=True)
class LatticeConfig:
    n: int
    damping: float = 0.0
    forcing: tuple[ModalForcing, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("particle count must be at least 1")
        if self.damping < 0.0:
            raise ValueError("damping must be nonnegative")
        for entry in self.forcing:
            if not 1 <= entry.mode <= self.n:
                raise ValueError(f"forcing mode {entry.mode} out of range 1..{self.n}")


@dataclass
class LatticeState:
    """Normalized axial (s) and transverse (w) displacements and velocities."""

    s: np.ndarray
    w: np.ndarray
    s_dot: np.ndarray
    w_dot: np.ndarray

    @classmethod
    def zero(cls, n: int) -> "LatticeState":
        return cls(np.zeros(n), np.zeros(n), np.zeros(n), np.zeros(n))

    @classmethod
    def from_vector(cls, y: np.ndarray, n: int) -> "LatticeState":
        y = np.asarray(y, dtype=float)
        if y.size != 4 * n:
            raise ValueError(f"state vector must have length {4 * n}")
        return cls(y[:n].copy(), y[n : 2 * n].copy(), y[2 * n : 3 * n].copy(), y[3 * n :].copy())

    def pack(self) -> np.ndarray:
        return np.concatenate([self.s, self.w, self.s_dot, self.w_dot])


def nnm_frequency(p: int, n: int) -> float:
    """Natural frequency of the p-th linear mode, 2*sin(pi*p/(2*(n+1)))."""
    if not 1 <= p <= n:
        raise ValueError(f"mode index {p} out of range 1..{n}")
    return 2.0 * math.sin(math.pi * p / (2.0 * (n + 1)))


def mode_shape(p: int, n: int) -> np.ndarray:
    """Sine mode shape with components sin(pi*p*i/(n+1)), i = 1..n."""
    if not 1 <= p <= n:
        raise ValueError(f"mode index {p} out of range 1..{n}")
    i = np.arange(1, n + 1)
    return np.sin(math.pi * p * i / (n + 1))


def lattice_matrix(n: int) -> np.ndarray:
    """Tridiagonal stiffness-shape matrix (2 on the diagonal, -1 off it)."""
    m = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return m


def transverse_forcing(tau: float, cfg: LatticeConfig) -> np.ndarray:
    """Per-particle transverse force: sum of mode-shaped harmonics."""
    f = np.zeros(cfg.n)
    for entry in cfg.forcing:
        omega = entry.frequency if entry.frequency is not None else nnm_frequency(entry.mode, cfg.n)
        f += entry.amplitude * math.cos(omega * tau) * mode_shape(entry.mode, cfg.n)
    return f


def _spring_geometry(s: np.ndarray, w: np.ndarray):
    """Per-spring elongation and direction cosines, springs 0..N with fixed ends."""
    s_pad = np.concatenate([[0.0], s, [0.0]])
    w_pad = np.concatenate([[0.0], w, [0.0]])
    dw = w_pad[1:] - w_pad[:-1]
    axial = 1.0 + s_pad[1:] - s_pad[:-1]
    length = np.sqrt(dw * dw + axial * axial)
    if np.any(length < 1e-12):
        raise DegenerateSpringError("a spring collapsed to zero length")
    return dw, axial, length


def exact_lattice_rhs(y: np.ndarray, tau: float, cfg: LatticeConfig) -> np.ndarray:
    """First-order field of the exact chain on the packed state (s, w, s', w')."""
    n = cfg.n
    y = np.asarray(y, dtype=float)
    s, w = y[:n], y[n : 2 * n]
    s_dot, w_dot = y[2 * n : 3 * n], y[3 * n :]
    dw, axial, length = _spring_geometry(s, w)
    delta = length - 1.0
    cos_phi = axial / length
    sin_phi = dw / length

    sd_pad = np.concatenate([[0.0], s_dot, [0.0]])
    wd_pad = np.concatenate([[0.0], w_dot, [0.0]])
    dwd = wd_pad[1:] - wd_pad[:-1]
    dsd = sd_pad[1:] - sd_pad[:-1]
    delta_dot = (dw * dwd + axial * dsd) / length

    tension = delta + cfg.damping * delta_dot
    s_acc = np.diff(tension * cos_phi)
    w_acc = np.diff(tension * sin_phi)
    if cfg.forcing:
        w_acc = w_acc + transverse_forcing(tau, cfg)
    return np.concatenate([s_dot, w_dot, s_acc, w_acc])


def lattice_energy(y: np.ndarray, cfg: LatticeConfig) -> float:
    """Kinetic plus spring energy (a conserved quantity when c = 0, unforced)."""
    n = cfg.n
    y = np.asarray(y, dtype=float)
    s, w = y[:n], y[n : 2 * n]
    s_dot, w_dot = y[2 * n : 3 * n], y[3 * n :]
    _, _, length = _spring_geometry(s, w)
    delta = length - 1.0
    return 0.5 * float(s_dot @ s_dot + w_dot @ w_dot) + 0.5 * float(delta @ delta)


def reduced_rhs(w: np.ndarray, tau: float = 0.0) -> np.ndarray:
    """Transverse accelerations of the reduced system (fixed ends applied)."""
    w = np.asarray(w, dtype=float)
    n = w.size
    w_pad = np.concatenate([[0.0], w, [0.0]])
    dw = w_pad[1:] - w_pad[:-1]
    stretch = float(dw @ dw)
    mw = 2.0 * w_pad[1:-1] - w_pad[2:] - w_pad[:-2]
    return -0.5 / (n + 1) * stretch * mw


def reduced_first_order(y: np.ndarray, tau: float = 0.0) -> np.ndarray:
    """Reduced system as a first-order field on (w, w')."""
    y = np.asarray(y, dtype=float)
    n = y.size // 2
    return np.concatenate([y[n:], reduced_rhs(y[:n], tau)])


def reduced_energy(w: np.ndarray, w_dot: np.ndarray) -> float:
    """Conserved energy of the reduced system."""
    w = np.asarray(w, dtype=float)
    w_dot = np.asarray(w_dot, dtype=float)
    n = w.size
    w_pad = np.concatenate([[0.0], w, [0.0]])
    dw = w_pad[1:] - w_pad[:-1]
    stretch = float(dw @ dw)
    return 0.5 * float(w_dot @ w_dot) + stretch * stretch / (8.0 * (n + 1))


@dataclass
class ModalState:
    """Modal amplitudes/velocities plus the coordinate convention flag.

    Convention "C": plain coefficients in the sine-mode basis.  Convention
    "A": rescaled amplitudes (natural frequency / 2 times the C coefficient),
    which turn the modal equations into the symmetric cubic form.
    """

    amplitudes: np.ndarray
    velocities: np.ndarray
    convention: str = "C"

    def __post_init__(self) -> None:
        if self.convention not in ("C", "A"):
            raise ValueError("convention must be 'C' or 'A'")

    def pack(self) -> np.ndarray:
        return np.concatenate([self.amplitudes, self.velocities])


def modal_accel(
    c: np.ndarray,
    tau: float,
    forcing: Sequence[ModalForcing],
    n: int,
    convention: str = "C",
) -> np.ndarray:
    """Modal accelerations in either coordinate convention.

    "C":  C_p'' = -(1/4) (sum_i C_i^2 w_i^2) w_p^2 C_p + F_p cos(w_p tau)
    "A":  A_p'' = -(sum_i A_i^2) w_p^2 A_p + (F_p w_p / 2) cos(w_p tau)
    """
    c = np.asarray(c, dtype=float)
    omega = np.array([nnm_frequency(p, n) for p in range(1, n + 1)])
    if convention == "C":
        acc = -0.25 * float(np.sum(c * c * omega * omega)) * omega * omega * c
    elif convention == "A":
        acc = -float(np.sum(c * c)) * omega * omega * c
    else:
        raise ValueError("convention must be 'C' or 'A'")
    for entry in forcing:
        freq = entry.frequency if entry.frequency is not None else omega[entry.mode - 1]
        drive = entry.amplitude * math.cos(freq * tau)
        if convention == "A":
            drive *= 0.5 * omega[entry.mode - 1]
        acc[entry.mode - 1] += drive
    return acc


def modal_rhs(
    y: np.ndarray,
    tau: float,
    forcing: Sequence[ModalForcing],
    n: int,
    convention: str = "C",
) -> np.ndarray:
    """Modal equations as a first-order field on (amplitudes, velocities)."""
    y = np.asarray(y, dtype=float)
    return np.concatenate([y[n:], modal_accel(y[:n], tau, forcing, n, convention)])


def modal_to_lattice(c: np.ndarray, n: int) -> np.ndarray:
    """Reconstruct transverse displacements from C-convention coefficients."""
    c = np.asarray(c, dtype=float)
    w = np.zeros(n)
    for p in range(1, n + 1):
        w += c[p - 1] * mode_shape(p, n)
    return w


def lattice_to_modal(w: np.ndarray, n: int) -> np.ndarray:
    """Project transverse displacements onto the sine modes (C convention)."""
    w = np.asarray(w, dtype=float)
    return np.array([2.0 / (n + 1) * float(w @ mode_shape(p, n)) for p in range(1, n + 1)])


@dataclass(frozen=True)
class TwoModeParams:
    omega_k: float
    omega_p: float
    eps: float = 0.0
    mu1: float = 0.0
    mu2: float = 0.0


def two_mode_rhs(y: np.ndarray, tau: float, params: TwoModeParams) -> np.ndarray:
    """Two coupled modes in A coordinates with weighted harmonic forcing."""
    a_k, a_k_dot, a_p, a_p_dot = y
    coupling = a_k * a_k + a_p * a_p
    acc_k = -coupling * params.omega_k**2 * a_k - params.eps * params.mu1 * math.cos(params.omega_k * tau)
    acc_p = -coupling * params.omega_p**2 * a_p - params.eps * params.mu2 * math.cos(params.omega_p * tau)
    return np.array([a_k_dot, acc_k, a_p_dot, acc_p])


def two_mode_energy(y: np.ndarray, params: TwoModeParams) -> float:
    """Conserved quantity of the unforced two-mode system."""
    a_k, a_k_dot, a_p, a_p_dot = y
    return (
        0.5 * (a_k_dot**2 / params.omega_k**2 + a_p_dot**2 / params.omega_p**2)
        + 0.25 * (a_k**2 + a_p**2) ** 2
    )


def nnm_period(amplitude: float, omega: float) -> float:
    """Period of the single-mode oscillation C'' + (1/4) w^4 C^3 = 0 at rest start."""
    if amplitude <= 0.0 or omega <= 0.0:
        raise ValueError("amplitude and frequency must be positive")
    gamma = 0.25 * omega**4
    return 4.0 * QUARTIC_PERIOD_CONSTANT * math.sqrt(2.0 / gamma) / amplitude


@dataclass(frozen=True)
class ComparisonReport:
    """Exact-vs-reduced mismatch over a horizon, plus conservation diagnostics."""

    mismatch: float
    horizon: float
    samples: int
    energy_drift_exact: float


def compare_exact_vs_reduced(
    cfg: LatticeConfig,
    amplitude_scale: float,
    horizon: float,
    mode: int = 1,
    samples_per_period: int = 101,
    spec: IntegratorSpec = DEFAULT_INTEGRATOR,
) -> ComparisonReport:
    """Run the exact chain and the reduced system from matched single-mode data.

    Transverse initial data is amplitude_scale times the chosen mode shape,
    axial data zero; the report carries the sup-norm transverse mismatch over
    the sampled horizon.  Meant for the undamped, unforced low-energy regime.
    """
    n = cfg.n
    w0 = amplitude_scale * mode_shape(mode, n)
    if amplitude_scale == 0.0:
        return ComparisonReport(0.0, horizon, 0, 0.0)
    y0_exact = np.concatenate([np.zeros(n), w0, np.zeros(n), np.zeros(n)])
    y0_reduced = np.concatenate([w0, np.zeros(n)])
    traj_exact = integrate(lambda y, t: exact_lattice_rhs(y, t, cfg), y0_exact, (0.0, horizon), spec)
    traj_reduced = integrate(reduced_first_order, y0_reduced, (0.0, horizon), spec)

    period = nnm_period(abs(amplitude_scale), nnm_frequency(mode, n))
    samples = max(2, int(math.ceil(horizon / period * (samples_per_period - 1))) + 1)
    ts = np.linspace(0.0, horizon, samples)
    w_exact = traj_exact(ts)[:, n : 2 * n]
    w_reduced = traj_reduced(ts)[:, :n]
    mismatch = float(np.max(np.abs(w_exact - w_reduced)))

    e0 = lattice_energy(y0_exact, cfg)
    e1 = lattice_energy(traj_exact.y_end, cfg)
    return ComparisonReport(mismatch, horizon, samples, abs(e1 - e0))
