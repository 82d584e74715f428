"""Melnikov analysis of the forced slow flow along the resonant orbit family.

The forcing decomposes into six scalar fields g_ij (three state equations,
two forcing weights).  Period integrals of their weighted combinations along
a family orbit give a 2x2 table of components; the periodic orbit at
(beta1, rho) is predicted to persist when the weight vector (mu1, mu2) lies
in the null space of that table and a nondegeneracy determinant is nonzero.
The scalar determinant of the table ("Mtilde") locates candidate roots, and
closed-form large-radius limits of everything provide seeds and cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .numerics import (
    DEFAULT_INTEGRATOR,
    DEFAULT_QUADRATURE,
    DEFAULT_ROOT,
    IntegratorSpec,
    QuadratureSpec,
    RootSpec,
    find_root_1d,
    integrate,
    quad,
)
from .slowflow import (
    SlowFlowParams,
    family_dK_drho,
    family_state,
    family_K,
    periodic_family,
    rho_for_K,
    unperturbed_rhs,
)


# ---------------------------------------------------------------------------
# forcing decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GField:
    """One scalar forcing field, identified by (equation index, weight index)."""

    index: tuple[int, int]
    evaluator: Callable[[float, float, float, float], float]

    def __call__(self, rho: float, theta: float, delta: float, tau: float) -> float:
        return self.evaluator(rho, theta, delta, tau)


def g_fields(params: SlowFlowParams) -> dict[tuple[int, int], GField]:
    """The six closed-form forcing fields of the perturbed slow flow."""
    P, k, beta1 = params.P, params.k, params.beta1

    def g11(rho, theta, delta, tau):
        return -math.cos(theta) * math.cos(P * tau) * math.cos(k * P * tau + beta1)

    def g12(rho, theta, delta, tau):
        return math.sin(theta) * math.cos(P * tau) * math.cos(k * P * tau + delta + beta1)

    def g21(rho, theta, delta, tau):
        return -math.cos(P * tau) * math.sin(k * P * tau + beta1) / math.sin(theta)

    def g22(rho, theta, delta, tau):
        return math.cos(P * tau) * math.sin(k * P * tau + delta + beta1) / math.cos(theta)

    def g31(rho, theta, delta, tau):
        return -math.sin(theta) * math.cos(P * tau) * math.cos(k * P * tau + beta1)

    def g32(rho, theta, delta, tau):
        return -math.cos(theta) * math.cos(P * tau) * math.cos(k * P * tau + delta + beta1)

    table = {
        (1, 1): g11,
        (1, 2): g12,
        (2, 1): g21,
        (2, 2): g22,
        (3, 1): g31,
        (3, 2): g32,
    }
    return {idx: GField(idx, fn) for idx, fn in table.items()}


def dI_dtheta(theta: float, delta: float) -> float:
    """Gradient of the first integral with respect to the mixing angle."""
    return 2.0 * math.cos(2.0 * theta) * math.sin(delta)


def dI_ddelta(theta: float, delta: float) -> float:
    """Gradient of the first integral with respect to the phase difference."""
    return math.sin(2.0 * theta) * math.cos(delta)


# ---------------------------------------------------------------------------
# component integrals along the family
# ---------------------------------------------------------------------------

class MbarComponents(NamedTuple):
    m11: float
    m12: float
    m21: float
    m22: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def tilde(self) -> float:
        """Determinant m11*m22 - m12*m21 of the component table."""
        return self.m11 * self.m22 - self.m12 * self.m21


def _component_integrand(beta1: float, params: SlowFlowParams, orbit) -> Callable[[float], np.ndarray]:
    """Vector integrand of the four components, in expanded form.

    The first-row components combine the first-integral gradients with the
    forcing fields; the trigonometric ratios cancel analytically, so the
    expanded integrand below stays finite on the whole orbit.
    """
    P, k = params.P, params.k

    def f(tau: float) -> np.ndarray:
        theta, delta = orbit(tau)
        cos2t = math.cos(2.0 * theta)
        sin_t, cos_t = math.sin(theta), math.cos(theta)
        sin_d, cos_d = math.sin(delta), math.cos(delta)
        drive = math.cos(P * tau)
        phase1 = k * P * tau + beta1
        phase2 = phase1 + delta
        c1, s1 = math.cos(phase1), math.sin(phase1)
        c2, s2 = math.cos(phase2), math.sin(phase2)
        m11 = -(2.0 * cos2t * sin_d * cos_t * drive * c1 + 2.0 * cos_t * cos_d * drive * s1)
        m12 = 2.0 * cos2t * sin_d * sin_t * drive * c2 + 2.0 * sin_t * cos_d * drive * s2
        m21 = -sin_t * drive * c1
        m22 = -cos_t * drive * c2
        return np.array([m11, m12, m21, m22])

    return f


def melnikov_bar(
    beta1: float,
    rho: float,
    params: SlowFlowParams,
    quad_spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> MbarComponents:
    """Component table at (beta1, rho) by quadrature along the closed-form orbit."""

    def orbit(tau):
        return periodic_family(rho, tau, params)

    f = _component_integrand(beta1, params, orbit)
    vals = quad(f, 0.0, params.forcing_period, quad_spec)
    return MbarComponents(*(float(v) for v in vals))


def melnikov_bar_from_g(
    beta1: float,
    rho: float,
    params: SlowFlowParams,
    quad_spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> MbarComponents:
    """Same table built from the raw g-fields and first-integral gradients.

    Kept as an independent encoding of the first-row integrands; it divides
    by sin(theta) and cos(theta), so it is the cross-check, not the default.
    """
    g = g_fields(SlowFlowParams(params.P, params.k, params.eps, params.mu1, params.mu2, beta1))

    def orbit(tau):
        return periodic_family(rho, tau, params)

    def f(tau: float) -> np.ndarray:
        theta, delta = orbit(tau)
        it = dI_dtheta(theta, delta)
        idl = dI_ddelta(theta, delta)
        m11 = it * g[(1, 1)](rho, theta, delta, tau) + idl * g[(2, 1)](rho, theta, delta, tau)
        m12 = it * g[(1, 2)](rho, theta, delta, tau) + idl * g[(2, 2)](rho, theta, delta, tau)
        m21 = g[(3, 1)](rho, theta, delta, tau)
        m22 = g[(3, 2)](rho, theta, delta, tau)
        return np.array([m11, m12, m21, m22])

    vals = quad(f, 0.0, params.forcing_period, quad_spec)
    return MbarComponents(*(float(v) for v in vals))


def melnikov_bar_ode_oracle(
    beta1: float,
    rho: float,
    params: SlowFlowParams,
    integrator_spec: IntegratorSpec = DEFAULT_INTEGRATOR,
    quad_spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> MbarComponents:
    """Component table with the orbit supplied by an ODE solve, not closed form."""
    y0 = family_state(rho, 0.0, params)
    traj = integrate(
        lambda y, t: unperturbed_rhs(y, t, params), y0, (0.0, params.forcing_period), integrator_spec
    )

    def orbit(tau):
        y = traj(tau)
        return float(y[1]), float(y[2])

    f = _component_integrand(beta1, params, orbit)
    vals = quad(f, 0.0, params.forcing_period, quad_spec)
    return MbarComponents(*(float(v) for v in vals))


def melnikov_tilde(
    beta1: float,
    rho: float,
    params: SlowFlowParams,
    quad_spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Scalar root function: determinant of the component table."""
    return melnikov_bar(beta1, rho, params, quad_spec).tilde()


def melnikov_full(
    beta1: float,
    rho: float,
    params: SlowFlowParams,
    quad_spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> tuple[float, float]:
    """Unreduced two-component function for the weights in ``params``.

    The first component carries the 1/rho scaling and the slow-radius
    correction with the analytic dK/drho; its zero set coincides with the
    reduced table's, which is why root finding works on the table alone.
    """
    bar = melnikov_bar(beta1, rho, params, quad_spec)
    bar1 = params.mu1 * bar.m11 + params.mu2 * bar.m12
    bar2 = params.mu1 * bar.m21 + params.mu2 * bar.m22
    m1 = bar1 / rho - family_dK_drho(rho, params) * bar2
    return m1, bar2


# ---------------------------------------------------------------------------
# large-radius closed forms
# ---------------------------------------------------------------------------

class AsymptoticMelnikov(NamedTuple):
    m11: float
    m12: float
    m21: float
    m22: float
    mtilde: float


def asymptotic_melnikov(beta1: float, k: int, P: float) -> AsymptoticMelnikov:
    """Closed-form large-radius limits of the component table and Mtilde."""
    if not (isinstance(k, int) and k >= 1):
        raise ValueError("k must be a positive integer")
    denom = (16.0 * k**4 - 40.0 * k**2 + 9.0) * P
    cb, sb = math.cos(beta1), math.sin(beta1)
    m11 = 16.0 * k * (4.0 * k**2 - 5.0) * cb / denom
    m12 = -8.0 * (4.0 * k**2 + 3.0) * sb / denom
    m21 = 4.0 * (4.0 * k**2 + 3.0) * cb / denom
    m22 = -8.0 * k * (4.0 * k**2 - 5.0) * sb / denom
    mtilde = -16.0 * math.sin(2.0 * beta1) / ((4.0 * k**2 - 9.0) * P**2)
    return AsymptoticMelnikov(m11, m12, m21, m22, mtilde)


ASYMPTOTIC_ROOT_PHASES = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)


# ---------------------------------------------------------------------------
# root solving and continuation
# ---------------------------------------------------------------------------

@dataclass
class MelnikovRoot:
    """A root of the scalar equation with its weights and nondegeneracy data.

    ``det_con1`` is the determinant of the gradient matrix built from the
    weighted component gradients in raw (beta1, rho) coordinates; near the
    symmetric branches it legitimately approaches zero, so it is reported,
    not thresholded.
    """

    beta1_0: float
    rho_0: float
    mu1_0: float
    mu2_0: float
    det_con1: float
    mtilde_residual: float
    null_residual: float
    components: MbarComponents
    degenerate_null_space: bool = False


def _null_weights(matrix: np.ndarray, tol: float = 1e-8):
    """Unit null vector of a 2x2 table with the deterministic sign convention."""
    u, s, vt = np.linalg.svd(matrix)
    mu = vt[-1]
    degenerate = bool(s[0] < tol)
    if mu[1] < 0.0 or (abs(mu[1]) < 1e-12 and mu[0] < 0.0):
        mu = -mu
    return float(mu[0]), float(mu[1]), degenerate


def solve_root_system(
    seed_beta1: float,
    seed_rho: float,
    params: SlowFlowParams,
    quad_spec: QuadratureSpec = DEFAULT_QUADRATURE,
    root_spec: RootSpec = DEFAULT_ROOT,
    bracket_halfwidth: float = 0.4,
) -> MelnikovRoot:
    """Refine a root of the scalar equation in beta1 at fixed rho.

    The scalar equation is solved on a bracket around the seed phase; the
    weights are the unit null vector of the component table at the root and
    the nondegeneracy determinant is evaluated with central differences
    (steps 1e-6 in beta1, 1e-4*rho in rho).
    """

    def f(beta1: float) -> float:
        return melnikov_tilde(beta1, seed_rho, params, quad_spec)

    lo = seed_beta1 - bracket_halfwidth
    hi = seed_beta1 + bracket_halfwidth
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0.0 and not (abs(flo) <= root_spec.residual_tol or abs(fhi) <= root_spec.residual_tol):
        lo = seed_beta1 - 1.75 * bracket_halfwidth
        hi = seed_beta1 + 1.75 * bracket_halfwidth
    beta1_0 = find_root_1d(f, (lo, hi), root_spec)

    bar = melnikov_bar(beta1_0, seed_rho, params, quad_spec)
    matrix = bar.as_matrix()
    mu1_0, mu2_0, degenerate = _null_weights(matrix, tol=10.0 * quad_spec.abs_tol)
    null_residual = float(np.max(np.abs(matrix @ np.array([mu1_0, mu2_0]))))

    det = _con1_determinant(beta1_0, seed_rho, (mu1_0, mu2_0), params, quad_spec)
    return MelnikovRoot(
        beta1_0=beta1_0,
        rho_0=seed_rho,
        mu1_0=mu1_0,
        mu2_0=mu2_0,
        det_con1=det,
        mtilde_residual=abs(bar.tilde()),
        null_residual=null_residual,
        components=bar,
        degenerate_null_space=degenerate,
    )


def _con1_determinant(
    beta1: float,
    rho: float,
    mu: tuple[float, float],
    params: SlowFlowParams,
    quad_spec: QuadratureSpec,
) -> float:
    """Determinant of the weighted component gradients in (beta1, rho)."""
    db = 1e-6
    dr = 1e-4 * rho

    def weighted(b: float, r: float) -> np.ndarray:
        bar = melnikov_bar(b, r, params, quad_spec)
        return np.array(
            [mu[0] * bar.m11 + mu[1] * bar.m12, mu[0] * bar.m21 + mu[1] * bar.m22]
        )

    grad_b = (weighted(beta1 + db, rho) - weighted(beta1 - db, rho)) / (2.0 * db)
    grad_r = (weighted(beta1, rho + dr) - weighted(beta1, rho - dr)) / (2.0 * dr)
    return float(grad_b[0] * grad_r[1] - grad_b[1] * grad_r[0])


def continuation(
    seed_beta1: float,
    params: SlowFlowParams,
    K_start: float = 1e-3,
    K_stop: float = 0.5,
    step_factor: float = 0.9,
    quad_spec: QuadratureSpec = DEFAULT_QUADRATURE,
    root_spec: RootSpec = DEFAULT_ROOT,
) -> list[MelnikovRoot]:
    """Track one root branch from the asymptotic regime toward the threshold.

    Radii step geometrically downward (``step_factor`` per step) starting at
    the radius of level ``K_start`` and stopping once the level exceeds
    ``K_stop``; each step warm-starts the phase from the previous root.
    """
    if not 0.0 < K_start < K_stop < 1.0:
        raise ValueError("need 0 < K_start < K_stop < 1")
    roots: list[MelnikovRoot] = []
    rho = rho_for_K(K_start, params)
    rho_end = rho_for_K(K_stop, params)
    beta1 = seed_beta1
    while rho >= rho_end:
        root = solve_root_system(beta1, rho, params, quad_spec, root_spec)
        roots.append(root)
        beta1 = root.beta1_0
        rho *= step_factor
    return roots


# ---------------------------------------------------------------------------
# table over a (beta1, rho) grid
# ---------------------------------------------------------------------------

@dataclass
class MelnikovTable:
    """Component table and its determinant over a (beta1, rho) grid."""

    beta1_values: np.ndarray
    rho_values: np.ndarray
    m11: np.ndarray
    m12: np.ndarray
    m21: np.ndarray
    m22: np.ndarray
    mtilde: np.ndarray
    quad_spec: QuadratureSpec = field(default=DEFAULT_QUADRATURE)


def melnikov_table(
    beta1_values: np.ndarray,
    rho_values: np.ndarray,
    params: SlowFlowParams,
    quad_spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> MelnikovTable:
    """Fill the component table on the given grid (rows: beta1, cols: rho)."""
    beta1_values = np.asarray(beta1_values, dtype=float)
    rho_values = np.asarray(rho_values, dtype=float)
    shape = (beta1_values.size, rho_values.size)
    arrays = {name: np.empty(shape) for name in ("m11", "m12", "m21", "m22", "mtilde")}
    for i, beta1 in enumerate(beta1_values):
        for j, rho in enumerate(rho_values):
            bar = melnikov_bar(float(beta1), float(rho), params, quad_spec)
            arrays["m11"][i, j] = bar.m11
            arrays["m12"][i, j] = bar.m12
            arrays["m21"][i, j] = bar.m21
            arrays["m22"][i, j] = bar.m22
            arrays["mtilde"][i, j] = bar.tilde()
    return MelnikovTable(beta1_values, rho_values, quad_spec=quad_spec, **arrays)


# ---------------------------------------------------------------------------
# bifurcation system of the large-radius corollary
# ---------------------------------------------------------------------------

class BifurcationEval(NamedTuple):
    residual: np.ndarray
    jacobian: np.ndarray
    det: float


def _bifurcation_coefficients(k: int, P: float) -> tuple[float, float, float, float]:
    denom = (16.0 * k**4 - 40.0 * k**2 + 9.0) * P
    a = 16.0 * k * (4.0 * k**2 - 5.0) / denom
    b = 8.0 * (4.0 * k**2 + 3.0) / denom
    c = 4.0 * (4.0 * k**2 + 3.0) / denom
    d = 8.0 * k * (4.0 * k**2 - 5.0) / denom
    return a, b, c, d


def corollary_bifurcation(gamma: float, beta1: float, k: int, P: float) -> BifurcationEval:
    """Large-radius bifurcation system with weights (sin gamma, cos gamma).

    Returns the residual pair, the analytic Jacobian in (gamma, beta1), and
    its determinant.  At the sin-branch zeros the determinant carries the
    cos^2 factors with a minus sign; at the cos-branch zeros the sin^2
    factors with a plus sign.
    """
    if not (isinstance(k, int) and k >= 1):
        raise ValueError("k must be a positive integer")
    a, b, c, d = _bifurcation_coefficients(k, P)
    sg, cg = math.sin(gamma), math.cos(gamma)
    sb, cb = math.sin(beta1), math.cos(beta1)
    residual = np.array([a * sg * cb - b * cg * sb, c * sg * cb - d * cg * sb])
    jacobian = np.array(
        [
            [a * cg * cb + b * sg * sb, -a * sg * sb - b * cg * cb],
            [c * cg * cb + d * sg * sb, -c * sg * sb - d * cg * cb],
        ]
    )
    det = float(jacobian[0, 0] * jacobian[1, 1] - jacobian[0, 1] * jacobian[1, 0])
    return BifurcationEval(residual, jacobian, det)


def bifurcation_system_determinant(k: int, P: float) -> float:
    """Determinant of the linear system in (sin(gamma)cos(beta1), cos(gamma)sin(beta1)).

    Computed from the coefficient matrix; algebraically it collapses to
    -32 / ((4 k^2 - 9) P^2), which tests pin against this value.
    """
    a, b, c, d = _bifurcation_coefficients(k, P)
    return b * c - a * d
