"""Root finding: bracketed 1-D (Brent) and damped Newton in R^n.

The n-dimensional solver uses central-difference Jacobians and a
backtracking line search; it returns the finite-difference Jacobian at the
root so callers can inspect conditioning (continuation, nondegeneracy
checks, Floquet-style diagnostics).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ..errors import NumericalError

_EPS = np.finfo(float).eps


class RootFindError(NumericalError):
    """Base class for root-finding failures."""


class NoSignChangeError(RootFindError):
    """The supplied bracket does not straddle a sign change."""


class SingularJacobianError(RootFindError):
    """Newton hit a (numerically) singular Jacobian."""


class DivergenceError(RootFindError):
    """Newton iterates ran away."""


class ConvergenceError(RootFindError):
    """Iteration budget or step tolerance hit before the residual tolerance.

    Carries the last iterate and residual; near-degenerate roots make these
    worth reporting rather than discarding.
    """

    def __init__(self, message: str, x=None, residual: float | None = None):
        super().__init__(message)
        self.x = x
        self.residual = residual


@dataclass(frozen=True)
class RootSpec:
    residual_tol: float = 1e-10
    step_tol: float = 1e-13
    max_iter: int = 80
    fd_jacobian_step: float = 1e-6

    def __post_init__(self) -> None:
        if not (self.residual_tol > 0.0 and self.step_tol > 0.0 and self.fd_jacobian_step > 0.0):
            raise ValueError("root-finding tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT_ROOT = RootSpec()


class NdRootResult(NamedTuple):
    root: np.ndarray
    jacobian: np.ndarray
    residual: float
    iterations: int


def find_root_1d(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    spec: RootSpec = DEFAULT_ROOT,
) -> float:
    """Brent's method on a sign-changing bracket; stops on |f| <= residual_tol."""
    a, b = float(bracket[0]), float(bracket[1])
    fa, fb = float(f(a)), float(f(b))
    if abs(fa) <= spec.residual_tol:
        return a
    if abs(fb) <= spec.residual_tol:
        return b
    if fa * fb > 0.0:
        raise NoSignChangeError(f"f({a}) = {fa} and f({b}) = {fb} have the same sign")
    c, fc = a, fa
    d = e = b - a
    for _ in range(spec.max_iter):
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * spec.step_tol
        xm = 0.5 * (c - b)
        if abs(fb) <= spec.residual_tol:
            return b
        if abs(xm) <= tol1:
            raise ConvergenceError(
                "bracket collapsed before reaching the residual tolerance",
                x=b,
                residual=abs(fb),
            )
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, xm)
        fb = float(f(b))
    raise ConvergenceError("max_iter exceeded in find_root_1d", x=b, residual=abs(fb))


def finite_difference_jacobian(
    F: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray,
    step_scale: float = 1e-6,
) -> np.ndarray:
    """Central-difference Jacobian with per-coordinate step step_scale*max(1, |x_i|)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    J = np.empty((n, n))
    for i in range(n):
        h = step_scale * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        J[:, i] = (np.asarray(F(xp), dtype=float) - np.asarray(F(xm), dtype=float)) / (2.0 * h)
    return J


def find_root_nd(
    F: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float] | np.ndarray,
    spec: RootSpec = DEFAULT_ROOT,
) -> NdRootResult:
    """Damped Newton for F(x) = 0; returns the root and the FD Jacobian there."""
    x = np.array(x0, dtype=float, copy=True)
    Fx = np.asarray(F(x), dtype=float)
    if not np.all(np.isfinite(Fx)):
        raise RootFindError("F(x0) is not finite")
    for it in range(spec.max_iter):
        res = float(np.max(np.abs(Fx)))
        if res <= spec.residual_tol:
            J = finite_difference_jacobian(F, x, spec.fd_jacobian_step)
            return NdRootResult(x, J, res, it)
        J = finite_difference_jacobian(F, x, spec.fd_jacobian_step)
        try:
            step = np.linalg.solve(J, -Fx)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobianError(f"singular Jacobian at iterate {it}") from exc
        if not np.all(np.isfinite(step)):
            raise SingularJacobianError(f"non-finite Newton step at iterate {it}")
        # backtracking line search, at most 30 halvings
        norm0 = float(np.max(np.abs(Fx)))
        lam = 1.0
        accepted = False
        for _ in range(30):
            x_try = x + lam * step
            F_try = np.asarray(F(x_try), dtype=float)
            if np.all(np.isfinite(F_try)) and float(np.max(np.abs(F_try))) < (1.0 - 1e-4 * lam) * norm0:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            raise ConvergenceError(
                "line search failed to reduce the residual", x=x, residual=norm0
            )
        step_size = float(np.max(np.abs(lam * step)))
        x = x_try
        Fx = F_try
        if float(np.max(np.abs(x))) > 1e12:
            raise DivergenceError("Newton iterates diverged (|x| > 1e12)")
        if step_size <= spec.step_tol * (1.0 + float(np.max(np.abs(x)))):
            res = float(np.max(np.abs(Fx)))
            if res <= spec.residual_tol:
                J = finite_difference_jacobian(F, x, spec.fd_jacobian_step)
                return NdRootResult(x, J, res, it + 1)
            raise ConvergenceError(
                "Newton stagnated before the residual tolerance", x=x, residual=res
            )
    raise ConvergenceError(
        "max_iter exceeded in find_root_nd", x=x, residual=float(np.max(np.abs(Fx)))
    )
