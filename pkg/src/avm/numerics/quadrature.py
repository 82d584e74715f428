"""Definite integrals: adaptive Simpson and composite Gauss-Legendre.

Integrands may return scalars or 1-D arrays; for arrays all components are
driven to the requested tolerance in the max norm within a single pass,
which the period-integral layer uses to evaluate several integrals that
share trajectory evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import NumericalError


class QuadratureError(NumericalError):
    """Base class for quadrature failures."""


class SubdivisionLimitError(QuadratureError):
    """The subdivision/panel budget was exhausted before reaching abs_tol."""


_METHODS = ("adaptive-simpson", "gauss-legendre")


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings.

    For "adaptive-simpson", ``max_subdivisions`` caps the total number of
    panels created.  For "gauss-legendre" it *is* the (fixed) panel count of
    the composite rule; a half-resolution pass provides the error estimate
    checked against ``abs_tol``.
    """

    method: str = "adaptive-simpson"
    abs_tol: float = 1e-10
    max_subdivisions: int = 2**20

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if not self.abs_tol > 0.0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_QUADRATURE = QuadratureSpec()

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def quad(
    f: Callable[[float], float | np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
):
    """Integrate ``f`` over [a, b] to within ``spec.abs_tol`` (smooth f)."""
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0 * np.asarray(f(a), dtype=float)
    if spec.method == "gauss-legendre":
        return _composite_gauss_legendre(f, a, b, spec)
    return _adaptive_simpson(f, a, b, spec)


def _adaptive_simpson(f, a, b, spec: QuadratureSpec):
    fa = np.asarray(f(a), dtype=float)
    m = 0.5 * (a + b)
    fm = np.asarray(f(m), dtype=float)
    fb = np.asarray(f(b), dtype=float)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    total = np.zeros_like(whole)
    panels = 1
    width_floor = 2e-15 * abs(b - a)
    # stack frames: (a, fa, m, fm, b, fb, S(a,b), local tol)
    stack = [(a, fa, m, fm, b, fb, whole, spec.abs_tol)]
    while stack:
        xa, fxa, xm, fxm, xb, fxb, s_whole, tol = stack.pop()
        lm = 0.5 * (xa + xm)
        rm = 0.5 * (xm + xb)
        flm = np.asarray(f(lm), dtype=float)
        frm = np.asarray(f(rm), dtype=float)
        s_left = (xm - xa) / 6.0 * (fxa + 4.0 * flm + fxm)
        s_right = (xb - xm) / 6.0 * (fxm + 4.0 * frm + fxb)
        delta = s_left + s_right - s_whole
        if np.max(np.abs(delta)) <= 15.0 * tol or (xb - xa) <= width_floor:
            total = total + s_left + s_right + delta / 15.0
        else:
            panels += 2
            if panels > spec.max_subdivisions:
                raise SubdivisionLimitError(
                    f"adaptive Simpson exhausted {spec.max_subdivisions} panels"
                )
            half = 0.5 * tol
            stack.append((xa, fxa, lm, flm, xm, fxm, s_left, half))
            stack.append((xm, fxm, rm, frm, xb, fxb, s_right, half))
    return total if total.ndim else float(total)


def _gl_pass(f, a, b, panels: int):
    edges = np.linspace(a, b, panels + 1)
    total = None
    for i in range(panels):
        mid = 0.5 * (edges[i] + edges[i + 1])
        half = 0.5 * (edges[i + 1] - edges[i])
        for node, weight in zip(_GL_NODES, _GL_WEIGHTS):
            val = np.asarray(f(mid + half * node), dtype=float) * (weight * half)
            total = val if total is None else total + val
    return total


def _composite_gauss_legendre(f, a, b, spec: QuadratureSpec):
    fine = _gl_pass(f, a, b, spec.max_subdivisions)
    coarse = _gl_pass(f, a, b, max(1, spec.max_subdivisions // 2))
    if np.max(np.abs(fine - coarse)) > spec.abs_tol:
        raise SubdivisionLimitError(
            f"composite Gauss-Legendre with {spec.max_subdivisions} panels "
            f"did not reach abs_tol={spec.abs_tol}"
        )
    return fine if fine.ndim else float(fine)
