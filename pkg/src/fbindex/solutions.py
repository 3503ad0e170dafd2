"""Exact evaluation of the three global one-phase solutions.

The plane solution ``max(x1, 0)``, the disk-complement solution
``max(log|x|, 0)`` and the double hairpin solution, realized through the
strip chart

    Phi(w) = w + sinh(w),      u(Phi(w)) = Re cosh(w),

with ``w = s + i*t`` on the strip ``|t| <= pi/2``.  The chart maps the
boundary lines ``t = +-pi/2`` onto the catenary curves
``x2 = +-(pi/2 + cosh x1)``.  The associated holomorphic gradient is
``G = u_x1 - i*u_x2``; for the hairpin ``G(Phi(w)) = tanh(w/2)``, for the
disk complement ``G(z) = 1/z``.  All quantities (gradients, |D^2 u|^2,
boundary curvature) are closed forms, exact to double precision.

For PLANE and DISK_COMPLEMENT points are planar coordinates (complex or a
2-sequence); for HAIRPIN the caller supplies the strip coordinate ``w``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate

from .errors import DomainError, UnsupportedOperationError

STRIP_HALF_WIDTH = math.pi / 2
# Hyperbolic overflow guard: all desk-scale truncations live well inside.
S_MAX = 25.0
_TOL = 1e-9


class SolutionKind(Enum):
    PLANE = "plane"
    DISK_COMPLEMENT = "disk-complement"
    HAIRPIN = "hairpin"

    @classmethod
    def parse(cls, name: str) -> "SolutionKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise ValueError(f"unknown solution kind {name!r}")


@dataclass(frozen=True)
class BoundaryPoint:
    """One free-boundary sample: position, frame, curvature and arclength weight."""

    point: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    mean_curvature: float
    arclen_density: float


@dataclass(frozen=True)
class MappedPoint:
    """Image of a disk coordinate under G^{-1}: physical z, strip w for the hairpin."""

    z: complex
    w: complex | None = None


def _as_complex(point) -> complex:
    if isinstance(point, complex):
        return point
    if isinstance(point, (int, float, np.floating)):
        return complex(point)
    x, y = point
    return complex(float(x), float(y))


def n_branches(kind: SolutionKind) -> int:
    return 2 if kind is SolutionKind.HAIRPIN else 1


def strip_map(w: complex) -> tuple[complex, complex]:
    """Chart map z = w + sinh(w) and its complex Jacobian dz/dw = 1 + cosh(w)."""
    w = complex(w)
    if abs(w.imag) > STRIP_HALF_WIDTH + _TOL:
        raise DomainError(f"strip coordinate {w} outside |Im w| <= pi/2")
    if abs(w.real) > S_MAX:
        raise DomainError(f"strip coordinate {w} outside overflow guard |Re w| <= {S_MAX}")
    return w + cmath.sinh(w), 1.0 + cmath.cosh(w)


def strip_inverse(z: complex, w0: complex | None = None) -> complex:
    """Invert the chart by Newton iteration.

    The Jacobian 1 + cosh(w) has positive real part on the open strip, so the
    iteration is well conditioned away from the boundary corners.
    """
    z = complex(z)
    seeds = [w0] if w0 is not None else []
    seeds += [0.5 * z, cmath.asinh(z), z]
    for seed in seeds:
        w = complex(seed)
        for _ in range(80):
            f = w + cmath.sinh(w) - z
            if abs(f) <= 1e-13 * (1.0 + abs(z)):
                break
            jac = 1.0 + cmath.cosh(w)
            if jac == 0:
                break
            w = w - f / jac
        if abs(w + cmath.sinh(w) - z) <= 1e-10 * (1.0 + abs(z)) and abs(w.imag) <= STRIP_HALF_WIDTH + 1e-9:
            return w
    raise DomainError(f"point {z} not invertible into the strip chart")


def evaluate(kind: SolutionKind, point) -> tuple[float, np.ndarray, float]:
    """Evaluate (u, grad u, |D^2 u|^2) at a point of the closed positive phase.

    ``point`` is a strip coordinate for HAIRPIN, planar otherwise.
    """
    if kind is SolutionKind.PLANE:
        z = _as_complex(point)
        if z.real < -_TOL:
            raise DomainError(f"point {z} outside the closed half-plane x1 >= 0")
        return max(z.real, 0.0), np.array([1.0, 0.0]), 0.0

    if kind is SolutionKind.DISK_COMPLEMENT:
        z = _as_complex(point)
        r = abs(z)
        if r < 1.0 - _TOL:
            raise DomainError(f"point {z} inside the unit disk")
        r = max(r, 1.0)
        u = math.log(r)
        grad = np.array([z.real, z.imag]) / r**2
        return u, grad, 2.0 / r**4

    w = _as_complex(point)
    if abs(w.imag) > STRIP_HALF_WIDTH + _TOL:
        raise DomainError(f"strip coordinate {w} outside |Im w| <= pi/2")
    if abs(w.real) > S_MAX:
        raise DomainError(f"strip coordinate {w} outside overflow guard |Re w| <= {S_MAX}")
    u = max((cmath.cosh(w)).real, 0.0)
    g = cmath.tanh(w / 2)
    grad = np.array([g.real, -g.imag])
    sech_half = 1.0 / abs(cmath.cosh(w / 2))
    return u, grad, sech_half**8 / 8.0


def conformal_G(kind: SolutionKind, point) -> complex:
    """The holomorphic gradient G = 2 d_z u mapped into the closed unit disk."""
    if kind is SolutionKind.PLANE:
        raise UnsupportedOperationError("the disk reduction is not used for the plane solution")
    z = _as_complex(point)
    if kind is SolutionKind.DISK_COMPLEMENT:
        if abs(z) < 1.0 - _TOL:
            raise DomainError(f"point {z} inside the unit disk")
        return 1.0 / z
    if abs(z.imag) > STRIP_HALF_WIDTH + _TOL:
        raise DomainError(f"strip coordinate {z} outside |Im w| <= pi/2")
    return cmath.tanh(z / 2)


def conformal_G_inv(kind: SolutionKind, zeta: complex) -> MappedPoint:
    """Invert G on the closed disk minus its punctures.

    DISK_COMPLEMENT: z = 1/zeta, puncture at zeta = 0.
    HAIRPIN: w = 2 artanh(zeta), punctures at zeta = +-1; returns both the
    strip coordinate and the physical point z = Phi(w).
    """
    if kind is SolutionKind.PLANE:
        raise UnsupportedOperationError("the disk reduction is not used for the plane solution")
    zeta = complex(zeta)
    if abs(zeta) > 1.0 + _TOL:
        raise DomainError(f"{zeta} outside the closed unit disk")
    if kind is SolutionKind.DISK_COMPLEMENT:
        if abs(zeta) < 1e-14:
            raise DomainError("zeta = 0 is the puncture of the disk-complement chart")
        return MappedPoint(z=1.0 / zeta)
    if abs(zeta - 1.0) < 1e-14 or abs(zeta + 1.0) < 1e-14:
        raise DomainError("zeta = +-1 are the punctures of the hairpin chart")
    w = cmath.log((1.0 + zeta) / (1.0 - zeta))
    z, _ = strip_map(w)
    return MappedPoint(z=z, w=w)


def _check_branch(kind: SolutionKind, branch: int) -> None:
    if not 0 <= branch < n_branches(kind):
        raise DomainError(f"{kind.name} has {n_branches(kind)} boundary branch(es), got {branch}")


def boundary_param(kind: SolutionKind, branch: int, s: float) -> BoundaryPoint:
    """Parametrize the free boundary.

    PLANE: the x2-axis, point (0, s).  DISK_COMPLEMENT: the unit circle at
    angle s.  HAIRPIN: branch 0 is the upper catenary (s, pi/2 + cosh s),
    branch 1 the lower one; the parameter is the strip abscissa.
    """
    _check_branch(kind, branch)
    s = float(s)
    if kind is SolutionKind.PLANE:
        return BoundaryPoint(
            point=np.array([0.0, s]),
            tangent=np.array([0.0, 1.0]),
            normal=np.array([-1.0, 0.0]),
            mean_curvature=0.0,
            arclen_density=1.0,
        )
    if kind is SolutionKind.DISK_COMPLEMENT:
        c, sn = math.cos(s), math.sin(s)
        return BoundaryPoint(
            point=np.array([c, sn]),
            tangent=np.array([-sn, c]),
            normal=np.array([-c, -sn]),
            mean_curvature=1.0,
            arclen_density=1.0,
        )
    if abs(s) > S_MAX:
        raise DomainError(f"parameter {s} outside overflow guard |s| <= {S_MAX}")
    sign = 1.0 if branch == 0 else -1.0
    ch, sh = math.cosh(s), math.sinh(s)
    point = np.array([s, sign * (STRIP_HALF_WIDTH + ch)])
    tangent = np.array([1.0, sign * sh]) / ch
    normal = np.array([-sign * sh, sign * 1.0]) / ch
    return BoundaryPoint(
        point=point,
        tangent=tangent,
        normal=normal,
        mean_curvature=1.0 / ch**2,
        arclen_density=ch,
    )


def total_curvature(kind: SolutionKind, branch: int, s1: float, s2: float) -> float:
    """Integral of the mean curvature against arclength over a parametrized arc.

    Equals the turning angle of the unit tangent between the parameters.
    """
    _check_branch(kind, branch)
    if s1 > s2:
        raise DomainError(f"need s1 <= s2, got ({s1}, {s2})")
    if kind is SolutionKind.PLANE:
        return 0.0

    def integrand(s: float) -> float:
        bp = boundary_param(kind, branch, s)
        return bp.mean_curvature * bp.arclen_density

    val, _ = integrate.quad(integrand, s1, s2, epsabs=1e-12, epsrel=1e-12, limit=200)
    return val
