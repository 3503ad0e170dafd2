"""Mesh-free spectrum of the disk Robin form by Fourier-Bessel secular equations.

The comparison form on the unit disk is

    Q0(psi, psi) = int_D |grad psi|^2 - int_{dD} psi^2,

whose eigenproblem separates into angular modes k with radial profiles
I_k(x r) for lambda = -x^2 < 0, J_k(x r) for lambda = x^2 > 0 and r^k for
lambda = 0.  The Robin condition psi_nu = psi at r = 1 becomes the secular
equation x B_k'(x) = B_k(x).

Everything here is self-contained: Bessel functions are evaluated by their
power series with term-ratio termination at 1e-16 relative, roots are located
by sign-change bracketing plus bisection, and the absence of negative
eigenvalues for k >= 1 is checked by a ratio scan rather than assumed.
Numerical eigenvalues are always recomputed, never hard-coded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

X_MAX = 30.0
K_MAX = 50
_SCAN_POINTS = 1200
_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class FourierHarmonic:
    """Harmonic a + sum_k r^k (c_k cos(k theta) + d_k sin(k theta))/sqrt(pi).

    ``a`` is the boundary trace average; the angular profiles are normalized
    in L^2 of the boundary circle.
    """

    a: float = 0.0
    c: tuple[float, ...] = field(default_factory=tuple)
    d: tuple[float, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class DiskEigenvalue:
    """One eigenvalue of the disk Robin problem: angular mode, value, profile."""

    k: int
    lam: float
    radial_profile: str
    multiplicity: int


def _check_args(k: int, x) -> np.ndarray:
    if not (isinstance(k, (int, np.integer)) and 0 <= k <= K_MAX):
        raise DomainError(f"order must be an integer in [0, {K_MAX}], got {k}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > X_MAX):
        raise DomainError(f"argument outside [0, {X_MAX}]")
    return arr


def _series(k: int, x, sign: float) -> np.ndarray:
    """sum_m sign^m (x/2)^(k+2m) / (m! (k+m)!), vectorized over x."""
    arr = _check_args(k, x)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    half = arr / 2.0
    term = half**k / math.factorial(k)
    total = term.copy()
    q = half * half
    m = 0
    while m < 400:
        m += 1
        term = term * (sign * q) / (m * (m + k))
        total += term
        if np.all(np.abs(term) <= 1e-16 * np.maximum(np.abs(total), 1e-300)):
            break
    return total[0] if scalar else total


def bessel_I(k: int, x):
    """Modified Bessel function of the first kind, power series evaluation."""
    return _series(k, x, 1.0)


def bessel_J(k: int, x):
    """Bessel function of the first kind, power series evaluation."""
    return _series(k, x, -1.0)


def bessel_I_prime(k: int, x):
    """I_k'(x) via the recurrence (I_{k-1} + I_{k+1})/2, with I_{-1} = I_1."""
    lower = bessel_I(1, x) if k == 0 else bessel_I(k - 1, x)
    return 0.5 * (lower + bessel_I(k + 1, x))


def bessel_J_prime(k: int, x):
    """J_k'(x) via the recurrence (J_{k-1} - J_{k+1})/2, with J_{-1} = -J_1."""
    lower = -bessel_J(1, x) if k == 0 else bessel_J(k - 1, x)
    return 0.5 * (lower - bessel_J(k + 1, x))


def secular_I(k: int, x):
    """x I_k'(x) - I_k(x); its roots give the negative eigenvalues -x^2."""
    return np.asarray(x) * bessel_I_prime(k, x) - bessel_I(k, x)


def secular_J(k: int, x):
    """x J_k'(x) - J_k(x); its roots give the positive eigenvalues x^2."""
    return np.asarray(x) * bessel_J_prime(k, x) - bessel_J(k, x)


def _bisect(fn, a: float, b: float) -> float:
    fa, fb = fn(a), fn(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0:
        raise ValueError("bisection endpoints do not bracket a sign change")
    while b - a > _BISECT_TOL:
        mid = 0.5 * (a + b)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if fa * fm < 0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def _scan_roots(fn, lo: float, hi: float, n_points: int = _SCAN_POINTS) -> list[float]:
    grid = np.linspace(lo, hi, n_points)
    vals = fn(grid)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(_bisect(lambda x: float(fn(x)), float(a), float(b)))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def negative_eigenvalues_Q0() -> list[DiskEigenvalue]:
    """All negative eigenvalues of the disk Robin problem in the scan window.

    Scans modes k = 0..50 for roots of x I_k'(x) = I_k(x) on (0, 30].  The
    result must be a single eigenvalue at k = 0 (the form has index one); any
    other outcome raises, making the oracle self-verifying.
    """
    found: list[DiskEigenvalue] = []
    for k in range(K_MAX + 1):
        roots = _scan_roots(lambda x, kk=k: secular_I(kk, x), 1e-3, X_MAX)
        for x in roots:
            found.append(
                DiskEigenvalue(k=k, lam=-x * x, radial_profile=f"I_{k}(sqrt(-lam) r)",
                               multiplicity=1 if k == 0 else 2)
            )
    if len(found) != 1 or found[0].k != 0:
        raise RuntimeError(f"secular scan expected one negative eigenvalue at k = 0, found {found}")
    return found


def modified_ratio_is_monotone(k: int, lo: float = 1e-2, hi: float = X_MAX, n: int = 400) -> bool:
    """Check that x I_k'(x)/I_k(x) is nondecreasing and >= k on a grid.

    This is the computed exclusion of negative eigenvalues for modes k >= 1:
    the ratio starts at k and increases, so it never returns to 1.
    """
    grid = np.linspace(lo, hi, n)
    ratio = grid * bessel_I_prime(k, grid) / bessel_I(k, grid)
    return bool(np.all(np.diff(ratio) > -1e-12) and np.all(ratio >= k - 1e-9))


def positive_eigenvalues_Q0(k_max: int, per_mode: int) -> list[DiskEigenvalue]:
    """Positive eigenvalues per angular mode, ascending within each mode.

    Roots of x J_k'(x) = J_k(x) are bracketed between consecutive extrema of
    J_k (where the secular function takes the sign of -J_k, which alternates)
    and refined by bisection.  The degenerate x = 0 root at k = 1 is the
    lambda = 0 mode with radial profile r, reported analytically with
    multiplicity two.
    """
    if k_max > K_MAX:
        raise DomainError(f"k_max must be <= {K_MAX}")
    out: list[DiskEigenvalue] = []
    for k in range(k_max + 1):
        if k == 1:
            out.append(DiskEigenvalue(k=1, lam=0.0, radial_profile="r", multiplicity=2))
        extrema = _scan_roots(lambda x, kk=k: bessel_J_prime(kk, x), 1e-3, X_MAX)
        breakpoints = [1e-3] + extrema + [X_MAX]
        mode_roots: list[float] = []
        for a, b in zip(breakpoints[:-1], breakpoints[1:]):
            if len(mode_roots) >= per_mode:
                break
            fa = float(secular_J(k, a))
            fb = float(secular_J(k, b))
            if fa * fb < 0:
                mode_roots.append(_bisect(lambda x, kk=k: float(secular_J(kk, x)), a, b))
        for x in mode_roots[:per_mode]:
            out.append(
                DiskEigenvalue(k=k, lam=x * x, radial_profile=f"J_{k}(sqrt(lam) r)",
                               multiplicity=1 if k == 0 else 2)
            )
    return out


def q0_spectrum(count: int, k_max: int = 12, per_mode: int = 6) -> list[DiskEigenvalue]:
    """First ``count`` eigenvalues ascending, multiplicities expanded."""
    entries = negative_eigenvalues_Q0() + positive_eigenvalues_Q0(k_max, per_mode)
    expanded: list[DiskEigenvalue] = []
    for e in sorted(entries, key=lambda e: e.lam):
        expanded.extend([e] * e.multiplicity)
    if len(expanded) < count:
        raise ValueError("requested more eigenvalues than the scan window provides")
    return expanded[:count]


def q0_value(h: FourierHarmonic) -> float:
    """Closed-form Q0 of a finite harmonic: sum (k-1)(c_k^2 + d_k^2) - 2 pi a^2.

    The boundary-average part contributes -2 pi a^2; the zero-average part
    telescopes into the (k - 1) weights of the Fourier identity.
    """
    total = -2.0 * math.pi * h.a**2
    for k, ck in enumerate(h.c, start=1):
        total += (k - 1) * ck * ck
    for k, dk in enumerate(h.d, start=1):
        total += (k - 1) * dk * dk
    return total


def harmonic_value(h: FourierHarmonic, r, theta):
    """Evaluate the harmonic at polar points (vectorized)."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    out = np.full(np.broadcast(r, theta).shape, float(h.a))
    sqpi = math.sqrt(math.pi)
    for k, ck in enumerate(h.c, start=1):
        out = out + ck * r**k * np.cos(k * theta) / sqpi
    for k, dk in enumerate(h.d, start=1):
        out = out + dk * r**k * np.sin(k * theta) / sqpi
    return out


def harmonic_gradient(h: FourierHarmonic, r, theta):
    """Polar gradient (d/dr, (1/r) d/dtheta); r = 0 must be avoided by the caller."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    shape = np.broadcast(r, theta).shape
    dr = np.zeros(shape)
    dt = np.zeros(shape)
    sqpi = math.sqrt(math.pi)
    for k, ck in enumerate(h.c, start=1):
        dr = dr + ck * k * r ** (k - 1) * np.cos(k * theta) / sqpi
        dt = dt - ck * k * r ** (k - 1) * np.sin(k * theta) / sqpi
    for k, dk in enumerate(h.d, start=1):
        dr = dr + dk * k * r ** (k - 1) * np.sin(k * theta) / sqpi
        dt = dt + dk * k * r ** (k - 1) * np.cos(k * theta) / sqpi
    return dr, dt
