"""Quasi-local mass functionals on asymptotically flat radial 3-profiles.

Along the centered exhaustion {s <= R} with volume V(R), boundary area A(R)
and capacity cap(R):

    isoperimetric mass   m_iso(R) = (2/A) * [ V - A^(3/2) / (6 sqrt(pi)) ]
    capacity-volume mass m_CV(R)  = (1/(4 pi cap^2)) * [ V - (4 pi/3) cap^3 ]

Both vanish identically on flat space and converge to the total mass on the
Schwarzschild exterior.  A second, literal "volume radius minus capacity"
display

    m_CV_alt(R) = (V / 4 pi)^(1/3) - cap

is computed independently and reported separately: its volume-radius
normalization differs from the primary display by a factor 3^(1/3), so it
does NOT vanish on flat space.  The two are never merged.

The supremum over exhaustions is restricted to centered balls, so the
extrapolated numbers are lower bounds for the exhaustion-sup functionals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateProblemError, DomainError, NoLimitError, PreconditionError, UnsupportedDimensionError
from .profiles import WarpProfile
from .warped import RadialCondenser, radial_capacity, volume_and_boundary

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class AFProfile:
    """A radial 3-profile with a recorded asymptotic-flatness witness.

    The tail test samples f(s)/s and the arclength derivative of f on
    [s_af, 10 s_af] and records the worst deviations from 1.
    """

    profile: WarpProfile
    s_af: float
    ratio_eps: float
    deriv_eps: float

    @staticmethod
    def check(profile: WarpProfile, s_af: float | None = None, eps: float = 0.1) -> "AFProfile":
        if profile.m != 3:
            raise UnsupportedDimensionError(f"mass functionals need m=3, got m={profile.m}")
        if not profile.is_unbounded:
            raise DomainError("asymptotic flatness needs an unbounded profile")
        if s_af is None:
            s_af = max(10.0 * abs(profile.s_min), 10.0)
        samples = np.geomspace(s_af, 10.0 * s_af, 17)
        ratio = np.atleast_1d(profile.f(samples)) / samples
        deriv = np.atleast_1d(profile.arclength_derivative(samples))
        ratio_eps = float(np.max(np.abs(ratio - 1.0)))
        deriv_eps = float(np.max(np.abs(deriv - 1.0)))
        if ratio_eps > eps or deriv_eps > eps:
            raise DomainError(
                f"profile fails the flat-tail test at s_af={s_af}: "
                f"|f/s - 1| <= {ratio_eps:.3e}, |f' - 1| <= {deriv_eps:.3e}"
            )
        return AFProfile(profile, float(s_af), ratio_eps, deriv_eps)


def _geometry_at(af: AFProfile, radii: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    V, A = [], []
    for R in radii:
        v, a = volume_and_boundary(af.profile, R)
        if a <= 0.0:
            raise DegenerateProblemError(f"boundary area vanishes at R={R}")
        V.append(v)
        A.append(a)
    return np.asarray(V), np.asarray(A)


def iso_mass_curve(af: AFProfile, radii: Sequence[float]) -> np.ndarray:
    """Quasi-local isoperimetric mass at each radius."""
    V, A = _geometry_at(af, radii)
    return (2.0 / A) * (V - A**1.5 / (6.0 * _SQRT_PI))


def cv_mass_curve(
    af: AFProfile,
    radii: Sequence[float],
    capacity_fn: Callable[[float], float] | None = None,
    alternative: bool = False,
) -> np.ndarray:
    """Quasi-local capacity-volume mass at each radius.

    `capacity_fn` maps a radius to the capacity of {s <= R}; the default is
    the closed-form/quadrature route.  With `alternative=True` the literal
    volume-radius display (V/4pi)^(1/3) - cap is returned instead (see the
    module docstring; the two disagree even on flat space).
    """
    if capacity_fn is None:
        capacity_fn = lambda R: radial_capacity(RadialCondenser(af.profile, R))
    V, _ = _geometry_at(af, radii)
    cap = np.array([capacity_fn(R) for R in radii], dtype=float)
    if np.any(cap <= 0.0):
        raise DegenerateProblemError("capacity vanished along the exhaustion (non-flat end?)")
    if alternative:
        return (V / (4.0 * math.pi)) ** (1.0 / 3.0) - cap
    return (V - (4.0 * math.pi / 3.0) * cap**3) / (4.0 * math.pi * cap**2)


@dataclass(frozen=True)
class MassCurve:
    """Geometry and mass values along a centered-ball exhaustion."""

    radii: tuple
    A: tuple
    V: tuple
    cap: tuple
    m_iso: tuple
    m_cv: tuple
    m_cv_alt: tuple

    def rows(self) -> list[tuple]:
        return list(zip(self.radii, self.A, self.V, self.cap, self.m_iso, self.m_cv, self.m_cv_alt))


def evaluate_mass_curve(
    af: AFProfile, radii: Sequence[float], capacity_fn: Callable[[float], float] | None = None
) -> MassCurve:
    radii = tuple(float(R) for R in radii)
    if sorted(radii) != list(radii):
        raise DomainError("radii must be increasing")
    if capacity_fn is None:
        capacity_fn = lambda R: radial_capacity(RadialCondenser(af.profile, R))
    V, A = _geometry_at(af, radii)
    cap = np.array([capacity_fn(R) for R in radii], dtype=float)
    if np.any(cap <= 0.0):
        raise DegenerateProblemError("capacity vanished along the exhaustion (non-flat end?)")
    m_iso = (2.0 / A) * (V - A**1.5 / (6.0 * _SQRT_PI))
    m_cv = (V - (4.0 * math.pi / 3.0) * cap**3) / (4.0 * math.pi * cap**2)
    m_alt = (V / (4.0 * math.pi)) ** (1.0 / 3.0) - cap
    return MassCurve(
        radii,
        tuple(A.tolist()),
        tuple(V.tolist()),
        tuple(cap.tolist()),
        tuple(m_iso.tolist()),
        tuple(m_cv.tolist()),
        tuple(m_alt.tolist()),
    )


@dataclass(frozen=True)
class MassExtrapolation:
    m_iso: float
    m_cv: float
    error_estimate: float
    residuals: tuple


def _fit_tail(radii: np.ndarray, values: np.ndarray) -> tuple[float, float, float]:
    """Least-squares fit values = m + c/R on the tail; (m, c, rms residual)."""
    X = np.column_stack([np.ones_like(radii), 1.0 / radii])
    coef, *_ = np.linalg.lstsq(X, values, rcond=None)
    resid = values - X @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return float(coef[0]), float(coef[1]), rms


def extrapolate_mass(curve: MassCurve, tail_points: int | None = None) -> MassExtrapolation:
    """R -> inf limits of both mass curves from a value + c/R tail fit.

    Requires at least 4 radii spanning a decade.  A tail whose residual is
    out of proportion to the fitted constant is rejected as non-convergent.
    """
    radii = np.asarray(curve.radii, dtype=float)
    if radii.size < 4:
        raise PreconditionError("mass extrapolation needs at least 4 radii")
    if radii.max() < 10.0 * radii.min():
        raise PreconditionError("mass extrapolation needs radii spanning a decade")
    if tail_points is None:
        tail_points = max(4, radii.size // 2)
    tail = slice(-tail_points, None)

    results, resids = [], []
    for values in (np.asarray(curve.m_iso), np.asarray(curve.m_cv)):
        m_fit, _, rms = _fit_tail(radii[tail], values[tail])
        spread = float(np.ptp(values[tail]))
        threshold = 0.05 * max(abs(m_fit), spread) + 1e-10
        if rms > threshold:
            raise NoLimitError(
                "mass curve tail does not follow value + c/R",
                diagnostics={"rms_residual": rms, "fitted_value": m_fit, "tail_values": values[tail].tolist()},
            )
        results.append(m_fit)
        resids.append(rms)

    last_gap = max(
        abs(results[0] - curve.m_iso[-1]),
        abs(results[1] - curve.m_cv[-1]),
    )
    err = max(max(resids) * 3.0, 0.1 * last_gap)
    return MassExtrapolation(results[0], results[1], err, tuple(resids))


def mass_csv(curve: MassCurve, meta: dict | None = None) -> str:
    from . import reports

    return reports.csv_table(
        ["R", "A", "V", "cap", "m_iso", "m_cv", "m_cv_alt"], curve.rows(), meta
    )
