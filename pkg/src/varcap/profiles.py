"""Piecewise warp profiles for rotationally symmetric metrics.

A profile describes a metric of the form

    g = q(s)^2 ds^2 + f(s)^2 dsigma^2

on an interval [s_min, s_max) times a round unit (m-1)-sphere.  Most segments
are given in arclength (q = 1); the Schwarzschild segment uses the areal
radius as coordinate, with q = (1 - 2M/R)^(-1/2).

The three densities every segment exposes (all per unit sphere area):

    resistance density   q * f^(1-m)    -- integrand of the end resistance
    volume density       q * f^(m-1)    -- integrand of the volume
    element weight       f^(m-1) / q    -- 1D Dirichlet-form coefficient

Power and constant segments integrate in closed form; splines and the other
analytic kinds fall back to adaptive quadrature.
"""

from __future__ import annotations

import json
import math
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .errors import DomainError, ProfileError
from .geometry import Dimension

INF = math.inf

_JUNCTION_RTOL = 1e-12
_QUAD_EPSREL = 1e-12
_POSITIVITY_SAMPLES = 129


def _quad(fun: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """Adaptive quadrature on a finite interval; returns (value, abs error)."""
    if b <= a:
        return 0.0, 0.0
    val, err = integrate.quad(fun, a, b, epsabs=0.0, epsrel=_QUAD_EPSREL, limit=200)
    return val, err


class Segment:
    """One piece of a profile on [lo, hi); hi may be inf."""

    kind = "abstract"

    def __init__(self, lo: float, hi: float):
        if not (hi > lo):
            raise ProfileError(f"segment range [{lo}, {hi}) is empty")
        self.lo = float(lo)
        self.hi = float(hi)

    # -- pointwise data ----------------------------------------------------

    def f(self, s):
        raise NotImplementedError

    def lapse(self, s):
        return np.ones_like(np.asarray(s, dtype=float))

    def f_coordinate_derivative(self, s):
        """d f / d(coordinate); default central finite difference."""
        s = np.asarray(s, dtype=float)
        step = 1e-6 * np.maximum(1.0, np.abs(s))
        lo = np.maximum(s - step, self.lo)
        hi = s + step if self.hi == INF else np.minimum(s + step, self.hi)
        return (self.f(hi) - self.f(lo)) / (hi - lo)

    def resistance_density(self, s, m: int):
        return self.lapse(s) * self.f(s) ** (-(m - 1))

    def volume_density(self, s, m: int):
        return self.lapse(s) * self.f(s) ** (m - 1)

    def element_weight(self, s, m: int):
        return self.f(s) ** (m - 1) / self.lapse(s)

    # -- integrals ----------------------------------------------------------

    def resistance_integral(self, a: float, b: float, m: int) -> tuple[float, float]:
        return _quad(lambda s: float(self.resistance_density(s, m)), a, b)

    def volume_integral(self, a: float, b: float, m: int) -> tuple[float, float]:
        return _quad(lambda s: float(self.volume_density(s, m)), a, b)

    # -- serialization -------------------------------------------------------

    def params(self) -> dict:
        raise NotImplementedError

    def to_doc(self) -> dict:
        hi = None if self.hi == INF else self.hi
        return {"kind": self.kind, "range": [self.lo, hi], "params": self.params()}


class PowerSegment(Segment):
    """f(s) = a * s**p (arclength parametrization)."""

    kind = "power"

    def __init__(self, lo, hi, a: float, p: float):
        super().__init__(lo, hi)
        if a <= 0:
            raise ProfileError(f"power segment needs a > 0, got a={a}")
        if lo < 0 and p != round(p):
            raise ProfileError("power segment with non-integer exponent needs s >= 0")
        self.a = float(a)
        self.p = float(p)

    def f(self, s):
        return self.a * np.asarray(s, dtype=float) ** self.p

    def f_coordinate_derivative(self, s):
        s = np.asarray(s, dtype=float)
        if self.p == 0:
            return np.zeros_like(s)
        return self.a * self.p * s ** (self.p - 1.0)

    def _monomial_integral(self, a: float, b: float, coef: float, expo: float) -> float:
        # integral of coef * s**expo on [a, b]; b may be finite only here
        if expo == -1.0:
            if a <= 0.0:
                return INF
            return coef * math.log(b / a)
        e1 = expo + 1.0
        if a <= 0.0 and e1 <= 0.0:
            return INF
        ta = 0.0 if a == 0.0 else a**e1
        return coef * (b**e1 - ta) / e1

    def resistance_integral(self, a, b, m):
        coef = self.a ** (-(m - 1))
        return self._monomial_integral(a, b, coef, -self.p * (m - 1)), 0.0

    def volume_integral(self, a, b, m):
        coef = self.a ** (m - 1)
        return self._monomial_integral(a, b, coef, self.p * (m - 1)), 0.0

    def params(self):
        return {"a": self.a, "p": self.p}


class ConstantSegment(Segment):
    """f(s) = c."""

    kind = "constant"

    def __init__(self, lo, hi, c: float):
        super().__init__(lo, hi)
        if c <= 0:
            raise ProfileError(f"constant segment needs c > 0, got c={c}")
        self.c = float(c)

    def f(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.c)

    def f_coordinate_derivative(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def resistance_integral(self, a, b, m):
        return self.c ** (-(m - 1)) * (b - a), 0.0

    def volume_integral(self, a, b, m):
        return self.c ** (m - 1) * (b - a), 0.0

    def params(self):
        return {"c": self.c}


class SplineSegment(Segment):
    """Cubic interpolant through tabulated samples.

    Monotone (PCHIP) by default; passing endpoint derivatives switches to a
    Hermite cubic through the same samples.
    """

    kind = "spline"

    def __init__(self, x: Sequence[float], y: Sequence[float], dydx: Sequence[float] | None = None):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
            raise ProfileError("spline samples need strictly increasing x with >= 2 points")
        super().__init__(x[0], x[-1])
        self.x = x
        self.y = y
        if dydx is None:
            self.dydx = None
            self._spline = PchipInterpolator(x, y, extrapolate=False)
        else:
            dydx = np.asarray(dydx, dtype=float)
            if dydx.shape != x.shape:
                raise ProfileError("spline derivative table must match the sample table")
            self.dydx = dydx
            self._spline = CubicHermiteSpline(x, y, dydx, extrapolate=False)
        self._deriv = self._spline.derivative()

    def f(self, s):
        s = np.clip(np.asarray(s, dtype=float), self.lo, self.hi)
        return self._spline(s)

    def f_coordinate_derivative(self, s):
        s = np.clip(np.asarray(s, dtype=float), self.lo, self.hi)
        return self._deriv(s)

    def params(self):
        doc = {"x": self.x.tolist(), "y": self.y.tolist()}
        if self.dydx is not None:
            doc["dydx"] = self.dydx.tolist()
        return doc


class SqrtQuadraticSegment(Segment):
    """f(s) = sqrt(a + b*s^2); hyperboloid-style neck for even profiles."""

    kind = "sqrt_quadratic"

    def __init__(self, lo, hi, a: float, b: float):
        super().__init__(lo, hi)
        if a <= 0 or b <= 0:
            raise ProfileError("sqrt_quadratic needs a > 0 and b > 0")
        self.a = float(a)
        self.b = float(b)

    def f(self, s):
        s = np.asarray(s, dtype=float)
        return np.sqrt(self.a + self.b * s * s)

    def f_coordinate_derivative(self, s):
        s = np.asarray(s, dtype=float)
        return self.b * s / np.sqrt(self.a + self.b * s * s)

    def resistance_integral(self, a, b, m):
        if m == 3:
            # integral of 1/(A + B s^2) = arctan(s sqrt(B/A)) / sqrt(A B)
            root = math.sqrt(self.a * self.b)
            k = math.sqrt(self.b / self.a)
            return (math.atan(k * b) - math.atan(k * a)) / root, 0.0
        return super().resistance_integral(a, b, m)

    def volume_integral(self, a, b, m):
        if m == 3:
            return self.a * (b - a) + self.b * (b**3 - a**3) / 3.0, 0.0
        return super().volume_integral(a, b, m)

    def params(self):
        return {"a": self.a, "b": self.b}


class SchwarzschildSegment(Segment):
    """Schwarzschild exterior in areal radius: f(R) = R, q(R) = (1-2M/R)^(-1/2).

    Defined for R >= 2M; the horizon R = 2M is the inner boundary.  Quadrature
    near the horizon substitutes x = sqrt(R - 2M), which removes the q
    singularity exactly.
    """

    kind = "schwarzschild"

    def __init__(self, lo, hi, mass: float):
        if mass <= 0:
            raise ProfileError(f"schwarzschild segment needs mass > 0, got {mass}")
        if lo < 2.0 * mass - 1e-12 * mass:
            raise ProfileError(f"schwarzschild segment starts inside the horizon: {lo} < {2*mass}")
        super().__init__(max(lo, 2.0 * mass), hi)
        self.mass = float(mass)

    def f(self, s):
        return np.asarray(s, dtype=float)

    def f_coordinate_derivative(self, s):
        return np.ones_like(np.asarray(s, dtype=float))

    def lapse(self, s):
        s = np.asarray(s, dtype=float)
        arg = np.maximum(1.0 - 2.0 * self.mass / s, 0.0)
        with np.errstate(divide="ignore"):
            return 1.0 / np.sqrt(arg)

    def element_weight(self, s, m):
        s = np.asarray(s, dtype=float)
        return s ** (m - 1) * np.sqrt(np.maximum(1.0 - 2.0 * self.mass / s, 0.0))

    def _subst_quad(self, a: float, b: float, p: float) -> tuple[float, float]:
        # integral of R^p * (1-2M/R)^(-1/2) dR = integral of R^(p+1/2) (R-2M)^(-1/2) dR;
        # with x = sqrt(R-2M) this is 2 * integral of (x^2+2M)^(p+1/2) dx,
        # smooth through the horizon
        M = self.mass
        xa = math.sqrt(max(a - 2.0 * M, 0.0))
        xb = math.sqrt(b - 2.0 * M)
        val, err = _quad(lambda x: 2.0 * (x * x + 2.0 * M) ** (p + 0.5), xa, xb)
        return val, err

    def resistance_integral(self, a, b, m):
        if m == 3:
            # exact: d/dR [ (1/M) sqrt(1 - 2M/R) ] = R^-2 (1 - 2M/R)^(-1/2)
            M = self.mass
            fb = 1.0 if b == INF else math.sqrt(1.0 - 2.0 * M / b)
            fa = math.sqrt(max(1.0 - 2.0 * M / a, 0.0))
            return (fb - fa) / M, 0.0
        if b == INF:
            raise DomainError("unbounded schwarzschild resistance handled by the tail integrator")
        return self._subst_quad(a, b, -(m - 1.0))

    def volume_integral(self, a, b, m):
        if b == INF:
            return INF, 0.0
        return self._subst_quad(a, b, m - 1.0)

    def params(self):
        return {"mass": self.mass}


_SEGMENT_KINDS = {
    "power": PowerSegment,
    "constant": ConstantSegment,
    "spline": SplineSegment,
    "sqrt_quadratic": SqrtQuadraticSegment,
    "schwarzschild": SchwarzschildSegment,
}


class WarpProfile:
    """Contiguous list of segments plus the ambient dimension.

    Invariants enforced at construction: segments tile [s_min, s_max) without
    gaps, junction values agree to 1e-12 relative, f > 0 on the interior, and
    f(s_min) = 0 exactly when the profile closes with a pole there.
    """

    def __init__(self, dim: Dimension, segments: Sequence[Segment], pole_at_origin: bool = False):
        if not segments:
            raise ProfileError("profile needs at least one segment")
        self.dim = dim
        self.segments = list(segments)
        self.pole_at_origin = bool(pole_at_origin)
        self._validate()
        self._breaks = np.array([seg.lo for seg in self.segments] + [self.segments[-1].hi])

    # -- construction checks -------------------------------------------------

    def _validate(self):
        segs = self.segments
        for left, right in zip(segs, segs[1:]):
            if left.hi == INF:
                raise ProfileError("only the final segment may be unbounded")
            gap = abs(right.lo - left.hi)
            if gap > _JUNCTION_RTOL * max(1.0, abs(left.hi)):
                raise ProfileError(f"segments not contiguous at s={left.hi} (gap {gap:.3e})")
            fl = float(left.f(left.hi))
            fr = float(right.f(right.lo))
            if abs(fl - fr) > _JUNCTION_RTOL * max(1.0, abs(fl), abs(fr)):
                raise ProfileError(f"profile jumps at s={left.hi}: {fl} vs {fr}")
        for k, seg in enumerate(segs):
            hi = seg.hi if seg.hi != INF else max(2.0 * abs(seg.lo) + 10.0, seg.lo + 10.0)
            samples = np.linspace(seg.lo, hi, _POSITIVITY_SAMPLES)
            if k == 0:
                samples = samples[1:]  # the left endpoint may be a pole
            vals = np.asarray(seg.f(samples), dtype=float)
            if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
                raise ProfileError(f"warp factor must be positive on segment {k} ({seg.kind})")
        f0 = float(segs[0].f(segs[0].lo))
        if self.pole_at_origin and abs(f0) > 1e-10:
            raise ProfileError(f"pole profile must have f(s_min) = 0, got {f0}")
        if not self.pole_at_origin and f0 <= 0.0:
            raise ProfileError("f(s_min) must be positive when there is no pole")

    # -- basic queries --------------------------------------------------------

    @property
    def m(self) -> int:
        return self.dim.m

    @property
    def s_min(self) -> float:
        return self.segments[0].lo

    @property
    def s_max(self) -> float:
        return self.segments[-1].hi

    @property
    def is_unbounded(self) -> bool:
        return self.s_max == INF

    def _segment_index(self, s: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._breaks, s, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def _eval(self, s, per_segment: Callable[[Segment, np.ndarray], np.ndarray]):
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        if np.any(s < self.s_min - 1e-12) or np.any(s > self.s_max):
            raise DomainError(f"evaluation outside profile domain [{self.s_min}, {self.s_max})")
        out = np.empty_like(s)
        idx = self._segment_index(s)
        for k in np.unique(idx):
            mask = idx == k
            out[mask] = per_segment(self.segments[k], s[mask])
        return float(out[0]) if scalar else out

    def f(self, s):
        return self._eval(s, lambda seg, x: seg.f(x))

    def lapse(self, s):
        return self._eval(s, lambda seg, x: seg.lapse(x))

    def element_weight(self, s):
        return self._eval(s, lambda seg, x: seg.element_weight(x, self.m))

    def arclength_derivative(self, s):
        """df/d(arclength) = (df/dcoord) / q; tends to 1 on asymptotically flat ends."""
        return self._eval(
            s, lambda seg, x: np.asarray(seg.f_coordinate_derivative(x), dtype=float) / seg.lapse(x)
        )

    # -- piecewise integrals ---------------------------------------------------

    def _integrate(self, a: float, b: float, which: str) -> tuple[float, float]:
        if not (self.s_min - 1e-12 <= a <= b <= self.s_max):
            raise DomainError(f"integration range [{a}, {b}] outside domain")
        a = max(a, self.s_min)
        total, err = 0.0, 0.0
        for seg in self.segments:
            lo, hi = max(a, seg.lo), min(b, seg.hi)
            if hi <= lo:
                continue
            fn = seg.resistance_integral if which == "resistance" else seg.volume_integral
            v, e = fn(lo, hi, self.m)
            if v == INF:
                return INF, 0.0
            total += v
            err += e
        return total, err

    def resistance_between(self, a: float, b: float) -> tuple[float, float]:
        """Integral of q * f^(1-m) over [a, b] with an error estimate."""
        return self._integrate(a, b, "resistance")

    def volume_between(self, a: float, b: float) -> tuple[float, float]:
        """Integral of q * f^(m-1) over [a, b] (per unit sphere area)."""
        return self._integrate(a, b, "volume")

    def final_segment(self) -> Segment:
        return self.segments[-1]

    # -- serialization -----------------------------------------------------------

    def to_doc(self) -> dict:
        return {
            "dimension": self.m,
            "pole_at_origin": self.pole_at_origin,
            "pieces": [seg.to_doc() for seg in self.segments],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True)

    @staticmethod
    def from_doc(doc: dict) -> "WarpProfile":
        allowed = {"dimension", "pole_at_origin", "pieces"}
        unknown = set(doc) - allowed
        if unknown:
            raise ProfileError(f"unknown profile keys: {sorted(unknown)}")
        if "dimension" not in doc or "pieces" not in doc:
            raise ProfileError("profile document needs 'dimension' and 'pieces'")
        dim = Dimension(int(doc["dimension"]))
        segments = []
        for k, piece in enumerate(doc["pieces"]):
            extra = set(piece) - {"kind", "range", "params"}
            if extra:
                raise ProfileError(f"piece {k} has unknown keys: {sorted(extra)}")
            kind = piece.get("kind")
            if kind not in _SEGMENT_KINDS:
                raise ProfileError(f"piece {k}: unknown kind {kind!r} (valid: {sorted(_SEGMENT_KINDS)})")
            lo, hi = piece["range"]
            hi = INF if hi is None else float(hi)
            params = dict(piece.get("params", {}))
            cls = _SEGMENT_KINDS[kind]
            if kind == "spline":
                segments.append(cls(**params))
            else:
                segments.append(cls(float(lo), hi, **params))
        return WarpProfile(dim, segments, pole_at_origin=bool(doc.get("pole_at_origin", False)))

    @staticmethod
    def from_json(text: str) -> "WarpProfile":
        return WarpProfile.from_doc(json.loads(text))


# -- stock profiles ---------------------------------------------------------------


def euclidean_profile(m: int = 3) -> WarpProfile:
    """Flat space: f(s) = s on [0, inf)."""
    return WarpProfile(Dimension(m), [PowerSegment(0.0, INF, 1.0, 1.0)], pole_at_origin=True)


def cylinder_transition_profile(i: float, m: int = 3, bridge_samples: int = 33) -> WarpProfile:
    """Euclidean out to s = i, then a monotone neck down to a unit cylinder.

    f(s) = s on [0, i], a cosine-ramp spline bridge from i down to 1 on
    [i, i+1], and f = 1 on [i+1, inf).  The unit cylinder radius makes the
    linear-ramp test energy on the cylindrical range exactly omega/L.
    """
    if i <= 1:
        raise DomainError(f"transition radius must exceed 1, got i={i}")
    x = np.linspace(i, i + 1.0, bridge_samples)
    y = 1.0 + (i - 1.0) * (1.0 + np.cos(math.pi * (x - i))) / 2.0
    y[0], y[-1] = float(i), 1.0
    segments = [
        PowerSegment(0.0, i, 1.0, 1.0),
        SplineSegment(x, y),
        ConstantSegment(i + 1.0, INF, 1.0),
    ]
    return WarpProfile(Dimension(m), segments, pole_at_origin=True)


def hyperboloid_profile(m: int = 3, a: float = 1.0, b: float = 1.0, s_min: float = 0.0) -> WarpProfile:
    """One-sided even-neck profile f(s) = sqrt(a + b s^2) on [s_min, inf)."""
    return WarpProfile(Dimension(m), [SqrtQuadraticSegment(s_min, INF, a, b)])


def capped_even_profile(i: float, m: int = 3, a: float = 1.0, b: float = 1.0) -> WarpProfile:
    """Even-neck profile capped on the left by a pole at s = -2i.

    Agrees with sqrt(a + b s^2) on [-i, inf); on [-2i, -i] a cubic bridge
    rises from f(-2i) = 0 with unit slope (smooth pole) and matches value and
    first derivative at s = -i.
    """
    if i <= 0:
        raise DomainError(f"cap index must be positive, got i={i}")
    s_j = -float(i)
    f_j = math.sqrt(a + b * s_j * s_j)
    df_j = b * s_j / f_j
    bridge = SplineSegment([-2.0 * i, s_j], [0.0, f_j], dydx=[1.0, df_j])
    neck = SqrtQuadraticSegment(s_j, INF, a, b)
    return WarpProfile(Dimension(m), [bridge, neck], pole_at_origin=True)


def schwarzschild_profile(mass: float, m: int = 3) -> WarpProfile:
    """Schwarzschild exterior of the given mass, areal-radius parametrization."""
    return WarpProfile(Dimension(m), [SchwarzschildSegment(2.0 * mass, INF, mass)])
