"""Converging-family experiments and semicontinuity verdicts.

Four shipped families probe how condenser capacity behaves along a
converging sequence of spaces:

  ex1  cylinder transition: smooth metrics that are Euclidean out to radius i
       and a unit cylinder past i+1; capacity of a fixed ball dies, the flat
       limit keeps it positive.
  ex2  capped neck: an even neck profile capped by a pole on one side; every
       capped space carries half the capacity of the two-ended limit.
  ex3  two planar sheets: a unit disk plus a plane-with-hole hovering 1/i
       above it; the sheet Dirichlet forms are disconnected so the capacity
       is exactly zero, while the flat limit plane gives a positive condenser
       value.  An optional thin strip of conductance O(1/i) connects the
       sheets, making the capacity O(1/i) instead of 0.
  ex4  plane plus counter-oriented annulus: the limit space loses the annulus
       1 < r < 2, stranding the disk as its own component; capacity upstairs
       stays positive while the limit capacity is zero, so upper
       semicontinuity fails for this family.

The finite stand-in for limsup is the max over the final half of the
sequence; a verdict is `violated` exactly when that estimate exceeds the
limit capacity by more than the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import reports
from .errors import DomainError, InconsistencyError, PreconditionError
from .geometry import Dimension
from .mms import Disk, FiniteMetricMeasureSpace, GraphCondenser, build_planar_sheet, graph_capacity, union_spaces
from .profiles import capped_even_profile, cylinder_transition_profile, euclidean_profile, hyperboloid_profile
from .radial_fem import RadialGrid, capacity_estimate, default_schedule, plateau_energy
from .regions import CorrespondingRegionSpec, DefiningFunction, corresponding_region, region_measure
from .warped import RadialCondenser, end_resistance, radial_capacity, truncated_ramp_energy

DEFAULT_VERDICT_TOL = 1e-6

CONSISTENT_EQUAL = "consistent-equal"
CONSISTENT_STRICT_JUMP = "consistent-strict-jump"
VIOLATED = "violated"


@dataclass(frozen=True)
class Verdict:
    limsup_estimate: float
    limit_capacity: float
    tolerance: float
    classification: str


def check_semicontinuity(
    capacities: Sequence[float], limit_cap: float, tol: float = DEFAULT_VERDICT_TOL
) -> Verdict:
    """Classify a capacity sequence against its limit value.

    The limsup estimate is the max over the final ceil(I/2) entries, a stable
    finite surrogate for eventually monotone sequences.  `violated` means the
    estimate exceeds the limit by more than the tolerance.
    """
    caps = [float(c) for c in capacities]
    if len(caps) < 3:
        raise PreconditionError("need at least 3 sequence values")
    tail = caps[-math.ceil(len(caps) / 2) :]
    limsup = max(tail)
    if limsup > limit_cap + tol:
        cls = VIOLATED
    elif limsup >= limit_cap - tol:
        cls = CONSISTENT_EQUAL
    else:
        cls = CONSISTENT_STRICT_JUMP
    return Verdict(limsup, float(limit_cap), float(tol), cls)


@dataclass(frozen=True)
class SequenceExperiment:
    """Capacities along a converging family, the limit value, and the verdict."""

    name: str
    i_list: tuple
    capacities: tuple
    limit_capacity: float
    verdict: Verdict
    measures: tuple | None = None
    limit_measure: float | None = None
    regions: tuple | None = None  # per-index label lists, JSON report only
    metadata: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "experiment": self.name,
            "i": list(self.i_list),
            "capacity": list(self.capacities),
            "region_measure": None if self.measures is None else list(self.measures),
            "regions": None if self.regions is None else [list(r) for r in self.regions],
            "limit_capacity": self.limit_capacity,
            "limit_measure": self.limit_measure,
            "limsup_estimate": self.verdict.limsup_estimate,
            "tolerance": self.verdict.tolerance,
            "verdict": self.verdict.classification,
            "metadata": self.metadata,
        }


def experiment_csv(exp: SequenceExperiment, meta: dict | None = None) -> str:
    """Per-index rows plus the limit/limsup/verdict footer block."""
    header = dict(meta or {})
    header.setdefault("experiment", exp.name)
    for key, val in sorted(exp.metadata.items()):
        header.setdefault(key, val)
    lines = reports.comment_header(header)
    lines.append("i,capacity,region_measure")
    measures = exp.measures if exp.measures is not None else [None] * len(exp.i_list)
    for i, cap, mu in zip(exp.i_list, exp.capacities, measures):
        lines.append(f"{i},{reports.fmt(cap)},{reports.fmt(mu)}")
    lines.append("limit_capacity,limsup_estimate,verdict")
    lines.append(
        f"{reports.fmt(exp.limit_capacity)},{reports.fmt(exp.verdict.limsup_estimate)},"
        f"{exp.verdict.classification}"
    )
    return "\n".join(lines) + "\n"


def experiment_csv_from_payload(payload: dict, meta: dict | None = None) -> str:
    """Regenerate the CSV from a parsed JSON report (round-trip support)."""
    verdict = Verdict(
        payload["limsup_estimate"], payload["limit_capacity"], payload["tolerance"], payload["verdict"]
    )
    regions = payload.get("regions")
    exp = SequenceExperiment(
        name=payload["experiment"],
        i_list=tuple(payload["i"]),
        capacities=tuple(payload["capacity"]),
        limit_capacity=payload["limit_capacity"],
        verdict=verdict,
        measures=None if payload.get("region_measure") is None else tuple(payload["region_measure"]),
        limit_measure=payload.get("limit_measure"),
        regions=None if regions is None else tuple(tuple(r) for r in regions),
        metadata=dict(payload.get("metadata", {})),
    )
    return experiment_csv(exp, meta)


# ---------------------------------------------------------------------------
# ex1: cylinder transition
# ---------------------------------------------------------------------------


def run_example1(
    i_list: Sequence[int] = (2, 4, 8),
    r: float = 1.0,
    L_values: Sequence[float] | None = None,
    m: int = 3,
    tol: float = DEFAULT_VERDICT_TOL,
) -> SequenceExperiment:
    """Capacity of the ball {s <= r} along the cylinder-transition family."""
    i_list = tuple(i_list)
    if r >= min(i_list):
        raise DomainError(f"ball radius r={r} must lie inside the Euclidean region (r < min i)")
    caps, estimates = [], []
    for i in i_list:
        profile = cylinder_transition_profile(i, m=m)
        cond = RadialCondenser(profile, r)
        est = capacity_estimate(cond, default_schedule(cond, L_values))
        caps.append(est.cap)
        estimates.append(est.error_estimate)
    limit_profile = euclidean_profile(m)
    limit_cap = radial_capacity(RadialCondenser(limit_profile, r))
    ramp_L = 1000.0
    ramp = truncated_ramp_energy(cylinder_transition_profile(min(i_list), m=m), ramp_L)
    verdict = check_semicontinuity(caps, limit_cap, tol)
    meta = {
        "family": "cylinder-transition",
        "r": r,
        "m": m,
        "ramp_L": ramp_L,
        "ramp_energy": ramp.energy,
        "ramp_on_cylinder": ramp.outside_cylinder,
        "capacity_error_estimates": tuple(estimates),
        "provenance": "fem",
        "limit_provenance": "closed-form",
    }
    return SequenceExperiment("ex1", i_list, tuple(caps), limit_cap, verdict, metadata=meta)


# ---------------------------------------------------------------------------
# ex2: capped even neck
# ---------------------------------------------------------------------------


def run_example2(
    i_list: Sequence[int] = (1, 2, 4),
    a: float = 1.0,
    b: float = 1.0,
    m: int = 3,
    L: float = 1000.0,
    tol: float = DEFAULT_VERDICT_TOL,
) -> SequenceExperiment:
    """Capacity of the waist slice {s = 0} for capped even necks f = sqrt(a + b s^2).

    The open side of each capped space carries the full resistance C, so its
    capacity is omega/(gamma C); the two-ended limit has both ends and twice
    the capacity.  The capped side is verified numerically to carry no
    energy: the minimizer clamped to 1 at the waist with a free pole end is
    constant there.
    """
    i_list = tuple(i_list)
    neck = hyperboloid_profile(m=m, a=a, b=b)
    C = end_resistance(RadialCondenser(neck, 0.0))
    if C == math.inf:
        raise DomainError("degenerate experiment: the neck profile has a divergent end")
    limit_cap = radial_capacity(RadialCondenser(neck, 0.0, ends="two_symmetric"))

    open_cond = RadialCondenser(neck, 0.0)
    open_est = capacity_estimate(open_cond, default_schedule(open_cond))

    caps, pole_energies = [], []
    for i in i_list:
        capped = capped_even_profile(i, m=m, a=a, b=b)
        cond = RadialCondenser(capped, capped.s_min + 1e-9)
        grid = RadialGrid.geometric(capped.s_min, L, h0=max(i / 32.0, 1.0 / 64.0))
        pole_side, u = plateau_energy(cond, grid, anchor=0.0)
        k = int(np.argmin(np.abs(grid.nodes - 0.0)))
        if float(np.max(np.abs(u[: k + 1] - 1.0))) > 1e-10:
            raise InconsistencyError("capped-side minimizer is not constant 1")
        pole_energies.append(pole_side)
        caps.append(open_est.cap + pole_side / capped.dim.gamma)

    verdict = check_semicontinuity(caps, limit_cap, tol)
    meta = {
        "family": "capped-even-neck",
        "m": m,
        "end_resistance": C,
        "open_side_error_estimate": open_est.error_estimate,
        "pole_side_energies": tuple(pole_energies),
        "ratio_to_limit": tuple(c / limit_cap for c in caps),
        "provenance": "fem",
        "limit_provenance": "closed-form",
    }
    return SequenceExperiment("ex2", i_list, tuple(caps), limit_cap, verdict, metadata=meta)


# ---------------------------------------------------------------------------
# ex3 and ex4: planar sheet spaces
# ---------------------------------------------------------------------------


LATTICE_OFFSET = 0.5  # planar experiments use the half-offset lattice (k + 1/2) * h


def _plane_bounds(rim_radius: float, h: float) -> tuple[float, float, float, float]:
    pad = 2.0 * h
    half = rim_radius + pad
    return (-half, half, -half, half)


def _radial_labels(space: FiniteMetricMeasureSpace, rmin: float, rmax: float) -> list[str]:
    r = np.sqrt(space.coords[:, 0] ** 2 + space.coords[:, 1] ** 2)
    mask = (r >= rmin) & (r <= rmax)
    return [lab for lab, keep in zip(space.labels, mask) if keep]


def limit_plane_condenser(h: float, rim_radius: float, disk_radius: float = 1.0) -> GraphCondenser:
    """Disk of radius `disk_radius` grounded at the rim circle of a full plane sheet."""
    plane = build_planar_sheet(_plane_bounds(rim_radius, h), h, label_prefix="L", offset=LATTICE_OFFSET)
    pad = 1e-9
    inner = _radial_labels(plane, 0.0, disk_radius + pad)
    outer = _radial_labels(plane, rim_radius - pad, math.inf)
    return GraphCondenser(plane, tuple(inner), tuple(outer), Dimension(2))


def observed_order(h_list: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log error against log h over a refinement ladder."""
    h_arr = np.asarray(h_list, dtype=float)
    e = np.asarray(errors, dtype=float)
    if h_arr.size < 2 or np.any(e <= 0):
        raise DomainError("order estimate needs >= 2 ladder points with positive errors")
    return float(np.polyfit(np.log(h_arr), np.log(e), 1)[0])


def planar_condenser_study(
    h_list: Sequence[float] = (0.1, 0.05, 0.025), rim_radius: float = 4.0
) -> tuple[list[float], list[float], float]:
    """Lattice condenser values against 1/log(rim) on a refinement ladder.

    Returns (capacities, errors, observed order); the target is the
    continuum disk-in-plane condenser value at the stated rim.
    """
    target = 1.0 / math.log(rim_radius)
    caps = [graph_capacity(limit_plane_condenser(h, rim_radius)).capacity for h in h_list]
    errors = [abs(c - target) for c in caps]
    return caps, errors, observed_order(h_list, errors)


def two_sheet_space(
    h: float, i: int, rim_radius: float, strip_conductance: float | None = None
) -> tuple[FiniteMetricMeasureSpace, tuple, tuple]:
    """Disk sheet at z=0 plus plane-with-hole sheet at z=1/i.

    Returns (space, inner labels, outer labels).  With `strip_conductance`
    a single inter-sheet edge of that total conductance ties the disk rim to
    the hole rim, standing in for a thin connecting strip.
    """
    disk = build_planar_sheet(
        (-1.0, 1.0, -1.0, 1.0), h, clip=Disk(0.0, 0.0, 1.0), label_prefix="K", offset=LATTICE_OFFSET
    )
    sheet = build_planar_sheet(
        _plane_bounds(rim_radius, h),
        h,
        hole=Disk(0.0, 0.0, 1.0),
        z_offset=1.0 / i,
        label_prefix="S",
        offset=LATTICE_OFFSET,
    )
    inter = None
    if strip_conductance is not None:
        r_disk = np.sqrt(disk.coords[:, 0] ** 2 + disk.coords[:, 1] ** 2)
        r_sheet = np.sqrt(sheet.coords[:, 0] ** 2 + sheet.coords[:, 1] ** 2)
        la = disk.labels[int(np.argmax(r_disk))]
        lb = sheet.labels[int(np.argmin(r_sheet))]
        inter = [(la, lb, strip_conductance)]
    space = union_spaces(disk, sheet, inter)
    pad = 1e-9
    inner = tuple(disk.labels)
    outer = tuple(lab for lab in _radial_labels(space, rim_radius - pad, math.inf) if lab.startswith("S:"))
    return space, inner, outer


def run_example3(
    h: float = 0.1,
    i_list: Sequence[int] = (2, 4, 8),
    rim_radius: float = 4.0,
    strip_conductance: float | None = None,
    alphas: Sequence[float] | None = None,
    alpha_rule_c: float | None = None,
    tol: float = DEFAULT_VERDICT_TOL,
) -> SequenceExperiment:
    """Two-sheet planar family against the flat-plane condenser limit.

    Capacities are condenser values at the stated rim radius (the plane has
    no capacity at infinity; the rim is disclosed in the metadata).  Region
    measures come from thresholding the 1-Lipschitz extension of the limit
    disk's defining function; with the default alpha_i = 0 the region is
    exactly the disk sheet.
    """
    if h > 0.1 + 1e-12:
        raise PreconditionError(f"lattice spacing h={h} too coarse to resolve the unit disk")
    i_list = tuple(i_list)
    if rim_radius <= 1.0 + 4.0 * h:
        raise DomainError("rim radius sits too close to the disk; condenser would be distorted")

    limit_cond = limit_plane_condenser(h, rim_radius)
    limit_cap = graph_capacity(limit_cond).capacity

    defining = DefiningFunction.canonical_for(limit_cond.space, limit_cond.inner)
    if alphas is None and alpha_rule_c is None:
        alphas = tuple(0.0 for _ in i_list)
    spec = CorrespondingRegionSpec(defining, alphas=alphas, alpha_rule_c=alpha_rule_c)
    limit_measure = region_measure(limit_cond.space, limit_cond.inner)

    caps, measures, regions = [], [], []
    for pos, i in enumerate(i_list, start=1):
        strip = None if strip_conductance is None else strip_conductance / i
        space, inner, outer = two_sheet_space(h, i, rim_radius, strip)
        caps.append(graph_capacity(GraphCondenser(space, inner, outer, Dimension(2))).capacity)
        region = corresponding_region(spec, space, i, position=pos)
        regions.append(region)
        measures.append(region_measure(space, region))

    verdict = check_semicontinuity(caps, limit_cap, tol)
    meta = {
        "family": "two-sheet-plane",
        "h": h,
        "rim_radius": rim_radius,
        "strip_conductance": strip_conductance,
        "limit_reference": 1.0 / math.log(rim_radius),
        "region_check": "empirical (thresholds fixed up front, not chosen a posteriori)",
        "provenance": "graph",
        "limit_provenance": "graph",
    }
    return SequenceExperiment(
        "ex3",
        i_list,
        tuple(caps),
        limit_cap,
        verdict,
        measures=tuple(measures),
        limit_measure=limit_measure,
        regions=tuple(regions),
        metadata=meta,
    )


def run_example4(
    h: float = 0.1,
    i_list: Sequence[int] = (2, 4, 8),
    rim_radius: float = 4.0,
    tol: float = DEFAULT_VERDICT_TOL,
) -> SequenceExperiment:
    """Plane plus counter-oriented annulus: the semicontinuity failure case.

    Orientation cancellation is encoded by its geometric consequence: the
    limit space is the plane with the open annulus 1 < r < 2 deleted, which
    strands the unit disk as its own component (zero capacity).  Upstairs the
    disk lives inside a full plane sheet whose geometry does not depend on i,
    so the capacities form a positive constant sequence and the verdict is
    `violated`.
    """
    if h > 0.1 + 1e-12:
        raise PreconditionError(f"lattice spacing h={h} too coarse to resolve the unit disk")
    i_list = tuple(i_list)
    bounds = _plane_bounds(rim_radius, h)
    pad = 1e-9

    caps = []
    for i in i_list:
        plane = build_planar_sheet(bounds, h, label_prefix="P", offset=LATTICE_OFFSET)
        annulus = build_planar_sheet(
            (-2.0, 2.0, -2.0, 2.0),
            h,
            clip=Disk(0.0, 0.0, 2.0),
            hole=Disk(0.0, 0.0, 1.0),
            z_offset=1.0 / i,
            label_prefix="A",
            offset=LATTICE_OFFSET,
        )
        space = union_spaces(plane, annulus)
        inner = tuple(lab for lab in _radial_labels(space, 0.0, 1.0 + pad) if lab.startswith("P:"))
        outer = tuple(lab for lab in _radial_labels(space, rim_radius - pad, math.inf) if lab.startswith("P:"))
        caps.append(graph_capacity(GraphCondenser(space, inner, outer, Dimension(2))).capacity)

    limit_disk = build_planar_sheet(
        (-1.0, 1.0, -1.0, 1.0), h, clip=Disk(0.0, 0.0, 1.0), label_prefix="K", offset=LATTICE_OFFSET
    )
    limit_far = build_planar_sheet(bounds, h, hole=Disk(0.0, 0.0, 2.0), label_prefix="F", offset=LATTICE_OFFSET)
    limit_space = union_spaces(limit_disk, limit_far)
    inner = tuple(limit_disk.labels)
    outer = tuple(lab for lab in _radial_labels(limit_space, rim_radius - pad, math.inf) if lab.startswith("F:"))
    limit_cap = graph_capacity(GraphCondenser(limit_space, inner, outer, Dimension(2))).capacity

    verdict = check_semicontinuity(caps, limit_cap, tol)
    meta = {
        "family": "plane-plus-counter-annulus",
        "h": h,
        "rim_radius": rim_radius,
        "modeling_note": (
            "orientation cancellation modeled geometrically: the limit space deletes "
            "the annulus 1 < r < 2 instead of carrying current multiplicities"
        ),
        "provenance": "graph",
        "limit_provenance": "graph",
    }
    return SequenceExperiment("ex4", i_list, tuple(caps), limit_cap, verdict, metadata=meta)


def fit_power_law(i_list: Sequence[float], values: Sequence[float]) -> float:
    """Exponent p of a least-squares fit values ~ c / i^p (positive for decay)."""
    i_arr = np.asarray(i_list, dtype=float)
    v = np.asarray(values, dtype=float)
    if np.any(v <= 0) or np.any(i_arr <= 0):
        raise DomainError("power-law fit needs positive indices and values")
    slope = np.polyfit(np.log(i_arr), np.log(v), 1)[0]
    return float(-slope)


RUNNERS = {
    "ex1": run_example1,
    "ex2": run_example2,
    "ex3": run_example3,
    "ex4": run_example4,
}
