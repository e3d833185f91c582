"""Piecewise-linear minimization of the reduced radial Dirichlet energy.

Independent numerical route to radial capacity: minimize

    E(u) = omega * sum_k w_k (u_{k+1} - u_k)^2 / h_k,
    w_k = element weight f^(m-1)/q at the element midpoint,

over grid functions with u = 1 at s0 and u = 0 at the truncation radius L,
then extrapolate L -> inf (and mesh -> 0) to estimate the capacity.  The
piecewise-linear minimizer is found by a symmetric tridiagonal solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solveh_banded

from .errors import DomainError, InconsistencyError, PreconditionError, SingularWeightError
from .warped import RadialCondenser


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing nodes t_0 < ... < t_N; uniform or geometrically graded."""

    nodes: np.ndarray
    grading: str = "uniform"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 3:
            raise DomainError("grid needs at least 3 nodes (N >= 2 elements)")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("grid nodes must be strictly increasing")

    @staticmethod
    def uniform(s0: float, L: float, n_elements: int) -> "RadialGrid":
        if n_elements < 2:
            raise DomainError("need at least 2 elements")
        return RadialGrid(np.linspace(s0, L, n_elements + 1), "uniform")

    @staticmethod
    def geometric(s0: float, L: float, h0: float, ratio: float = 1.05) -> "RadialGrid":
        """Element sizes h0 * ratio^k, rescaled so the last node lands on L."""
        if not (1.0 < ratio <= 1.5):
            raise DomainError(f"geometric ratio must be in (1, 1.5], got {ratio}")
        if h0 <= 0 or L <= s0:
            raise DomainError("need h0 > 0 and L > s0")
        span = L - s0
        sizes = [h0]
        while sum(sizes) < span:
            sizes.append(sizes[-1] * ratio)
        if len(sizes) < 2:
            sizes = [span / 2.0, span / 2.0]
        h = np.array(sizes) * (span / sum(sizes))
        nodes = s0 + np.concatenate(([0.0], np.cumsum(h)))
        nodes[-1] = L
        return RadialGrid(nodes, f"geometric({ratio})")

    def refined(self) -> "RadialGrid":
        """Insert every element midpoint (nested refinement)."""
        mids = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        out = np.empty(self.nodes.size + mids.size)
        out[0::2] = self.nodes
        out[1::2] = mids
        return RadialGrid(out, self.grading)

    @property
    def s0(self) -> float:
        return float(self.nodes[0])

    @property
    def L(self) -> float:
        return float(self.nodes[-1])

    @property
    def h_max(self) -> float:
        return float(np.max(np.diff(self.nodes)))

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1


@dataclass(frozen=True)
class FemSolution:
    """Discrete minimizer with its energy; cap_L = energy / gamma_m."""

    grid: RadialGrid
    u: np.ndarray
    energy: float
    cap_L: float


def _element_conductances(condenser: RadialCondenser, grid: RadialGrid) -> np.ndarray:
    """Per-element conductance w_k / h_k with midpoint-rule weights."""
    profile = condenser.profile
    nodes = grid.nodes
    if nodes[0] < profile.s_min - 1e-12 or nodes[-1] > profile.s_max:
        raise DomainError("grid exceeds the profile domain")
    interior = nodes[1:-1]
    f_int = np.atleast_1d(profile.f(interior))
    if np.any(f_int <= 0.0):
        bad = float(interior[np.argmin(f_int)])
        raise SingularWeightError(f"warp factor vanishes at interior node s={bad}")
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    w = np.atleast_1d(profile.element_weight(mids))
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise SingularWeightError("nonpositive element weight at an element midpoint")
    return w / np.diff(nodes)


def _minimize_chain(cond: np.ndarray, fixed: dict[int, float]) -> np.ndarray:
    """Minimize sum_k cond_k (u_{k+1}-u_k)^2 subject to fixed node values.

    Unconstrained nodes satisfy the three-point harmonic equation; the
    resulting SPD tridiagonal system is solved with a banded Cholesky.
    """
    n = cond.size + 1
    u = np.zeros(n)
    free = np.array([k for k in range(n) if k not in fixed], dtype=int)
    for k, v in fixed.items():
        u[k] = v
    if free.size == 0:
        return u
    diag = np.zeros(n)
    diag[:-1] += cond
    diag[1:] += cond
    pos = -np.ones(n, dtype=int)
    pos[free] = np.arange(free.size)
    ab = np.zeros((2, free.size))
    ab[1] = diag[free]
    rhs = np.zeros(free.size)
    for k in range(n - 1):
        i, j, c = k, k + 1, cond[k]
        pi, pj = pos[i], pos[j]
        if pi >= 0 and pj >= 0:
            ab[0, pj] = -c  # super-diagonal entry (free nodes are consecutive per element)
        elif pi >= 0:
            rhs[pi] += c * u[j]
        elif pj >= 0:
            rhs[pj] += c * u[i]
    u[free] = solveh_banded(ab, rhs)
    return u


def solve_radial(condenser: RadialCondenser, grid: RadialGrid) -> FemSolution:
    """Exact minimizer of the discrete energy with u(s0)=1, u(L)=0.

    For a two-sided symmetric condenser the energy is doubled (the even
    reflection solves the second end).
    """
    if abs(grid.s0 - condenser.s0) > 1e-12 * max(1.0, abs(condenser.s0)):
        raise DomainError(f"grid must start at s0={condenser.s0}, starts at {grid.s0}")
    cond = _element_conductances(condenser, grid)
    u = _minimize_chain(cond, {0: 1.0, grid.n_elements: 0.0})
    omega = condenser.profile.dim.omega
    energy = omega * float(np.sum(cond * np.diff(u) ** 2))
    if condenser.ends == "two_symmetric":
        energy *= 2.0
    cap_L = energy / condenser.profile.dim.gamma
    return FemSolution(grid, u, energy, cap_L)


def plateau_energy(condenser: RadialCondenser, grid: RadialGrid, anchor: float) -> tuple[float, np.ndarray]:
    """Energy of the minimizer clamped to 1 at the node nearest `anchor`,
    grounded at the right end, with a natural (free) left end.

    Used to confirm that a capped side of a condenser carries no energy: with
    nothing grounded left of the anchor the minimizer is constant 1 there.
    """
    cond = _element_conductances(condenser, grid)
    k = int(np.argmin(np.abs(grid.nodes - anchor)))
    u = _minimize_chain(cond, {k: 1.0, grid.n_elements: 0.0})
    omega = condenser.profile.dim.omega
    left = omega * float(np.sum(cond[:k] * np.diff(u[: k + 1]) ** 2))
    return left, u


@dataclass(frozen=True)
class CapacityEstimate:
    """Extrapolated capacity with a conservative error bound and the raw table."""

    cap: float
    error_estimate: float
    rows: tuple  # (L, h, cap, energy) per solve, finest level per L last


def default_schedule(
    condenser: RadialCondenser,
    L_values: Sequence[float] | None = None,
    levels: int = 2,
    h0: float | None = None,
    ratio: float = 1.05,
) -> list[tuple[RadialGrid, float]]:
    """Geometrically graded grids on a ladder of truncation radii.

    Default truncation radii are {1e2, 1e3, 1e4} * max(s0, 1); each L carries
    `levels` nested refinements of the same base grid.
    """
    s0 = condenser.s0
    scale = max(abs(s0), 1.0)
    if L_values is None:
        L_values = [100.0 * scale, 1000.0 * scale, 10000.0 * scale]
    if h0 is None:
        h0 = scale / 64.0
    schedule = []
    for L in sorted(L_values):
        if L <= s0:
            raise DomainError(f"truncation radius {L} must exceed s0={s0}")
        grid = RadialGrid.geometric(s0, L, h0, ratio)
        for _ in range(levels):
            schedule.append((grid, L))
            grid = grid.refined()
    return schedule


def capacity_estimate(
    condenser: RadialCondenser, schedule: Sequence[tuple[RadialGrid, float]]
) -> CapacityEstimate:
    """Richardson-extrapolated capacity from a (grid, L) schedule.

    Per L: second-order extrapolation over the nested refinements.  Across L:
    the cap_L values must be monotone nonincreasing (domain monotonicity);
    a cap + c/L fit on consecutive pairs supplies the L -> inf limit.  The
    error bound combines mesh extrapolation gaps and the spread of the last
    two extrapolants.
    """
    by_L: dict[float, list[FemSolution]] = {}
    rows = []
    for grid, L in schedule:
        if abs(grid.L - L) > 1e-9 * max(1.0, L):
            raise PreconditionError(f"grid ends at {grid.L}, schedule says L={L}")
        sol = solve_radial(condenser, grid)
        by_L.setdefault(L, []).append(sol)
        rows.append((L, grid.h_max, sol.cap_L, sol.energy))

    L_sorted = sorted(by_L)
    if len(L_sorted) < 3:
        raise PreconditionError("schedule needs at least 3 distinct increasing L values")
    if max(len(v) for v in by_L.values()) < 2:
        raise PreconditionError("schedule needs at least 2 refinement levels")

    cap_L, mesh_err = {}, {}
    for L in L_sorted:
        sols = sorted(by_L[L], key=lambda s: s.grid.n_elements)
        caps = [s.cap_L for s in sols]
        if len(caps) >= 2:
            # nested bisection: O(h^2) leading error, factor-4 reduction
            extr = caps[-1] + (caps[-1] - caps[-2]) / 3.0
            cap_L[L] = extr
            mesh_err[L] = abs(caps[-1] - caps[-2]) / 3.0 + 1e-15 * abs(extr)
        else:
            cap_L[L] = caps[-1]
            mesh_err[L] = 1e-12 * max(abs(caps[-1]), 1.0)

    scale = max(abs(cap_L[L_sorted[0]]), 1e-30)
    for La, Lb in zip(L_sorted, L_sorted[1:]):
        slack = mesh_err[La] + mesh_err[Lb] + 1e-10 * scale
        if cap_L[Lb] > cap_L[La] + slack:
            raise InconsistencyError(
                f"cap_L increased from L={La} ({cap_L[La]!r}) to L={Lb} ({cap_L[Lb]!r}); "
                "refine the grids"
            )

    extrapolants = []
    for La, Lb in zip(L_sorted[-3:], L_sorted[-3:][1:]):
        ca, cb = cap_L[La], cap_L[Lb]
        extrapolants.append((Lb * cb - La * ca) / (Lb - La))
    cap = max(extrapolants[-1], 0.0)
    err = abs(extrapolants[-1] - extrapolants[0]) if len(extrapolants) > 1 else 0.0
    err += sum(mesh_err[L] for L in L_sorted[-2:]) + 1e-14 * scale
    return CapacityEstimate(cap, err, tuple(rows))


def fem_csv(rows: Sequence[tuple[float, float, float, float]]) -> str:
    """Convergence table as CSV with columns L,h,cap,energy."""
    lines = ["L,h,cap,energy"]
    for L, h, cap, energy in rows:
        lines.append(f"{L!r},{h!r},{cap!r},{energy!r}")
    return "\n".join(lines) + "\n"
