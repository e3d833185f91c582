"""Finite metric-measure spaces with a conductance-graph Dirichlet form.

The metric (full distance data or ambient R^3 coordinates) and the energy
(edge conductances) are deliberately independent: two sheets can sit a
hair's width apart in R^3 while their Dirichlet forms stay disconnected.
Capacity of a condenser (K grounded against B) is the minimum of

    E(u) = sum_edges c_ij (u_i - u_j)^2,   u = 1 on K, u = 0 on B,

divided by gamma_m, so planar-lattice results compare directly against
continuum condenser values.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import LinearOperator, cg

from .errors import (
    DomainError,
    EmptyRegionWarning,
    MetricError,
    SolverError,
)
from .geometry import Dimension

_TRIANGLE_TOL = 1e-9
_METRIC_CHECK_LIMIT = 1500  # full O(n^3) metric validation cap
_DENSE_SOLVE_LIMIT = 2000  # free-node count below which Cholesky is used
_CG_RTOL = 1e-12


class FiniteMetricMeasureSpace:
    """Labeled points with measure weights, a metric, and a conductance graph.

    The metric comes from an explicit distance matrix (validated against the
    metric axioms on construction) or from ambient R^3 coordinates (Euclidean
    restriction, a metric by construction).
    """

    def __init__(
        self,
        labels,
        weight,
        coords=None,
        edges=(),
        conductance=(),
        dist_matrix=None,
    ):
        self.labels = [str(x) for x in labels]
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise DomainError("point labels must be unique")
        self.weight = np.asarray(weight, dtype=float)
        if self.weight.shape != (n,) or np.any(self.weight < 0) or not np.all(np.isfinite(self.weight)):
            raise DomainError("need one finite nonnegative weight per point")
        self.coords = None if coords is None else np.asarray(coords, dtype=float)
        if self.coords is not None and self.coords.shape != (n, 3):
            raise DomainError("coordinates must be an (n, 3) array")
        self.dist_matrix = None if dist_matrix is None else np.asarray(dist_matrix, dtype=float)
        if self.coords is None and self.dist_matrix is None and n > 0:
            raise DomainError("need coordinates or an explicit distance matrix")
        if self.dist_matrix is not None:
            self._check_metric(self.dist_matrix)

        edges = np.asarray(edges, dtype=int).reshape(-1, 2)
        conductance = np.asarray(conductance, dtype=float).reshape(-1)
        if edges.shape[0] != conductance.shape[0]:
            raise DomainError("need one conductance per edge")
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise DomainError("edge endpoint out of range")
        if edges.size and np.any(edges[:, 0] == edges[:, 1]):
            raise DomainError("self-loop edges are not allowed")
        if np.any(conductance <= 0) or not np.all(np.isfinite(conductance)):
            raise DomainError("conductances must be finite and positive")
        self.edges = edges
        self.conductance = conductance
        self._index = {lab: k for k, lab in enumerate(self.labels)}

    def _check_metric(self, d):
        n = len(self.labels)
        if d.shape != (n, n):
            raise MetricError(f"distance matrix must be {n}x{n}")
        if np.any(d < -_TRIANGLE_TOL):
            raise MetricError("distances must be nonnegative")
        if np.max(np.abs(np.diag(d))) > _TRIANGLE_TOL:
            raise MetricError("distance matrix must have zero diagonal")
        if np.max(np.abs(d - d.T)) > _TRIANGLE_TOL * max(1.0, float(np.max(d))):
            raise MetricError("distance matrix must be symmetric")
        if n > _METRIC_CHECK_LIMIT:
            raise MetricError(
                f"explicit distance matrices are only validated up to {_METRIC_CHECK_LIMIT} "
                "points; use coordinates for larger spaces"
            )
        tol = _TRIANGLE_TOL * max(1.0, float(np.max(d)))
        for k in range(n):
            slack = d - (d[:, k][:, None] + d[None, k, :])
            if np.max(slack) > tol:
                i, j = np.unravel_index(np.argmax(slack), slack.shape)
                raise MetricError(
                    f"triangle inequality fails: d({self.labels[i]},{self.labels[j]}) > "
                    f"d(.,{self.labels[k]}) route by {float(slack[i, j]):.3e}"
                )

    # -- queries ---------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self._index[label]

    def indices(self, labels) -> np.ndarray:
        return np.array([self._index[str(x)] for x in labels], dtype=int)

    def total_measure(self) -> float:
        return float(np.sum(self.weight))

    def distance_matrix(self) -> np.ndarray:
        if self.dist_matrix is not None:
            return self.dist_matrix
        if self.n > 4000:
            raise MetricError("refusing to materialize a distance matrix this large")
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def distances_from(self, idx: np.ndarray) -> np.ndarray:
        """Distances from the given points to every point, shape (len(idx), n)."""
        if self.dist_matrix is not None:
            return self.dist_matrix[np.asarray(idx, dtype=int)]
        diff = self.coords[np.asarray(idx, dtype=int)][:, None, :] - self.coords[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def laplacian(self) -> sparse.csr_matrix:
        i, j, c = self.edges[:, 0], self.edges[:, 1], self.conductance
        rows = np.concatenate([i, j, i, j])
        cols = np.concatenate([j, i, i, j])
        vals = np.concatenate([-c, -c, c, c])
        return sparse.coo_matrix((vals, (rows, cols)), shape=(self.n, self.n)).tocsr()

    def adjacency(self) -> sparse.csr_matrix:
        i, j, c = self.edges[:, 0], self.edges[:, 1], self.conductance
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        vals = np.concatenate([c, c])
        return sparse.coo_matrix((vals, (rows, cols)), shape=(self.n, self.n)).tocsr()

    # -- serialization ------------------------------------------------------------

    def to_doc(self) -> dict:
        points = []
        for k, lab in enumerate(self.labels):
            xyz = None if self.coords is None else [float(v) for v in self.coords[k]]
            points.append({"label": lab, "xyz": xyz, "weight": float(self.weight[k])})
        doc = {
            "points": points,
            "edges": [
                [self.labels[int(i)], self.labels[int(j)], float(c)]
                for (i, j), c in zip(self.edges, self.conductance)
            ],
        }
        if self.dist_matrix is not None:
            doc["dist"] = [[float(v) for v in row] for row in self.dist_matrix]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True)

    @staticmethod
    def from_doc(doc: dict) -> "FiniteMetricMeasureSpace":
        unknown = set(doc) - {"points", "edges", "dist"}
        if unknown:
            raise DomainError(f"unknown space keys: {sorted(unknown)}")
        labels, weights, coords = [], [], []
        has_coords = True
        for p in doc.get("points", []):
            extra = set(p) - {"label", "xyz", "weight"}
            if extra:
                raise DomainError(f"unknown point keys: {sorted(extra)}")
            labels.append(p["label"])
            weights.append(float(p.get("weight", 0.0)))
            if p.get("xyz") is None:
                has_coords = False
            else:
                coords.append([float(v) for v in p["xyz"]])
        index = {lab: k for k, lab in enumerate(labels)}
        edges, cond = [], []
        for a, b, c in doc.get("edges", []):
            edges.append((index[a], index[b]))
            cond.append(float(c))
        dist = doc.get("dist")
        return FiniteMetricMeasureSpace(
            labels,
            weights,
            coords=np.asarray(coords) if has_coords and labels else None,
            edges=np.asarray(edges, dtype=int).reshape(-1, 2),
            conductance=cond,
            dist_matrix=None if dist is None else np.asarray(dist, dtype=float),
        )

    @staticmethod
    def from_json(text: str) -> "FiniteMetricMeasureSpace":
        return FiniteMetricMeasureSpace.from_doc(json.loads(text))


@dataclass(frozen=True)
class GraphCondenser:
    """Inner set K held at 1, grounded boundary B held at 0."""

    space: FiniteMetricMeasureSpace
    inner: tuple
    outer: tuple
    dim: Dimension = field(default_factory=lambda: Dimension(2))

    def __post_init__(self):
        inner = tuple(str(x) for x in self.inner)
        outer = tuple(str(x) for x in self.outer)
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "outer", outer)
        if not inner:
            raise DomainError("condenser needs a nonempty inner set K")
        if set(inner) & set(outer):
            raise DomainError("inner and outer sets must be disjoint")
        for lab in inner + outer:
            if lab not in self.space._index:
                raise DomainError(f"condenser references unknown point {lab!r}")


@dataclass(frozen=True)
class GraphPotential:
    """Minimizer of the graph Dirichlet energy; capacity = raw_energy / gamma_m."""

    u: np.ndarray
    raw_energy: float
    capacity: float


def _solve_spd(A: sparse.csr_matrix, b: np.ndarray, rtol: float) -> np.ndarray:
    n = A.shape[0]
    if n == 0:
        return np.zeros(0)
    if n < _DENSE_SOLVE_LIMIT:
        return cho_solve(cho_factor(A.toarray()), b)
    diag = A.diagonal()
    M = LinearOperator(A.shape, matvec=lambda x: x / diag)
    x, info = cg(A, b, rtol=rtol, atol=0.0, maxiter=40 * n, M=M)
    if info != 0:
        raise SolverError(f"conjugate gradient failed to converge (info={info})")
    return x


def graph_capacity(condenser: GraphCondenser, rtol: float = _CG_RTOL) -> GraphPotential:
    """Harmonic condenser potential and capacity on the edge graph.

    Components meeting both K and B get the unique harmonic minimizer
    (Jacobi-preconditioned CG at the given relative residual above the dense
    cutoff, Cholesky below it); components meeting only K sit at 1, all
    others at 0.  With no K-B path the capacity is exactly zero.
    """
    space = condenser.space
    n = space.n
    k_idx = space.indices(condenser.inner)
    b_idx = space.indices(condenser.outer)

    n_comp, comp = connected_components(space.adjacency(), directed=False)
    k_comps = set(comp[k_idx].tolist())
    b_comps = set(comp[b_idx].tolist())

    u = np.zeros(n)
    u[np.isin(comp, list(k_comps - b_comps))] = 1.0
    u[k_idx] = 1.0
    u[b_idx] = 0.0

    live = k_comps & b_comps
    if live:
        fixed = np.zeros(n, dtype=bool)
        fixed[k_idx] = True
        fixed[b_idx] = True
        free = np.where(~fixed & np.isin(comp, list(live)))[0]
        if free.size:
            L = space.laplacian()
            A = L[free][:, free].tocsr()
            b_vec = -(L[free] @ u - A @ u[free])
            u[free] = _solve_spd(A, b_vec, rtol)

    du = u[space.edges[:, 0]] - u[space.edges[:, 1]]
    raw_energy = float(np.sum(space.conductance * du * du))
    return GraphPotential(u, raw_energy, raw_energy / condenser.dim.gamma)


def harmonicity_residual(space: FiniteMetricMeasureSpace, condenser: GraphCondenser, u: np.ndarray) -> float:
    """Max |(L u)_i| over free nodes; zero for an exactly harmonic potential."""
    r = space.laplacian() @ u
    fixed = np.zeros(space.n, dtype=bool)
    fixed[space.indices(condenser.inner)] = True
    fixed[space.indices(condenser.outer)] = True
    free = ~fixed
    return float(np.max(np.abs(r[free]))) if np.any(free) else 0.0


@dataclass(frozen=True)
class Disk:
    """Closed disk in the lattice plane."""

    cx: float
    cy: float
    radius: float


def build_planar_sheet(
    bounds: tuple[float, float, float, float],
    h: float,
    hole: Disk | None = None,
    z_offset: float = 0.0,
    clip: Disk | None = None,
    label_prefix: str = "p",
    offset: float = 0.0,
) -> FiniteMetricMeasureSpace:
    """Square lattice sheet embedded at height z_offset.

    Nodes sit on the global lattice (k + offset) * h inside the bounds, so
    sheets built with the same spacing and offset share exact coordinates.
    A half offset keeps nodes off circles whose radius is a lattice multiple,
    which steadies boundary-staircase convergence.  Each node carries weight
    h^2 and each lattice edge conductance 1 (the FEM-consistent value for the
    five-point stencil in two dimensions).  `hole` removes the open disk
    (boundary nodes survive); `clip` keeps only the closed disk.
    """
    if h <= 0:
        raise DomainError(f"lattice spacing must be positive, got h={h}")
    xmin, xmax, ymin, ymax = bounds
    if xmax < xmin or ymax < ymin:
        raise DomainError("empty lattice bounds")
    kx = np.arange(
        math.ceil(xmin / h - offset - 1e-9), math.floor(xmax / h - offset + 1e-9) + 1, dtype=int
    )
    ky = np.arange(
        math.ceil(ymin / h - offset - 1e-9), math.floor(ymax / h - offset + 1e-9) + 1, dtype=int
    )
    ix, iy = np.meshgrid(kx, ky, indexing="ij")
    ix, iy = ix.ravel(), iy.ravel()
    x = (ix + offset) * h
    y = (iy + offset) * h

    keep = np.ones(x.size, dtype=bool)
    pad = 1e-9 * h
    if hole is not None:
        r2 = (x - hole.cx) ** 2 + (y - hole.cy) ** 2
        keep &= r2 >= hole.radius**2 - pad
    if clip is not None:
        r2 = (x - clip.cx) ** 2 + (y - clip.cy) ** 2
        keep &= r2 <= clip.radius**2 + pad

    if not np.any(keep):
        warnings.warn("lattice region came out empty", EmptyRegionWarning, stacklevel=2)
    ix, iy, x, y = ix[keep], iy[keep], x[keep], y[keep]
    order = np.lexsort((iy, ix))
    ix, iy, x, y = ix[order], iy[order], x[order], y[order]

    labels = [f"{label_prefix}:{a}_{b}" for a, b in zip(ix, iy)]
    coords = np.column_stack([x, y, np.full(x.size, float(z_offset))])
    weight = np.full(x.size, h * h)

    cell = {(a, b): k for k, (a, b) in enumerate(zip(ix.tolist(), iy.tolist()))}
    edges = []
    for k, (a, b) in enumerate(zip(ix.tolist(), iy.tolist())):
        right = cell.get((a + 1, b))
        if right is not None:
            edges.append((k, right))
        up = cell.get((a, b + 1))
        if up is not None:
            edges.append((k, up))
    edges = np.asarray(edges, dtype=int).reshape(-1, 2)
    return FiniteMetricMeasureSpace(
        labels, weight, coords=coords, edges=edges, conductance=np.ones(edges.shape[0])
    )


def union_spaces(
    a: FiniteMetricMeasureSpace,
    b: FiniteMetricMeasureSpace,
    inter_sheet_edges=None,
) -> FiniteMetricMeasureSpace:
    """Disjoint union; ambient R^3 supplies the metric, sheets keep their edges.

    Optional inter-sheet edges are (label_in_a, label_in_b, conductance)
    triples; without them the Dirichlet form stays blockwise even though the
    sheets may be arbitrarily close in R^3.
    """
    if a.n == 0:
        return b
    if b.n == 0:
        return a
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise DomainError(f"overlapping labels in union: {sorted(overlap)[:5]}")
    if a.coords is None or b.coords is None:
        raise DomainError("union requires ambient coordinates on both spaces")
    labels = a.labels + b.labels
    coords = np.vstack([a.coords, b.coords])
    weight = np.concatenate([a.weight, b.weight])
    off = a.n
    edges = np.vstack([a.edges.reshape(-1, 2), b.edges.reshape(-1, 2) + off])
    cond = np.concatenate([a.conductance, b.conductance])
    if inter_sheet_edges:
        extra, extra_c = [], []
        for la, lb, c in inter_sheet_edges:
            extra.append((a.index(str(la)), off + b.index(str(lb))))
            extra_c.append(float(c))
        edges = np.vstack([edges, np.asarray(extra, dtype=int)])
        cond = np.concatenate([cond, np.asarray(extra_c, dtype=float)])
    return FiniteMetricMeasureSpace(labels, weight, coords=coords, edges=edges, conductance=cond)


def capacity_csv(rows, rim_radius: float | None) -> str:
    """Capacity report rows as CSV with columns label,raw_energy,capacity,rim_radius."""
    rim = "" if rim_radius is None else repr(float(rim_radius))
    lines = ["label,raw_energy,capacity,rim_radius"]
    for label, raw, cap in rows:
        lines.append(f"{label},{raw!r},{cap!r},{rim}")
    return "\n".join(lines) + "\n"
