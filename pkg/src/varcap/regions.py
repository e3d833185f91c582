"""Defining functions, largest Lipschitz extensions, and sublevel regions.

A defining function for a compact K in a finite space S is a 1-Lipschitz u
with {u <= 0} = K that equals d(., K) off K.  Its largest L-Lipschitz
extension to a bigger point set Y is

    U(y) = min over anchors a of ( u(a) + L * d(a, y) ),

an exact finite minimum, no tolerances involved.  Thresholding U at a level
alpha_i >= 0 inside another space S_i produces the region of S_i matched to
K; for the canonical u = d(., K) that region is exactly the closed
alpha_i-neighborhood of K intersected with S_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, PreconditionError
from .mms import FiniteMetricMeasureSpace

_LIP_TOL = 1e-9


def _check_lipschitz(values: np.ndarray, dists: np.ndarray, lip: float, labels) -> None:
    """Exhaustive pairwise check; raises with a witness pair on failure."""
    gap = np.abs(values[:, None] - values[None, :]) - lip * dists
    worst = float(np.max(gap))
    if worst > _LIP_TOL * max(1.0, float(np.max(np.abs(values)))):
        i, j = np.unravel_index(np.argmax(gap), gap.shape)
        raise PreconditionError(
            f"values are not {lip}-Lipschitz: |u({labels[i]}) - u({labels[j]})| = "
            f"{abs(values[i]-values[j])!r} > {lip} * d = {lip * dists[i, j]!r}"
        )


def mcshane_extend(
    space: FiniteMetricMeasureSpace,
    anchor_labels: Sequence[str],
    anchor_values: Sequence[float],
    lip: float = 1.0,
) -> np.ndarray:
    """Largest L-Lipschitz extension of anchor data to every point of `space`.

    Restricts to the anchor values, is L-Lipschitz, and dominates every
    L-Lipschitz extension pointwise.  The anchor data must itself be
    L-Lipschitz; a violating pair is reported otherwise.
    """
    if lip < 0:
        raise DomainError("Lipschitz constant must be nonnegative")
    a_idx = space.indices(anchor_labels)
    if a_idx.size == 0:
        raise PreconditionError("extension needs at least one anchor")
    values = np.asarray(anchor_values, dtype=float)
    if values.shape != (a_idx.size,):
        raise DomainError("need one value per anchor")
    d_rows = space.distances_from(a_idx)  # (n_anchor, n)
    _check_lipschitz(values, d_rows[:, a_idx], lip, [space.labels[k] for k in a_idx])
    return np.min(values[:, None] + lip * d_rows, axis=0)


def extend_from_coords(
    anchor_xyz: np.ndarray,
    anchor_values: np.ndarray,
    query_xyz: np.ndarray,
    lip: float = 1.0,
    chunk: int = 2048,
) -> np.ndarray:
    """McShane formula between raw R^3 point sets, chunked for large queries."""
    anchor_xyz = np.asarray(anchor_xyz, dtype=float)
    anchor_values = np.asarray(anchor_values, dtype=float)
    query_xyz = np.asarray(query_xyz, dtype=float)
    out = np.empty(query_xyz.shape[0])
    for lo in range(0, query_xyz.shape[0], chunk):
        q = query_xyz[lo : lo + chunk]
        diff = anchor_xyz[:, None, :] - q[None, :, :]
        d = np.sqrt(np.sum(diff * diff, axis=-1))
        out[lo : lo + chunk] = np.min(anchor_values[:, None] + lip * d, axis=0)
    return out


def distance_to_set(space: FiniteMetricMeasureSpace, subset_labels: Sequence[str]) -> np.ndarray:
    """d(., subset) for every point of the space."""
    idx = space.indices(subset_labels)
    if idx.size == 0:
        raise DomainError("distance to an empty set is undefined")
    if space.dist_matrix is not None:
        return np.min(space.dist_matrix[idx], axis=0)
    tree = cKDTree(space.coords[idx])
    d, _ = tree.query(space.coords, k=1)
    return np.asarray(d, dtype=float)


@dataclass(frozen=True)
class DefiningFunction:
    """1-Lipschitz u on a space with {u <= 0} = K and u = d(., K) off K."""

    space: FiniteMetricMeasureSpace
    values: np.ndarray
    region_labels: tuple
    canonical: bool = False

    @staticmethod
    def canonical_for(space: FiniteMetricMeasureSpace, region_labels: Sequence[str]) -> "DefiningFunction":
        """The nonnegative defining function u = d(., K)."""
        labels = tuple(str(x) for x in region_labels)
        values = distance_to_set(space, labels)
        values[space.indices(labels)] = 0.0
        return DefiningFunction(space, values, labels, canonical=True)

    @staticmethod
    def from_values(
        space: FiniteMetricMeasureSpace,
        values: Sequence[float],
        region_labels: Sequence[str],
        check_lipschitz: bool = True,
    ) -> "DefiningFunction":
        """User-supplied defining function (e.g. a signed distance), validated.

        Checks {values <= 0} = K, u = d(., K) off K, and (exhaustively, when
        requested) the 1-Lipschitz bound.
        """
        labels = tuple(str(x) for x in region_labels)
        values = np.asarray(values, dtype=float)
        if values.shape != (space.n,):
            raise DomainError("need one value per point of the space")
        k_idx = space.indices(labels)
        mask = np.zeros(space.n, dtype=bool)
        mask[k_idx] = True
        if not np.array_equal(values <= 0.0, mask):
            raise PreconditionError("the region {u <= 0} does not match the given K")
        outside = ~mask
        if np.any(outside):
            d_k = distance_to_set(space, labels)
            if np.max(np.abs(values[outside] - d_k[outside])) > _LIP_TOL:
                raise PreconditionError("defining function must equal d(., K) outside K")
        if check_lipschitz:
            _check_lipschitz(values, space.distance_matrix(), 1.0, space.labels)
        return DefiningFunction(space, values, labels, canonical=False)


@dataclass(frozen=True)
class CorrespondingRegionSpec:
    """A defining function plus the threshold sequence alpha_i -> 0.

    Thresholds come either as an explicit list (one entry per position in the
    experiment sequence) or as the rule alpha_i = c / i applied to the family
    index i itself.
    """

    defining: DefiningFunction
    alphas: tuple | None = None
    alpha_rule_c: float | None = None

    def __post_init__(self):
        if (self.alphas is None) == (self.alpha_rule_c is None):
            raise DomainError("provide exactly one of an alpha list or a c/i rule")
        if self.alphas is not None:
            alphas = tuple(float(a) for a in self.alphas)
            if any(a < 0 for a in alphas):
                raise DomainError("thresholds must be nonnegative")
            object.__setattr__(self, "alphas", alphas)
        elif self.alpha_rule_c < 0:
            raise DomainError("alpha rule coefficient must be nonnegative")

    def alpha(self, i: int, position: int | None = None) -> float:
        """Threshold for family index i; `position` is the 1-based sequence slot.

        Explicit lists are positional (position defaults to i); the c/i rule
        uses the family index.
        """
        if self.alphas is not None:
            pos = i if position is None else position
            if not (1 <= pos <= len(self.alphas)):
                raise DomainError(f"no threshold recorded for sequence position {pos}")
            return self.alphas[pos - 1]
        return self.alpha_rule_c / i

    def extension_on(self, target: FiniteMetricMeasureSpace) -> np.ndarray:
        """Values of the 1-Lipschitz extension U at the target's points.

        Both spaces must carry ambient R^3 coordinates.  For the canonical
        defining function the extension is exactly d(K, .), evaluated with a
        KD-tree; otherwise the finite McShane minimum runs over every anchor.
        """
        src = self.defining.space
        if src.coords is None or target.coords is None:
            raise DomainError("ambient extension needs coordinates on both spaces")
        if self.defining.canonical:
            k_idx = src.indices(self.defining.region_labels)
            tree = cKDTree(src.coords[k_idx])
            d, _ = tree.query(target.coords, k=1)
            return np.asarray(d, dtype=float)
        return extend_from_coords(src.coords, self.defining.values, target.coords, lip=1.0)


def corresponding_region(
    spec: CorrespondingRegionSpec,
    space_i: FiniteMetricMeasureSpace,
    i: int,
    position: int | None = None,
) -> tuple:
    """Labels of {x in S_i : U(x) <= alpha_i}; empty regions are legal."""
    U = spec.extension_on(space_i)
    alpha = spec.alpha(i, position)
    mask = U <= alpha
    return tuple(lab for lab, keep in zip(space_i.labels, mask) if keep)


def region_measure(space: FiniteMetricMeasureSpace, region_labels: Sequence[str]) -> float:
    """Total measure of the given points."""
    labels = tuple(str(x) for x in region_labels)
    if not labels:
        return 0.0
    return float(np.sum(space.weight[space.indices(labels)]))
