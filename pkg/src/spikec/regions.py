"""Linear-region analysis of a one-layer, single-output spiking neuron.

The firing time of such a neuron is piecewise affine in the input spike
times: each region corresponds to one subset I of inputs whose spikes arrive
strictly before the output fires.  On that region the firing time is

    t_v = sum_{i in I} (w_i / W) t_i + (theta + sum_{i in I} w_i d_i) / W,

with W = sum_{i in I} w_i > 0, and the region itself is cut out by linear
inequalities: inputs outside I must arrive at or after t_v, inputs inside I
strictly before.  Enumerating subsets and testing each inequality system for
feasibility inside a box yields the exact region count; a finite-difference
gradient clustering over a grid provides an independent empirical count.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .boxes import Box
from .errors import DimensionError, InvalidParameterError
from .simplex import feasible
from .snn_core import SpikingNetwork, network_forward_batch

MAX_ENUM_DIM = 20
ZERO_NORMAL_TOL = 1e-12
STRICT_EPS_SCALE = 1e-7
CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class Halfspace:
    """The constraint normal . t >= bound (weak) or > bound (strict)."""

    normal: np.ndarray
    bound: float
    strict: bool


@dataclass(frozen=True)
class RegionDescriptor:
    """One candidate linear region: its subset, affine map and inequalities."""

    subset: frozenset[int]
    gradient: np.ndarray
    offset: float
    halfspaces: tuple[Halfspace, ...]
    feasible_in_box: bool


def _region_for_subset(
    subset: tuple[int, ...], w: np.ndarray, d: np.ndarray, theta: float
) -> tuple[np.ndarray, float, tuple[Halfspace, ...]] | None:
    idx = np.asarray(subset)
    W = float(w[idx].sum())
    if W <= 0:
        return None
    dim = w.size
    g = np.zeros(dim)
    g[idx] = w[idx] / W
    offset = (theta + float(np.dot(w[idx], d[idx]))) / W
    inset = np.zeros(dim, dtype=bool)
    inset[idx] = True
    hs = []
    for k in range(dim):
        if inset[k]:
            e = np.zeros(dim)
            e[k] = 1.0
            hs.append(Halfspace(g - e, d[k] - offset, strict=True))
        else:
            e = np.zeros(dim)
            e[k] = 1.0
            hs.append(Halfspace(e - g, offset - d[k], strict=False))
    return g, offset, tuple(hs)


def halfspaces_feasible(halfspaces, box: Box) -> bool:
    """Interior-point feasibility of a halfspace system inside a box.

    Strict inequalities are shrunk by a small margin proportional to the box
    diameter; constraints with a (numerically) zero normal are decided as
    constants.
    """
    eps = STRICT_EPS_SCALE * max(box.diameter, 1.0)
    rows, rhs = [], []
    for h in halfspaces:
        margin = eps if h.strict else 0.0
        if np.max(np.abs(h.normal)) < ZERO_NORMAL_TOL:
            if h.bound + margin > 0:
                return False
            continue
        # normal . t >= bound + margin  <=>  -normal . t <= -(bound + margin)
        rows.append(-h.normal)
        rhs.append(-(h.bound + margin))
    if not rows:
        return True
    return feasible(np.array(rows), np.array(rhs), box.lo, box.hi)


def enumerate_regions(weights, delays, theta: float, box: Box) -> list[RegionDescriptor]:
    """All candidate regions (nonempty subsets with positive weight sum)."""
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    d = np.atleast_1d(np.asarray(delays, dtype=float))
    if w.shape != d.shape or w.ndim != 1:
        raise DimensionError("weights and delays must be equal-length vectors")
    if not theta > 0:
        raise InvalidParameterError("threshold must be positive")
    if w.size > MAX_ENUM_DIM:
        raise InvalidParameterError(f"subset enumeration limited to d <= {MAX_ENUM_DIM}")
    if box.dim != w.size:
        raise DimensionError("box dimension must match the number of inputs")
    out = []
    for r in range(1, w.size + 1):
        for subset in combinations(range(w.size), r):
            built = _region_for_subset(subset, w, d, theta)
            if built is None:
                continue
            g, offset, hs = built
            out.append(
                RegionDescriptor(
                    subset=frozenset(subset),
                    gradient=g,
                    offset=offset,
                    halfspaces=hs,
                    feasible_in_box=halfspaces_feasible(hs, box),
                )
            )
    return out


def count_feasible(descriptors, box: Box) -> int:
    """Number of descriptors whose region meets the interior of the box."""
    return sum(1 for r in descriptors if halfspaces_feasible(r.halfspaces, box))


def stabilized_region_count(weights, delays, theta: float, max_doublings: int = 40) -> int:
    """Feasible-region count over a box grown until the count stops changing.

    Starts from a unit box around the delays and doubles its radius until
    the count is identical across two consecutive doublings, which
    operationalizes counting over a sufficiently large domain.
    """
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    d = np.atleast_1d(np.asarray(delays, dtype=float))
    center = float(np.mean(d)) if d.size else 0.0
    radius = max(1.0, float(np.max(np.abs(d - center), initial=0.0)))
    descriptors = None
    prev = prev2 = -1
    for _ in range(max_doublings):
        box = Box.cube(center - radius, center + radius, w.size)
        if descriptors is None:
            descriptors = enumerate_regions(w, d, theta, box)
        cnt = count_feasible(descriptors, box)
        if cnt == prev == prev2:
            return cnt
        prev2, prev = prev, cnt
        radius *= 2.0
    return prev


@dataclass(frozen=True)
class EmpiricalRegionCount:
    """Result of the grid oracle: affine-piece count and no-fire cells."""

    count: int
    no_fire_points: int


def empirical_region_count(
    net: SpikingNetwork, box: Box, grid_n: int
) -> EmpiricalRegionCount:
    """Count distinct affine pieces of the firing-time map on a grid.

    Evaluates the (single-output) network on a regular grid of input spike
    times, estimates the gradient at each point by central differences, and
    keeps only points whose neighbors are affine-consistent with that
    gradient, discarding points whose stencil straddles a region boundary.
    The surviving (gradient, offset) pairs are clustered and counted.
    Points where the output never fires are tallied separately.
    """
    if net.output_dim != 1:
        raise DimensionError("empirical count needs a single-output network")
    if box.dim != net.input_dim:
        raise DimensionError("box dimension must match the network input")
    if grid_n < 2:
        raise InvalidParameterError("grid_n must be at least 2")
    if grid_n**box.dim > 1e7:
        raise InvalidParameterError("grid too large")
    dim = box.dim
    pts = box.grid(grid_n)
    h = 0.25 * (box.hi - box.lo) / (grid_n - 1)
    if np.any(h <= 0):
        raise InvalidParameterError("box must have positive extent on every axis")

    stencil = [pts]
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = h[i]
        stencil.extend([pts + e, pts - e])
    allpts = np.vstack(stencil)
    aux = np.broadcast_to(
        np.asarray(net.aux_input_times), (allpts.shape[0], net.n_aux)
    )
    vals = network_forward_batch(net, np.hstack([allpts, aux]))[:, 0]
    n = pts.shape[0]
    f0 = vals[:n]
    fplus = np.stack([vals[(2 * i + 1) * n : (2 * i + 2) * n] for i in range(dim)], axis=1)
    fminus = np.stack([vals[(2 * i + 2) * n : (2 * i + 3) * n] for i in range(dim)], axis=1)

    no_fire = int(np.sum(np.isnan(f0)))
    ok = ~np.isnan(f0) & ~np.isnan(fplus).any(axis=1) & ~np.isnan(fminus).any(axis=1)
    grad = (fplus - fminus) / (2.0 * h)
    # Keep points whose one-sided steps match the central gradient: that
    # holds exactly when the whole stencil lies in one affine piece.
    resid = np.abs(fplus - f0[:, None] - grad * h)
    # The acceptance threshold keeps any straddler that slips through from
    # perturbing the estimated gradient by more than a twentieth of the
    # clustering tolerance, while staying far above double-precision noise.
    atol = np.maximum(0.05 * CLUSTER_TOL * h, 1e-12 * np.maximum(1.0, np.abs(f0[:, None])))
    ok &= np.all(resid < atol, axis=1)
    if not np.any(ok):
        return EmpiricalRegionCount(0, no_fire)
    grad = grad[ok]
    offset = f0[ok] - np.einsum("ij,ij->i", grad, pts[ok])
    sig = np.hstack([grad, offset[:, None]])

    # Two-stage clustering: coarse dedup by rounding, then greedy merge of
    # the survivors at the clustering tolerance.
    reps = np.unique(np.round(sig / (0.01 * CLUSTER_TOL)), axis=0) * (0.01 * CLUSTER_TOL)
    clusters: list[np.ndarray] = []
    for row in reps:
        if not any(np.max(np.abs(row - c)) <= CLUSTER_TOL for c in clusters):
            clusters.append(row)
    return EmpiricalRegionCount(len(clusters), no_fire)
