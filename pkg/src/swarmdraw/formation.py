"""Drawing hulls, epsilon-grid states, detection, validity, and moves.

A drawing hull is a wedge (anchor, unit direction, span, diameter) whose
robots encode a counter value by their placement on an epsilon grid:

* robot 1 sits on the anchor,
* robot 2 sits at distance epsilon along the direction,
* robot 3 sits collinearly at distance 2*i*epsilon beyond robot 2 (i >= 1),
* all further robots occupy grid cells a + (1+2i)*eps*d + 2j*eps*d_perp.

States are finite point sets, enumerated canonically so that every occupied
set has exactly one index: blocks ordered by the smallest occupied axis cell
beyond robot 2, subsets within a block in colexicographic order.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .geometry import TAU_GEOM, as_points, perp, rotation_matrix, unit

# Hard cap on the grid resolution; beyond this the state machinery would be
# astronomically large and something upstream chose parameters badly.
MAX_RATIO = 1e5

_GRID_CACHE: dict[tuple, "GridSpec"] = {}


class FormationError(ValueError):
    """Raised for invalid hull/state parameters."""


@dataclass(frozen=True)
class DrawingHull:
    """Wedge container: all x with dist(x, anchor) <= diameter and
    angle(direction, x - anchor) in [0, span)."""

    anchor: np.ndarray
    direction: np.ndarray
    span: float
    diameter: float

    def __post_init__(self):
        a = np.asarray(self.anchor, dtype=float)
        d = np.asarray(self.direction, dtype=float)
        if abs(float(np.hypot(d[0], d[1])) - 1.0) > 1e-7:
            raise FormationError("hull direction must be a unit vector")
        if not 0.0 < self.span <= math.pi / 3 + 1e-12:
            raise FormationError("hull span must lie in (0, pi/3]")
        if not 0.0 < self.diameter <= 1.0 + 1e-12:
            raise FormationError("hull diameter must lie in (0, 1]")
        object.__setattr__(self, "anchor", a)
        object.__setattr__(self, "direction", d / np.hypot(d[0], d[1]))

    def local(self, points) -> np.ndarray:
        """Coordinates relative to the anchor, x along direction."""
        pts = as_points(points)
        d = self.direction
        basis = np.stack([d, perp(d)], axis=1)
        return (pts - self.anchor) @ basis

    def to_global(self, local_points) -> np.ndarray:
        pts = as_points(local_points)
        d = self.direction
        basis = np.stack([d, perp(d)], axis=0)
        return pts @ basis + self.anchor

    def contains(self, points, tol: float = TAU_GEOM) -> np.ndarray:
        """Boolean mask of points inside the wedge, padded by tol."""
        loc = self.local(points)
        x, y = loc[:, 0], loc[:, 1]
        r = np.hypot(x, y)
        lateral = _lateral_distance(x, y, self.span)
        return (r <= self.diameter + tol) & (lateral <= tol)


def _lateral_distance(x, y, span) -> np.ndarray:
    """Distance to the wedge's angular sector (0 when inside [0, span))."""
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    inside = (theta >= 0.0) & (theta < span)
    # Distance to the boundary rays at angles 0 and span.
    d0 = np.where(x >= 0.0, np.abs(y), r)
    cs, sn = math.cos(span), math.sin(span)
    xs = x * cs + y * sn
    ys = -x * sn + y * cs
    d1 = np.where(xs >= 0.0, np.abs(ys), r)
    out = np.minimum(d0, d1)
    out[inside | (r <= TAU_GEOM)] = 0.0
    return out


@dataclass(frozen=True)
class FormationParams:
    epsilon: float
    delta_diam: float
    span: float
    tol: float = TAU_GEOM

    def __post_init__(self):
        if not 0.0 < self.epsilon < self.delta_diam:
            raise FormationError("need 0 < epsilon < diameter")
        if self.delta_diam > 1.0 / 6 + 1e-12:
            raise FormationError("formation diameter must be <= 1/6")
        if not 0.0 < self.span <= math.pi / 3 + 1e-12:
            raise FormationError("span must lie in (0, pi/3]")

    def grid(self) -> GridSpec:
        return grid_spec(self.delta_diam, self.epsilon, self.span)


# --- grid geometry -----------------------------------------------------------
#
# Cell ids: 0 is the anchor; grid cells (i, j) are numbered column-major,
# i ascending then j ascending, starting at id 1.  Cell (0, 0) (id 1) is the
# second defining robot's slot; cells (i, 0) with i >= 1 are the axis slots
# admissible for the third defining robot.

@dataclass(frozen=True)
class GridSpec:
    delta: float
    epsilon: float
    span: float
    col_sizes: np.ndarray = field(compare=False)
    col_prefix: np.ndarray = field(compare=False)

    @property
    def i_max(self) -> int:
        return len(self.col_sizes) - 1

    @property
    def axis_count(self) -> int:
        """Number of admissible third-robot slots, floor((delta/eps - 1)/2)."""
        return self.i_max

    @property
    def locations(self) -> int:
        """|L|: anchor plus all grid cells inside the hull."""
        return 1 + int(self.col_sizes.sum())

    def cell_id(self, i: int, j: int) -> int:
        return 1 + int(self.col_prefix[i]) + j

    def axis_id(self, i: int) -> int:
        return 1 + int(self.col_prefix[i])

    def cell_of_id(self, cid: int) -> tuple[int, int]:
        if cid < 1 or cid >= self.locations:
            raise FormationError(f"cell id {cid} out of range")
        i = int(np.searchsorted(self.col_prefix, cid - 1, side="right")) - 1
        return i, cid - 1 - int(self.col_prefix[i])

    def cell_local(self, cid: int) -> np.ndarray:
        """Local coordinates of a cell id (0 = anchor)."""
        got = self._local_cache.get(cid)
        if got is None:
            if cid == 0:
                got = np.zeros(2)
            else:
                i, j = self.cell_of_id(cid)
                got = np.array([(1 + 2 * i) * self.epsilon, 2 * j * self.epsilon])
            self._local_cache[cid] = got
        return got


def grid_spec(delta: float, epsilon: float, span: float) -> GridSpec:
    key = (round(delta, 15), float(epsilon), round(span, 15))
    cached = _GRID_CACHE.get(key)
    if cached is not None:
        return cached

    ratio = (delta + TAU_GEOM) / epsilon
    if ratio > MAX_RATIO:
        raise FormationError(f"delta/epsilon ratio {ratio:.3g} exceeds {MAX_RATIO:.0e}")
    i_max = max(int((ratio - 1.0) // 2), -1)
    while (1 + 2 * (i_max + 1)) <= ratio:
        i_max += 1
    while i_max >= 0 and (1 + 2 * i_max) > ratio:
        i_max -= 1
    if i_max < 0:
        raise FormationError("hull too small for even the anchor pair")

    tan_span = math.tan(span)
    sizes = np.zeros(i_max + 1, dtype=np.int64)
    for i in range(i_max + 1):
        x = 1 + 2 * i
        jr = int(math.sqrt(max(ratio * ratio - x * x, 0.0)) // 2)
        ja = int(math.ceil(x * tan_span / 2.0)) - 1
        j = min(jr, max(ja, 0))
        while j >= 0 and not _cell_inside(x, j, ratio, span):
            j -= 1
        while _cell_inside(x, j + 1, ratio, span):
            j += 1
        sizes[i] = j + 1
    prefix = np.zeros(i_max + 1, dtype=np.int64)
    np.cumsum(sizes[:-1], out=prefix[1:])
    spec = GridSpec(delta, epsilon, span, sizes, prefix)
    object.__setattr__(spec, "_local_cache", {})
    _GRID_CACHE[key] = spec
    return spec


def _cell_inside(x: int, j: int, ratio: float, span: float) -> bool:
    if j < 0:
        return False
    if x * x + 4 * j * j > ratio * ratio:
        return False
    return math.atan2(2 * j, x) < span


def epsilon_locations(hull: DrawingHull, epsilon: float) -> np.ndarray:
    """Anchor plus all grid cells inside the hull, ordered by (i, j)."""
    if epsilon >= hull.diameter:
        raise FormationError("epsilon must be smaller than the hull diameter")
    grid = grid_spec(hull.diameter, epsilon, hull.span)
    if grid.locations > 1_000_000:
        raise FormationError("too many locations to materialize")
    local = [np.zeros(2)]
    for i in range(grid.i_max + 1):
        for j in range(int(grid.col_sizes[i])):
            local.append(np.array([(1 + 2 * i) * epsilon, 2 * j * epsilon]))
    return hull.to_global(np.stack(local))


# --- canonical state enumeration ---------------------------------------------

@dataclass(frozen=True)
class StateSpec:
    """One legal placement: the defining triple plus free grid cells.

    ``third`` is the axis column of the third defining robot; ``free`` holds
    the remaining occupied cell ids.  The representation is canonical: the
    third robot sits on the smallest occupied axis slot, so free cells never
    include an axis cell with a smaller column.
    """

    grid: GridSpec
    third: int
    free: tuple[int, ...] = ()

    def __post_init__(self):
        g = self.grid
        if not 1 <= self.third <= g.axis_count:
            raise FormationError(f"third-robot column {self.third} out of range")
        excluded = {0, 1, g.axis_id(self.third)}
        forbidden = {g.axis_id(t) for t in range(1, self.third)}
        seen = set()
        for c in self.free:
            if c in excluded or c in forbidden or not 1 <= c < g.locations or c in seen:
                raise FormationError(f"invalid free cell id {c}")
            seen.add(c)
        object.__setattr__(self, "free", tuple(sorted(self.free)))

    @property
    def size(self) -> int:
        return 3 + len(self.free)

    def cell_ids(self) -> list[int]:
        return sorted([0, 1, self.grid.axis_id(self.third), *self.free])

    def points(self, hull: DrawingHull) -> np.ndarray:
        local = np.stack([self.grid.cell_local(c) for c in self.cell_ids()])
        return hull.to_global(local)


@lru_cache(maxsize=65536)
def count_states(grid: GridSpec, size: int):
    """|A^size|: number of distinct placements of ``size`` robots."""
    if size < 3:
        raise FormationError("a drawing formation needs at least 3 robots")
    m = grid.axis_count
    if size == 3:
        return m
    k = grid.locations
    return sum(comb(k - 2 - i, size - 3) for i in range(1, m + 1))


def _available_rank(grid: GridSpec, block: int, cid: int) -> int:
    """Rank of a cell id within the block's available universe."""
    axis = [grid.axis_id(t) for t in range(1, block + 1)]
    return (cid - 2) - bisect_left(axis, cid)


def _available_id(grid: GridSpec, block: int, rank: int) -> int:
    axis = [grid.axis_id(t) for t in range(1, block + 1)]
    cid = rank + 2
    while True:
        skipped = bisect_left(axis, cid + 1)
        cand = rank + 2 + skipped
        if cand == cid:
            return cid
        cid = cand


def _colex_rank(ranks: list[int]) -> int:
    return sum(comb(r, t + 1) for t, r in enumerate(sorted(ranks)))


def _colex_unrank(x: int, m: int) -> list[int]:
    out = []
    for t in range(m, 0, -1):
        r = t - 1
        while comb(r + 1, t) <= x:
            r += 1
        out.append(r)
        x -= comb(r, t)
    return sorted(out)


@lru_cache(maxsize=65536)
def state_by_index(grid: GridSpec, size: int, index: int) -> StateSpec:
    """Inverse of index_of_state: the index-th state (1-based) of the given size."""
    total = count_states(grid, size)
    if not 1 <= index <= total:
        raise FormationError(f"state index {index} out of range 1..{total}")
    if size == 3:
        return StateSpec(grid, index)
    k = grid.locations
    x = index - 1
    for block in range(1, grid.axis_count + 1):
        here = comb(k - 2 - block, size - 3)
        if x < here:
            ranks = _colex_unrank(x, size - 3)
            free = tuple(_available_id(grid, block, r) for r in ranks)
            return StateSpec(grid, block, free)
        x -= here
    raise AssertionError("unreachable")


def index_of_state(spec: StateSpec) -> int:
    grid = spec.grid
    size = spec.size
    if size == 3:
        return spec.third
    k = grid.locations
    prefix = sum(comb(k - 2 - i, size - 3) for i in range(1, spec.third))
    ranks = [_available_rank(grid, spec.third, c) for c in spec.free]
    return prefix + _colex_rank(ranks) + 1


def state_from_cells(grid: GridSpec, cell_ids) -> StateSpec:
    """Canonical StateSpec for an occupied cell-id set (or raise)."""
    ids = sorted(set(int(c) for c in cell_ids))
    if len(ids) != len(list(cell_ids)):
        raise FormationError("duplicate occupied cells")
    if 0 not in ids or 1 not in ids:
        raise FormationError("anchor and its epsilon partner must be occupied")
    axis_ids = {grid.axis_id(i): i for i in range(1, grid.axis_count + 1)}
    axis_present = sorted(axis_ids[c] for c in ids if c in axis_ids)
    if not axis_present:
        raise FormationError("no admissible third defining robot")
    third = axis_present[0]
    free = tuple(c for c in ids if c not in (0, 1, grid.axis_id(third)))
    return StateSpec(grid, third, free)


# --- detection ----------------------------------------------------------------

@dataclass(frozen=True)
class DetectedFormation:
    hull: DrawingHull
    member_indices: tuple[int, ...]
    members: np.ndarray
    spec: StateSpec
    state_index: int

    @property
    def size(self) -> int:
        return len(self.member_indices)


def detect_formations(points, params: FormationParams) -> list[DetectedFormation]:
    """All epsilon-granular drawing formations present in a point set.

    Seeks pairs at distance epsilon, a collinear third robot beyond the
    second (which disambiguates anchor from partner), reconstructs the hull,
    and keeps the candidate only if every robot inside the hull realizes a
    legal grid state.
    """
    pts = as_points(points)
    n = len(pts)
    if n < 3:
        return []
    eps, tol = params.epsilon, params.tol
    grid = params.grid()

    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=2))
    pair_i, pair_j = np.nonzero(np.triu(np.abs(d - eps) <= tol, k=1))

    found: dict[tuple, DetectedFormation] = {}
    for a, b in zip(pair_i, pair_j):
        for p_idx, q_idx in ((int(a), int(b)), (int(b), int(a))):
            det = _try_candidate(pts, p_idx, q_idx, params, grid)
            if det is not None:
                key = (round(det.hull.anchor[0], 8), round(det.hull.anchor[1], 8),
                       round(det.hull.direction[0], 8), round(det.hull.direction[1], 8))
                found.setdefault(key, det)
    return [found[k] for k in sorted(found)]


def _try_candidate(pts, p_idx, q_idx, params, grid) -> DetectedFormation | None:
    eps, tol = params.epsilon, params.tol
    p, q = pts[p_idx], pts[q_idx]
    d_vec = unit(q - p)
    hull = DrawingHull(p, d_vec, params.span, params.delta_diam)
    loc = hull.local(pts)
    x, y = loc[:, 0], loc[:, 1]

    # Third defining robot: collinear beyond q at distance 2*i*eps, i >= 1.
    cols = np.abs(y) <= tol
    beyond = (x >= 3 * eps - tol) & (x <= params.delta_diam + tol)
    ok = cols & beyond
    ok[p_idx] = ok[q_idx] = False
    has_third = False
    for s in np.nonzero(ok)[0]:
        i = round((x[s] / eps - 1.0) / 2.0)
        if i >= 1 and abs(x[s] - (1 + 2 * i) * eps) <= tol:
            has_third = True
            break
    if not has_third:
        return None

    r = np.hypot(x, y)
    lateral = _lateral_distance(x, y, params.span)
    member_idx = np.nonzero((r <= params.delta_diam + tol) & (lateral <= tol))[0]
    if len(member_idx) < 3:
        return None

    cell_ids = _snap_cells(grid, x[member_idx], y[member_idx], eps, tol)
    if cell_ids is None or len(set(cell_ids)) != len(cell_ids):
        return None
    try:
        spec = state_from_cells(grid, cell_ids)
    except FormationError:
        return None
    return DetectedFormation(
        hull=hull,
        member_indices=tuple(int(m) for m in member_idx),
        members=pts[member_idx],
        spec=spec,
        state_index=index_of_state(spec),
    )


def _snap_cells(grid: GridSpec, xs, ys, eps: float, tol: float) -> list[int] | None:
    """Cell ids of points on the grid (None if any point is off-grid)."""
    anchor = np.hypot(xs, ys) <= tol
    i = np.rint((xs / eps - 1.0) / 2.0).astype(np.int64)
    j = np.rint(ys / (2.0 * eps)).astype(np.int64)
    ok = (i >= 0) & (j >= 0) & (i <= grid.i_max)
    ok &= j < grid.col_sizes[np.clip(i, 0, grid.i_max)]
    ok &= np.hypot(xs - (1 + 2 * i) * eps, ys - 2 * j * eps) <= tol
    if not np.all(ok | anchor):
        return None
    ids = 1 + grid.col_prefix[np.clip(i, 0, grid.i_max)] + j
    ids[anchor] = 0
    return [int(c) for c in ids]


# --- validity ------------------------------------------------------------------

@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    overlaps: tuple[tuple[int, int], ...]
    formations: tuple[DetectedFormation, ...]


def check_validity(points, params: FormationParams) -> ValidityReport:
    """A configuration is valid when all detected hulls are pairwise disjoint."""
    formations = detect_formations(points, params)
    polys = [wedge_polygon(f.hull) for f in formations]
    overlaps = []
    for i in range(len(formations)):
        for j in range(i + 1, len(formations)):
            a, b = formations[i].hull.anchor, formations[j].hull.anchor
            if np.hypot(*(a - b)) > 2 * params.delta_diam + TAU_GEOM:
                continue
            if _convex_overlap(polys[i], polys[j]):
                overlaps.append((i, j))
    return ValidityReport(not overlaps, tuple(overlaps), tuple(formations))


def wedge_polygon(hull: DrawingHull, segments: int = 48) -> np.ndarray:
    """Convex polygon circumscribing the wedge (arc slightly padded outward)."""
    step = hull.span / segments
    radius = hull.diameter / math.cos(step / 2.0)
    angles = np.linspace(0.0, hull.span, segments + 1)
    arc = np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=1)
    local = np.vstack([[0.0, 0.0], arc])
    return hull.to_global(local)


def _convex_overlap(pa: np.ndarray, pb: np.ndarray) -> bool:
    """Separating-axis test for two convex polygons (touching counts as overlap)."""
    for poly in (pa, pb):
        edges = np.roll(poly, -1, axis=0) - poly
        normals = np.stack([-edges[:, 1], edges[:, 0]], axis=1)
        for nrm in normals:
            a0, a1 = (pa @ nrm).min(), (pa @ nrm).max()
            b0, b1 = (pb @ nrm).min(), (pb @ nrm).max()
            if a1 < b0 - 1e-12 or b1 < a0 - 1e-12:
                return False
    return True


# --- coordinated movement -------------------------------------------------------

def _quantize(coords: np.ndarray) -> np.ndarray:
    """Snap coordinates to the tolerance grid so sort order is frame-stable."""
    return np.round(coords / TAU_GEOM) * TAU_GEOM


def plan_move(detected: DetectedFormation, move_vec, drop_points, next_spec: StateSpec) -> np.ndarray:
    """Per-robot targets realizing a formation move.

    The surviving robots form ``next_spec`` around the anchor shifted by
    ``move_vec`` (same direction); dropped robots land on ``drop_points``.
    Robots are matched to targets by sorting both lexicographically in the
    current hull frame, which keeps every displacement within
    diameter + |move_vec| <= 1.
    """
    hull = detected.hull
    move_vec = np.asarray(move_vec, dtype=float)
    if np.hypot(*move_vec) > 1.0 - hull.diameter + TAU_GEOM:
        raise FormationError("move longer than 1 - diameter")
    drops = np.asarray(drop_points, dtype=float).reshape(-1, 2)
    next_hull = DrawingHull(hull.anchor + move_vec, hull.direction, hull.span, hull.diameter)
    targets = np.vstack([next_spec.points(next_hull), drops])
    if len(targets) != detected.size:
        raise FormationError(
            f"{detected.size} robots cannot fill {len(targets)} targets")

    member_loc = _quantize(hull.local(detected.members))
    target_loc = _quantize(hull.local(targets))
    m_order = np.lexsort((member_loc[:, 1], member_loc[:, 0]))
    t_order = np.lexsort((target_loc[:, 1], target_loc[:, 0]))
    out = np.empty_like(detected.members)
    out[m_order] = targets[t_order]
    disp = np.hypot(*(out - detected.members).T)
    if np.any(disp > 1.0 + TAU_GEOM):
        raise AssertionError("planned displacement exceeds the viewing range")
    return out
