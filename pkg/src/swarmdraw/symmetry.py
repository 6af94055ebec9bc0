"""Pattern normalization, symmetricity, and cone decomposition.

A pattern is a finite set of distinct plane coordinates.  Its symmetricity is
the largest m such that the points partition into regular m-gons sharing the
center of the smallest enclosing circle; a pattern containing that center has
symmetricity 1.  Cones split the plane into equal angular sectors used to
carve a pattern into rotation-symmetric components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import (
    ANG_SNAP,
    TAU_GEOM,
    as_points,
    polar_angle,
    rotate,
    smallest_enclosing_circle,
)


@dataclass(frozen=True)
class Pattern:
    points: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        pts = as_points(self.points)
        if len(pts) >= 2:
            d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
            np.fill_diagonal(d, np.inf)
            if d.min() <= TAU_GEOM:
                raise ValueError("pattern points must be distinct")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class SymmetryInfo:
    sym: int
    orbit_partition: list[list[int]] = field(default_factory=list)


def normalize(pattern: Pattern | np.ndarray) -> Pattern:
    """Translate so the smallest enclosing circle is centered at the origin."""
    pts = pattern.points if isinstance(pattern, Pattern) else as_points(pattern)
    sec = smallest_enclosing_circle(pts)
    shifted = pts - np.asarray(sec.center)
    return Pattern(shifted, normalized=True)


def _require_normalized(pattern: Pattern) -> np.ndarray:
    pts = pattern.points if isinstance(pattern, Pattern) else as_points(pattern)
    sec = smallest_enclosing_circle(pts)
    if math.hypot(*sec.center) > 1e-7:
        raise ValueError("pattern must be normalized (SEC centered at origin)")
    return pts


def rotation_maps_onto(points: np.ndarray, theta: float, tol: float = TAU_GEOM) -> np.ndarray | None:
    """Permutation mapping each point onto the set after rotating by theta.

    Returns the index array perm with rotate(points[i]) == points[perm[i]]
    within tol, or None if the rotation is not a symmetry.
    """
    pts = as_points(points)
    rotated = rotate(pts, theta)
    tree = cKDTree(pts)
    dists, idx = tree.query(rotated, k=1)
    if np.any(dists > tol):
        return None
    if len(set(idx.tolist())) != len(pts):
        return None
    return idx


def _divisors(n: int) -> list[int]:
    out = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return sorted(out)


def symmetricity(pattern: Pattern | np.ndarray) -> SymmetryInfo:
    """Largest m admitting an m-regular partition, with its orbit partition."""
    pts = _require_normalized(pattern if isinstance(pattern, Pattern) else Pattern(as_points(pattern)))
    n = len(pts)
    radii = np.hypot(pts[:, 0], pts[:, 1])
    singletons = [[i] for i in range(n)]
    if n == 1 or np.any(radii <= TAU_GEOM):
        # The center is occupied: it can only ever be a 1-gon.
        return SymmetryInfo(1, singletons)

    # Candidate m values must divide every radius-class size, hence their gcd.
    order = np.argsort(radii)
    class_sizes = []
    size = 1
    for a, b in zip(order[:-1], order[1:]):
        if radii[b] - radii[a] <= TAU_GEOM:
            size += 1
        else:
            class_sizes.append(size)
            size = 1
    class_sizes.append(size)
    g = 0
    for s in class_sizes:
        g = math.gcd(g, s)

    for m in sorted((d for d in _divisors(g) if d > 1), reverse=True):
        perm = rotation_maps_onto(pts, 2.0 * math.pi / m)
        if perm is None:
            continue
        seen = np.zeros(n, dtype=bool)
        orbits = []
        for i in range(n):
            if seen[i]:
                continue
            orbit = [i]
            seen[i] = True
            j = int(perm[i])
            while j != i:
                orbit.append(j)
                seen[j] = True
                j = int(perm[j])
            orbits.append(orbit)
        assert all(len(o) == m for o in orbits)
        return SymmetryInfo(m, orbits)
    return SymmetryInfo(1, singletons)


def cone_index(p, s: int) -> int:
    """Index in {1..s} of the angular cone containing p.

    Cones are half-open sectors [ (i-1)*2pi/s, i*2pi/s ); a point lying
    exactly on a boundary ray belongs to the cone whose lower edge carries it.
    """
    p = np.asarray(p, dtype=float)
    if math.hypot(p[0], p[1]) <= TAU_GEOM:
        raise ValueError("cone_index is undefined at the origin")
    if s < 1:
        raise ValueError("s must be >= 1")
    w = 2.0 * math.pi / s
    theta = polar_angle(p)
    k = int(theta // w)
    # Snap onto a boundary ray when within ANG_SNAP of it.
    if (k + 1) * w - theta <= ANG_SNAP:
        k += 1
    elif theta - k * w <= ANG_SNAP:
        pass
    k %= s
    return k + 1


def component_indices(pattern: Pattern | np.ndarray, i: int, sym: int) -> np.ndarray:
    """Indices of the pattern points lying in the i-th cone."""
    pts = pattern.points if isinstance(pattern, Pattern) else as_points(pattern)
    if not 1 <= i <= sym:
        raise ValueError(f"component index {i} out of range 1..{sym}")
    return np.array([j for j, p in enumerate(pts) if cone_index(p, sym) == i], dtype=int)


def symmetric_component(pattern: Pattern | np.ndarray, i: int, sym: int | None = None) -> np.ndarray:
    """Points of the i-th symmetric component."""
    pts = pattern.points if isinstance(pattern, Pattern) else as_points(pattern)
    if sym is None:
        sym = symmetricity(Pattern(pts)).sym
    return pts[component_indices(pts, i, sym)]
