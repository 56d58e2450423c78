"""Exact planar region algebra for composite test bodies.

Two primitive component types are supported: convex polygons and annular
sectors centered at the origin. Both are closed under the rigid motions used
by the invariant-region construction (rotations about the origin and
reflections across lines through the origin), and intersection areas between
primitives of the same type are computed exactly, which lets symmetry
identities be verified to round-off rather than by sampling.

Polygon/sector mixed intersections are only resolved in the easy case where
the radial or angular footprints are disjoint (area 0); anything else raises,
because the construction below never needs it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


def _wrap(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    return t + TWO_PI if t < 0.0 else t


def rotation_matrix(beta: float) -> np.ndarray:
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, -s], [s, c]])


def reflection_matrix(alpha: float) -> np.ndarray:
    """Reflection across the line through the origin at angle alpha."""
    c, s = math.cos(2.0 * alpha), math.sin(2.0 * alpha)
    return np.array([[c, s], [s, -c]])


def _shoelace(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _segment_distance_to_origin(a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*a))
    s = -float(a @ ab) / denom
    s = min(1.0, max(0.0, s))
    p = a + s * ab
    return float(np.hypot(*p))


class ConvexPolygon:
    """Convex polygon, vertices stored counter-clockwise."""

    def __init__(self, vertices) -> None:
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("polygon needs at least 3 planar vertices")
        if _shoelace(v) < 0.0:
            v = v[::-1].copy()
        self.vertices = v
        self.area = _shoelace(v)
        if self.area <= 0.0:
            raise ValueError("degenerate polygon")

    @classmethod
    def rectangle(cls, x0, x1, y0, y1) -> "ConvexPolygon":
        return cls([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])

    def transformed(self, matrix: np.ndarray) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices @ np.asarray(matrix).T)

    def rotated(self, beta: float) -> "ConvexPolygon":
        return self.transformed(rotation_matrix(beta))

    def reflected(self, alpha: float) -> "ConvexPolygon":
        return self.transformed(reflection_matrix(alpha))

    def contains(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(pts)
        ok = np.ones(len(pts), dtype=bool)
        v = self.vertices
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
            ok &= cross >= -tol
        return ok

    def radial_interval(self) -> tuple[float, float]:
        v = self.vertices
        rmax = float(np.max(np.hypot(v[:, 0], v[:, 1])))
        if bool(self.contains(np.zeros((1, 2)))[0]):
            return 0.0, rmax
        rmin = min(
            _segment_distance_to_origin(v[i], v[(i + 1) % len(v)])
            for i in range(len(v))
        )
        return rmin, rmax

    def angular_interval(self) -> tuple[float, float] | None:
        """(start, span) of the cone from the origin covering the polygon,
        or None when the origin lies inside (full circle)."""
        if bool(self.contains(np.zeros((1, 2)))[0]):
            return None
        centroid = self.vertices.mean(axis=0)
        ref = math.atan2(centroid[1], centroid[0])
        rel = [
            (math.atan2(p[1], p[0]) - ref + math.pi) % TWO_PI - math.pi
            for p in self.vertices
        ]
        lo, hi = min(rel), max(rel)
        return _wrap(ref + lo), hi - lo

    def sample_map(self, u: np.ndarray) -> np.ndarray:
        """Area-uniform map from the unit square (fan triangulation)."""
        v = self.vertices
        tris = [(v[0], v[i], v[i + 1]) for i in range(1, len(v) - 1)]
        areas = np.array([_shoelace(np.array(t)) for t in tris])
        cum = np.cumsum(areas) / areas.sum()
        idx = np.searchsorted(cum, u[:, 0], side="right")
        idx = np.minimum(idx, len(tris) - 1)
        lo = np.concatenate([[0.0], cum[:-1]])
        s = (u[:, 0] - lo[idx]) / (cum[idx] - lo[idx])
        t = u[:, 1]
        a = np.array([tris[i][0] for i in idx])
        b = np.array([tris[i][1] for i in idx])
        c = np.array([tris[i][2] for i in idx])
        root = np.sqrt(s)[:, None]
        return (1.0 - root) * a + root * ((1.0 - t[:, None]) * b + t[:, None] * c)

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": self.vertices.tolist()}


class AnnularSector:
    """{(r, theta): r0 <= r <= r1, theta in [start, start + span]} at the origin."""

    def __init__(self, r0: float, r1: float, start: float, span: float) -> None:
        if not (0.0 <= r0 < r1):
            raise ValueError("need 0 <= r0 < r1")
        if not (0.0 < span <= TWO_PI):
            raise ValueError("span must lie in (0, 2*pi]")
        self.r0, self.r1 = float(r0), float(r1)
        self.start, self.span = _wrap(start), float(span)
        self.area = 0.5 * span * (r1 * r1 - r0 * r0)

    def rotated(self, beta: float) -> "AnnularSector":
        return AnnularSector(self.r0, self.r1, self.start + beta, self.span)

    def reflected(self, alpha: float) -> "AnnularSector":
        # theta -> 2*alpha - theta maps [start, start+span] to
        # [2*alpha - start - span, 2*alpha - start]
        return AnnularSector(self.r0, self.r1, 2.0 * alpha - self.start - self.span, self.span)

    def contains(self, pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(pts)
        r = np.hypot(pts[:, 0], pts[:, 1])
        ang = np.mod(np.arctan2(pts[:, 1], pts[:, 0]) - self.start, TWO_PI)
        return (
            (r >= self.r0 - tol)
            & (r <= self.r1 + tol)
            & (ang <= self.span + tol)
        )

    def radial_interval(self) -> tuple[float, float]:
        return self.r0, self.r1

    def angular_interval(self) -> tuple[float, float] | None:
        if self.span >= TWO_PI:
            return None
        return self.start, self.span

    def sample_map(self, u: np.ndarray) -> np.ndarray:
        r = np.sqrt(self.r0**2 + u[:, 0] * (self.r1**2 - self.r0**2))
        th = self.start + self.span * u[:, 1]
        return np.column_stack([r * np.cos(th), r * np.sin(th)])

    def to_dict(self) -> dict:
        return {
            "type": "annular_sector",
            "r0": self.r0,
            "r1": self.r1,
            "start": self.start,
            "span": self.span,
        }


def component_from_dict(d: dict):
    if d.get("type") == "polygon":
        return ConvexPolygon(d["vertices"])
    if d.get("type") == "annular_sector":
        return AnnularSector(d["r0"], d["r1"], d["start"], d["span"])
    raise ValueError(f"unknown region component type: {d.get('type')!r}")


def _arc_overlaps(a: tuple[float, float], b: tuple[float, float]) -> list[tuple[float, float]]:
    """Intersections of two circular arcs given as (start, span), as a list
    of (start, span) pieces."""
    a0, sa = a
    b0, sb = b
    out = []
    for k in (-1, 0, 1):
        lo = max(a0, b0 + k * TWO_PI)
        hi = min(a0 + sa, b0 + k * TWO_PI + sb)
        if hi - lo > 1e-15:
            out.append((lo, hi - lo))
    return out


def _clip_polygon(subject: np.ndarray, clip: np.ndarray) -> np.ndarray | None:
    """Sutherland-Hodgman clipping of convex ``subject`` by convex ``clip``."""
    out = [tuple(p) for p in subject]
    n = len(clip)
    for i in range(n):
        if not out:
            return None
        a, b = clip[i], clip[(i + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        pts = out
        out = []
        prev = pts[-1]
        prev_side = ex * (prev[1] - a[1]) - ey * (prev[0] - a[0])
        for cur in pts:
            cur_side = ex * (cur[1] - a[1]) - ey * (cur[0] - a[0])
            if cur_side >= 0.0:
                if prev_side < 0.0:
                    s = prev_side / (prev_side - cur_side)
                    out.append(
                        (prev[0] + s * (cur[0] - prev[0]), prev[1] + s * (cur[1] - prev[1]))
                    )
                out.append(cur)
            elif prev_side >= 0.0:
                s = prev_side / (prev_side - cur_side)
                out.append(
                    (prev[0] + s * (cur[0] - prev[0]), prev[1] + s * (cur[1] - prev[1]))
                )
            prev, prev_side = cur, cur_side
    if len(out) < 3:
        return None
    return np.array(out)


def _intervals_disjoint(a, b) -> bool:
    if a is None or b is None:
        return False
    return len(_arc_overlaps(a, b)) == 0


def intersection_area(p, q) -> float:
    """Exact area of the intersection of two primitive components."""
    if isinstance(p, ConvexPolygon) and isinstance(q, ConvexPolygon):
        clipped = _clip_polygon(p.vertices, q.vertices)
        return 0.0 if clipped is None else abs(_shoelace(clipped))
    if isinstance(p, AnnularSector) and isinstance(q, AnnularSector):
        r0, r1 = max(p.r0, q.r0), min(p.r1, q.r1)
        if r1 <= r0:
            return 0.0
        pieces = _arc_overlaps((p.start, p.span), (q.start, q.span))
        return 0.5 * (r1 * r1 - r0 * r0) * sum(s for _, s in pieces)
    # polygon vs sector: resolvable only when clearly separated
    if isinstance(p, AnnularSector):
        p, q = q, p
    pr = p.radial_interval()
    qr = q.radial_interval()
    if pr[0] > qr[1] - 1e-12 or qr[0] > pr[1] - 1e-12:
        return 0.0
    if _intervals_disjoint(p.angular_interval(), q.angular_interval()):
        return 0.0
    raise NotImplementedError(
        "polygon/sector intersection is only supported for separated components"
    )


@dataclass
class Region:
    """Finite union of primitive components, pairwise disjoint up to
    measure zero."""

    components: list

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("region needs at least one component")

    @property
    def area(self) -> float:
        return sum(c.area for c in self.components)

    def validate_disjoint(self, tol: float = 1e-9) -> None:
        n = len(self.components)
        for i in range(n):
            for j in range(i + 1, n):
                a = intersection_area(self.components[i], self.components[j])
                if a > tol:
                    raise ValueError(
                        f"components {i} and {j} overlap (area {a:.3g})"
                    )

    def intersection_area(self, other: "Region") -> float:
        return sum(
            intersection_area(p, q)
            for p in self.components
            for q in other.components
        )

    def symmetric_difference_area(self, other: "Region") -> float:
        return self.area + other.area - 2.0 * self.intersection_area(other)

    def rotated(self, beta: float) -> "Region":
        return Region([c.rotated(beta) for c in self.components])

    def reflected(self, alpha: float) -> "Region":
        return Region([c.reflected(alpha) for c in self.components])

    def union(self, other: "Region") -> "Region":
        return Region(list(self.components) + list(other.components))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        ok = np.zeros(len(pts), dtype=bool)
        for c in self.components:
            ok |= c.contains(pts)
        return ok

    def bounding_radius(self) -> float:
        return max(c.radial_interval()[1] for c in self.components)

    def to_dict(self) -> dict:
        return {"components": [c.to_dict() for c in self.components]}

    @classmethod
    def from_dict(cls, d: dict) -> "Region":
        return cls([component_from_dict(c) for c in d["components"]])
