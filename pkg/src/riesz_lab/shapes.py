"""Shape catalogue: compact curves, surfaces, and bodies with exact measures,
diameters, curvature data, and unit-cube sampling charts.

Every shape exposes one or more *charts* per stratum. A chart is a map from
the unit cube [0,1)^k onto a component of the stratum together with the
Jacobian density d(measure)/du, so both plain Monte Carlo and jittered-grid
stratification draw through the same code path. Point weights returned by
:func:`sample` always sum to the stratum measure in expectation (exactly so
for charts with constant density).

Conventions. Normals point out of the enclosed region (curves in the plane,
boundary spheres, tori). Principal curvatures are the eigenvalues of the
shape operator taken against the outward normal with the sign chosen so a
round sphere of radius r has both curvatures equal to +1/r; they are returned
in decreasing order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ball_volume, sphere_volume
from .regions import Region

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ShapePoint:
    """One sampled point: position, quadrature weight, outward normal if the
    stratum has codimension one (None otherwise)."""

    position: np.ndarray
    weight: float
    normal: np.ndarray | None = None


class SampleBatch:
    """Column-oriented batch of sample points."""

    def __init__(self, positions, weights, normals=None):
        self.positions = np.ascontiguousarray(positions, dtype=float)
        self.weights = np.ascontiguousarray(weights, dtype=float)
        self.normals = (
            None if normals is None else np.ascontiguousarray(normals, dtype=float)
        )

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i: int) -> ShapePoint:
        return ShapePoint(
            self.positions[i],
            float(self.weights[i]),
            None if self.normals is None else self.normals[i],
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def weight_sum(self) -> float:
        return float(self.weights.sum())


@dataclass
class Chart:
    """Unit-cube parametrization of one component of a stratum.

    ``fn(U)`` maps an (n, k) array of unit-cube points to a tuple
    ``(positions, densities, normals_or_None)``.
    """

    k: int
    measure: float
    fn: object
    uniform: bool = False  # True when the density is constant


class Shape:
    """Base class; concrete shapes fill in the geometry."""

    kind: str = "shape"
    ambient_dim: int = 0
    intrinsic_dim: int = 0
    smoothness_class: int = 6  # declared C^k regularity used for fit orders
    is_body: bool = False
    convex: bool = False

    def volume(self) -> float:
        raise NotImplementedError

    def boundary_volume(self) -> float | None:
        return None

    def diameter(self) -> float:
        raise NotImplementedError

    def bounding_radius(self) -> float:
        raise NotImplementedError

    def strata(self) -> tuple[str, ...]:
        return ("interior", "boundary") if self.is_body else ("manifold",)

    def default_stratum(self) -> str:
        return "interior" if self.is_body else "manifold"

    def charts(self, stratum: str) -> list[Chart]:
        raise NotImplementedError

    @property
    def n_components(self) -> int:
        return 1

    def stratum_measure(self, stratum: str) -> float:
        if self.is_body:
            if stratum == "interior":
                return self.volume()
            if stratum == "boundary":
                vol = self.boundary_volume()
                assert vol is not None
                return vol
            raise ValueError(f"unknown stratum {stratum!r}")
        if stratum != "manifold":
            raise ValueError(f"shape {self.kind!r} has no stratum {stratum!r}")
        return self.volume()

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.to_dict()}>"


def _check_positive(**kv: float) -> None:
    for name, value in kv.items():
        if not (value > 0.0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive and finite, got {value}")


class Circle(Shape):
    kind = "circle"
    ambient_dim = 2
    intrinsic_dim = 1
    convex = True

    def __init__(self, r: float = 1.0, center=(0.0, 0.0)):
        _check_positive(r=r)
        self.r = float(r)
        self.center = np.asarray(center, dtype=float)
        if self.center.shape != (2,):
            raise ValueError("circle center must be a 2-vector")

    def volume(self) -> float:
        return TWO_PI * self.r

    def diameter(self) -> float:
        return 2.0 * self.r

    def bounding_radius(self) -> float:
        return float(np.hypot(*self.center)) + self.r

    def charts(self, stratum: str = "manifold") -> list[Chart]:
        self.stratum_measure(stratum)

        def fn(u):
            th = TWO_PI * u[:, 0]
            nrm = np.column_stack([np.cos(th), np.sin(th)])
            pos = self.center + self.r * nrm
            dens = np.full(len(u), TWO_PI * self.r)
            return pos, dens, nrm

        return [Chart(1, self.volume(), fn, uniform=True)]

    def curve_jet(self, th: np.ndarray):
        c, s = np.cos(th), np.sin(th)
        pos = self.center + self.r * np.column_stack([c, s])
        vel = self.r * np.column_stack([-s, c])
        acc = self.r * np.column_stack([-c, -s])
        return pos, vel, acc

    def to_dict(self) -> dict:
        return {"kind": "circle", "params": {"r": self.r, "center": self.center.tolist()}}


class Ellipse(Shape):
    kind = "ellipse"
    ambient_dim = 2
    intrinsic_dim = 1
    convex = True

    def __init__(self, a: float, b: float, center=(0.0, 0.0)):
        _check_positive(a=a, b=b)
        self.a, self.b = float(a), float(b)
        self.center = np.asarray(center, dtype=float)
        if self.center.shape != (2,):
            raise ValueError("ellipse center must be a 2-vector")

    def volume(self) -> float:
        from scipy.special import ellipe

        a, b = max(self.a, self.b), min(self.a, self.b)
        return 4.0 * a * float(ellipe(1.0 - (b / a) ** 2))

    def diameter(self) -> float:
        return 2.0 * max(self.a, self.b)

    def bounding_radius(self) -> float:
        return float(np.hypot(*self.center)) + max(self.a, self.b)

    def charts(self, stratum: str = "manifold") -> list[Chart]:
        self.stratum_measure(stratum)
        a, b = self.a, self.b

        def fn(u):
            th = TWO_PI * u[:, 0]
            c, s = np.cos(th), np.sin(th)
            pos = self.center + np.column_stack([a * c, b * s])
            speed = np.hypot(a * s, b * c)
            nrm = np.column_stack([b * c, a * s])
            nrm /= np.linalg.norm(nrm, axis=1)[:, None]
            return pos, TWO_PI * speed, nrm

        return [Chart(1, self.volume(), fn)]

    def curve_jet(self, th: np.ndarray):
        c, s = np.cos(th), np.sin(th)
        pos = self.center + np.column_stack([self.a * c, self.b * s])
        vel = np.column_stack([-self.a * s, self.b * c])
        acc = np.column_stack([-self.a * c, -self.b * s])
        return pos, vel, acc

    def to_dict(self) -> dict:
        return {
            "kind": "ellipse",
            "params": {"a": self.a, "b": self.b, "center": self.center.tolist()},
        }


class Sphere(Shape):
    kind = "sphere"
    ambient_dim = 3
    intrinsic_dim = 2
    convex = True

    def __init__(self, r: float = 1.0, center=(0.0, 0.0, 0.0)):
        _check_positive(r=r)
        self.r = float(r)
        self.center = np.asarray(center, dtype=float)
        if self.center.shape != (3,):
            raise ValueError("sphere center must be a 3-vector")

    def volume(self) -> float:
        return sphere_volume(2) * self.r**2

    def diameter(self) -> float:
        return 2.0 * self.r

    def bounding_radius(self) -> float:
        return float(np.linalg.norm(self.center)) + self.r

    def charts(self, stratum: str = "manifold") -> list[Chart]:
        self.stratum_measure(stratum)

        def fn(u):
            z = 2.0 * u[:, 0] - 1.0
            th = TWO_PI * u[:, 1]
            rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            nrm = np.column_stack([rho * np.cos(th), rho * np.sin(th), z])
            pos = self.center + self.r * nrm
            dens = np.full(len(u), self.volume())
            return pos, dens, nrm

        return [Chart(2, self.volume(), fn, uniform=True)]

    def surface_jet(self, uv: np.ndarray):
        """Jet of the (azimuth, latitude) parametrization; uv in radians."""
        th, ph = uv[:, 0], uv[:, 1]
        ct, st = np.cos(th), np.sin(th)
        cp, sp = np.cos(ph), np.sin(ph)
        r = self.r
        nrm = np.column_stack([cp * ct, cp * st, sp])
        pos = self.center + r * nrm
        xu = r * np.column_stack([-cp * st, cp * ct, np.zeros_like(th)])
        xv = r * np.column_stack([-sp * ct, -sp * st, cp])
        xuu = r * np.column_stack([-cp * ct, -cp * st, np.zeros_like(th)])
        xuv = r * np.column_stack([sp * st, -sp * ct, np.zeros_like(th)])
        xvv = -r * nrm
        return pos, xu, xv, xuu, xuv, xvv, nrm

    def to_dict(self) -> dict:
        return {"kind": "sphere", "params": {"r": self.r, "center": self.center.tolist()}}


class Torus(Shape):
    """Torus of revolution about the z axis: center-circle radius R, tube
    radius a, with R > a."""

    kind = "torus"
    ambient_dim = 3
    intrinsic_dim = 2

    def __init__(self, R: float = 2.0, a: float = 1.0):
        _check_positive(R=R, a=a)
        if R <= a:
            raise ValueError("torus needs R > a")
        self.R, self.a = float(R), float(a)

    def volume(self) -> float:
        return (TWO_PI * self.R) * (TWO_PI * self.a)

    def diameter(self) -> float:
        return 2.0 * (self.R + self.a)

    def bounding_radius(self) -> float:
        return self.R + self.a

    def charts(self, stratum: str = "manifold") -> list[Chart]:
        self.stratum_measure(stratum)
        R, a = self.R, self.a

        def fn(u):
            th = TWO_PI * u[:, 0]
            ph = TWO_PI * u[:, 1]
            ct, st = np.cos(th), np.sin(th)
            cp, sp = np.cos(ph), np.sin(ph)
            ring = R + a * cp
            pos = np.column_stack([ring * ct, ring * st, a * sp])
            nrm = np.column_stack([cp * ct, cp * st, sp])
            dens = TWO_PI * TWO_PI * a * ring
            return pos, dens, nrm

        return [Chart(2, self.volume(), fn)]

    def surface_jet(self, uv: np.ndarray):
        th, ph = uv[:, 0], uv[:, 1]
        R, a = self.R, self.a
        ct, st = np.cos(th), np.sin(th)
        cp, sp = np.cos(ph), np.sin(ph)
        ring = R + a * cp
        zeros = np.zeros_like(th)
        pos = np.column_stack([ring * ct, ring * st, a * sp])
        xu = np.column_stack([-ring * st, ring * ct, zeros])
        xv = a * np.column_stack([-sp * ct, -sp * st, cp])
        xuu = np.column_stack([-ring * ct, -ring * st, zeros])
        xuv = a * np.column_stack([sp * st, -sp * ct, zeros])
        xvv = a * np.column_stack([-cp * ct, -cp * st, -sp])
        nrm = np.column_stack([cp * ct, cp * st, sp])
        return pos, xu, xv, xuu, xuv, xvv, nrm

    def to_dict(self) -> dict:
        return {"kind": "torus", "params": {"R": self.R, "a": self.a}}


class Ball(Shape):
    """Solid round ball in R^d, d in {2, 3}. The boundary stratum reuses the
    circle / sphere charts, so boundary normals are exact."""

    kind = "ball"
    is_body = True
    convex = True

    def __init__(self, d: int = 3, r: float = 1.0, center=None):
        if d not in (2, 3):
            raise ValueError("ball sampling is implemented for d in {2, 3}")
        _check_positive(r=r)
        self.d = int(d)
        self.r = float(r)
        self.center = (
            np.zeros(d) if center is None else np.asarray(center, dtype=float)
        )
        if self.center.shape != (d,):
            raise ValueError(f"ball center must be a {d}-vector")
        self.ambient_dim = self.d
        self.intrinsic_dim = self.d
        self._boundary = (
            Circle(r, self.center) if d == 2 else Sphere(r, self.center)
        )

    def volume(self) -> float:
        return ball_volume(self.d) * self.r**self.d

    def boundary_volume(self) -> float:
        return sphere_volume(self.d - 1) * self.r ** (self.d - 1)

    def diameter(self) -> float:
        return 2.0 * self.r

    def bounding_radius(self) -> float:
        return float(np.linalg.norm(self.center)) + self.r

    def charts(self, stratum: str) -> list[Chart]:
        if stratum == "boundary":
            return self._boundary.charts("manifold")
        self.stratum_measure(stratum)
        vol = self.volume()

        if self.d == 2:

            def fn(u):
                rho = self.r * np.sqrt(u[:, 0])
                th = TWO_PI * u[:, 1]
                pos = self.center + np.column_stack(
                    [rho * np.cos(th), rho * np.sin(th)]
                )
                return pos, np.full(len(u), vol), None

            return [Chart(2, vol, fn, uniform=True)]

        def fn(u):
            rho = self.r * np.cbrt(u[:, 0])
            z = 2.0 * u[:, 1] - 1.0
            th = TWO_PI * u[:, 2]
            s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            pos = self.center + np.column_stack(
                [rho * s * np.cos(th), rho * s * np.sin(th), rho * z]
            )
            return pos, np.full(len(u), vol), None

        return [Chart(3, vol, fn, uniform=True)]

    def to_dict(self) -> dict:
        return {
            "kind": "ball",
            "params": {"d": self.d, "r": self.r, "center": self.center.tolist()},
        }


class PlanarComposite(Shape):
    """Compact planar region built from polygon / annular-sector components.
    Supports interior sampling only; the boundary is merely piecewise smooth
    and none of the boundary machinery applies."""

    kind = "planar-composite"
    ambient_dim = 2
    intrinsic_dim = 2
    smoothness_class = 0
    is_body = True

    def __init__(self, region: Region):
        region.validate_disjoint()
        self.region = region

    def volume(self) -> float:
        return self.region.area

    def boundary_volume(self):
        return None

    def strata(self) -> tuple[str, ...]:
        return ("interior",)

    def diameter(self) -> float:
        return float(self._hull_extent())

    def _support_points(self) -> np.ndarray:
        pts = []
        for comp in self.region.components:
            if hasattr(comp, "vertices"):
                pts.append(comp.vertices)
            else:
                th = comp.start + comp.span * np.linspace(0.0, 1.0, 512)
                for rad in (comp.r0, comp.r1):
                    pts.append(
                        np.column_stack([rad * np.cos(th), rad * np.sin(th)])
                    )
        return np.vstack(pts)

    def _hull_extent(self) -> float:
        pts = self._support_points()
        d2 = 0.0
        for i in range(len(pts)):
            diff = pts[i + 1 :] - pts[i]
            if len(diff):
                d2 = max(d2, float(np.max(np.einsum("ij,ij->i", diff, diff))))
        return math.sqrt(d2)

    def bounding_radius(self) -> float:
        return self.region.bounding_radius()

    def charts(self, stratum: str = "interior") -> list[Chart]:
        if stratum != "interior":
            raise ValueError("planar composite supports interior sampling only")

        charts = []
        for comp in self.region.components:

            def fn(u, comp=comp):
                return comp.sample_map(u), np.full(len(u), comp.area), None

            charts.append(Chart(2, comp.area, fn, uniform=True))
        return charts

    def stratum_measure(self, stratum: str) -> float:
        if stratum != "interior":
            raise ValueError("planar composite supports interior sampling only")
        return self.volume()

    def default_stratum(self) -> str:
        return "interior"

    def to_dict(self) -> dict:
        return {"kind": "planar-composite", "region": self.region.to_dict()}


class TransformedShape(Shape):
    """Rigid image Q x + b of a base shape (Q orthogonal)."""

    def __init__(self, base: Shape, matrix=None, translation=None):
        d = base.ambient_dim
        self.base = base
        self.matrix = np.eye(d) if matrix is None else np.asarray(matrix, dtype=float)
        self.translation = (
            np.zeros(d) if translation is None else np.asarray(translation, dtype=float)
        )
        if self.matrix.shape != (d, d) or self.translation.shape != (d,):
            raise ValueError("transform dimensions do not match the base shape")
        if not np.allclose(self.matrix @ self.matrix.T, np.eye(d), atol=1e-10):
            raise ValueError("transform matrix must be orthogonal")
        self.kind = base.kind
        self.ambient_dim = d
        self.intrinsic_dim = base.intrinsic_dim
        self.smoothness_class = base.smoothness_class
        self.is_body = base.is_body
        self.convex = base.convex

    def volume(self) -> float:
        return self.base.volume()

    def boundary_volume(self):
        return self.base.boundary_volume()

    def diameter(self) -> float:
        return self.base.diameter()

    def bounding_radius(self) -> float:
        return float(np.linalg.norm(self.translation)) + self.base.bounding_radius()

    def strata(self):
        return self.base.strata()

    def default_stratum(self):
        return self.base.default_stratum()

    def stratum_measure(self, stratum: str) -> float:
        return self.base.stratum_measure(stratum)

    @property
    def n_components(self) -> int:
        return self.base.n_components

    def charts(self, stratum: str) -> list[Chart]:
        out = []
        for chart in self.base.charts(stratum):

            def fn(u, inner=chart.fn):
                pos, dens, nrm = inner(u)
                pos = pos @ self.matrix.T + self.translation
                if nrm is not None:
                    nrm = nrm @ self.matrix.T
                return pos, dens, nrm

            out.append(Chart(chart.k, chart.measure, fn, uniform=chart.uniform))
        return out

    def curve_jet(self, th: np.ndarray):
        pos, vel, acc = self.base.curve_jet(th)
        return (
            pos @ self.matrix.T + self.translation,
            vel @ self.matrix.T,
            acc @ self.matrix.T,
        )

    def surface_jet(self, uv: np.ndarray):
        parts = self.base.surface_jet(uv)
        pos = parts[0] @ self.matrix.T + self.translation
        rest = [p @ self.matrix.T for p in parts[1:]]
        return (pos, *rest)

    def to_dict(self) -> dict:
        return {
            "kind": "transformed",
            "base": self.base.to_dict(),
            "matrix": self.matrix.tolist(),
            "translation": self.translation.tolist(),
        }


class UnionShape(Shape):
    """Union of closed manifolds of equal dimension, disjoint up to measure
    zero (distinct spheres may intersect in a circle; that null set does not
    affect any of the measure-level machinery)."""

    kind = "union"

    def __init__(self, components: list[Shape]):
        if len(components) < 2:
            raise ValueError("union needs at least two components")
        m = components[0].intrinsic_dim
        d = components[0].ambient_dim
        for c in components:
            if c.is_body:
                raise ValueError("unions are supported for closed manifolds only")
            if (c.intrinsic_dim, c.ambient_dim) != (m, d):
                raise ValueError("union components must share dimensions")
        for i in range(len(components)):
            for j in range(i + 1, len(components)):
                if components[i].to_dict() == components[j].to_dict():
                    raise ValueError("union components must be distinct")
        self.components = list(components)
        self.ambient_dim = d
        self.intrinsic_dim = m
        self.smoothness_class = min(c.smoothness_class for c in components)

    def volume(self) -> float:
        return sum(c.volume() for c in self.components)

    def diameter(self) -> float:
        best = max(c.diameter() for c in self.components)
        centers, radii = [], []
        for c in self.components:
            base = c.base if isinstance(c, TransformedShape) else c
            if not isinstance(base, (Circle, Sphere)):
                raise NotImplementedError(
                    "exact union diameter needs circle or sphere components"
                )
            center = base.center
            if isinstance(c, TransformedShape):
                center = c.matrix @ center + c.translation
            centers.append(center)
            radii.append(base.r)
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                gap = float(np.linalg.norm(centers[i] - centers[j]))
                best = max(best, gap + radii[i] + radii[j])
        return best

    def bounding_radius(self) -> float:
        return max(c.bounding_radius() for c in self.components)

    @property
    def n_components(self) -> int:
        return len(self.components)

    def charts(self, stratum: str = "manifold") -> list[Chart]:
        out = []
        for c in self.components:
            out.extend(c.charts(stratum))
        return out

    def to_dict(self) -> dict:
        return {"kind": "union", "components": [c.to_dict() for c in self.components]}


# ---------------------------------------------------------------------------
# curvature helpers

def principal_curvatures(shape: Shape, uv: np.ndarray) -> np.ndarray:
    """Principal curvatures (kappa1 >= kappa2) at parameter points of a
    surface, computed from first and second fundamental forms."""
    if not hasattr(shape, "surface_jet"):
        raise ValueError(f"{shape.kind} has no curvature data")
    uv = np.atleast_2d(np.asarray(uv, dtype=float))
    _, xu, xv, xuu, xuv, xvv, nrm = shape.surface_jet(uv)
    E = np.einsum("ij,ij->i", xu, xu)
    F = np.einsum("ij,ij->i", xu, xv)
    G = np.einsum("ij,ij->i", xv, xv)
    # second fundamental form against the inward direction so that spheres
    # come out positive
    L = -np.einsum("ij,ij->i", xuu, nrm)
    M = -np.einsum("ij,ij->i", xuv, nrm)
    N = -np.einsum("ij,ij->i", xvv, nrm)
    det1 = E * G - F * F
    mean = (L * G - 2.0 * M * F + N * E) / (2.0 * det1)
    gauss = (L * N - M * M) / det1
    disc = np.sqrt(np.maximum(0.0, mean * mean - gauss))
    return np.column_stack([mean + disc, mean - disc])


def umbilic_defect_integral(shape: Shape, n_grid: int = 256) -> float:
    """Quadrature value of (pi/8) * integral of (kappa1 - kappa2)^2 over a
    closed surface, using the periodic trapezoid rule on the surface charts'
    natural (u, v) grid."""
    if isinstance(shape, UnionShape):
        return sum(umbilic_defect_integral(c, n_grid) for c in shape.components)
    if not hasattr(shape, "surface_jet"):
        raise ValueError(f"{shape.kind} has no curvature data")
    u = TWO_PI * (np.arange(n_grid) + 0.5) / n_grid
    if isinstance(shape, Sphere) or (
        isinstance(shape, TransformedShape) and isinstance(shape.base, Sphere)
    ):
        v = math.pi * (np.arange(n_grid) + 0.5) / n_grid - math.pi / 2.0
    else:
        v = TWO_PI * (np.arange(n_grid) + 0.5) / n_grid
    uu, vv = np.meshgrid(u, v, indexing="ij")
    uv = np.column_stack([uu.ravel(), vv.ravel()])
    _, xu, xv, *_ = shape.surface_jet(uv)
    E = np.einsum("ij,ij->i", xu, xu)
    F = np.einsum("ij,ij->i", xu, xv)
    G = np.einsum("ij,ij->i", xv, xv)
    area_el = np.sqrt(np.maximum(0.0, E * G - F * F))
    kap = principal_curvatures(shape, uv)
    cell = (u[1] - u[0]) * (v[1] - v[0])
    return math.pi / 8.0 * float(np.sum((kap[:, 0] - kap[:, 1]) ** 2 * area_el) * cell)


# ---------------------------------------------------------------------------
# construction, serialization, sampling

def make_standard(name: str, **params) -> Shape:
    """Build a catalogue shape by name.

    Names: circle, ellipse, sphere, torus, ball, disk, two_spheres.
    """
    name = name.lower()
    if name == "circle":
        return Circle(**params)
    if name == "ellipse":
        return Ellipse(**params)
    if name == "sphere":
        return Sphere(**params)
    if name == "torus":
        return Torus(**params)
    if name == "ball":
        return Ball(**params)
    if name == "disk":
        params.setdefault("d", 2)
        if params["d"] != 2:
            raise ValueError("disk means a 2-ball")
        return Ball(**params)
    if name == "two_spheres":
        return two_spheres(**params)
    raise ValueError(f"unknown shape name {name!r}")


def two_spheres(
    r1: float = 1.0 / math.sqrt(2.0),
    r2: float = 1.0 / math.sqrt(2.0),
    separation: float | None = None,
) -> UnionShape:
    """Union of two sphere surfaces with centers on the x axis.

    The default separation places both spheres inside the unit ball and
    tangent to it from inside, which makes the union's diameter exactly 2.
    With the default radii (r1 = r2 = 1/sqrt(2), so r1^2 + r2^2 = 1) the
    total area equals that of the unit sphere while the diameter matches it
    too; the surfaces then intersect in a circle, a measure-zero set.
    """
    _check_positive(r1=r1, r2=r2)
    if separation is None:
        separation = 2.0 - r1 - r2
        if separation <= 0.0:
            raise ValueError("default placement needs r1 + r2 < 2")
    c1 = np.array([-separation / 2.0, 0.0, 0.0])
    c2 = np.array([separation / 2.0, 0.0, 0.0])
    return UnionShape([Sphere(r1, c1), Sphere(r2, c2)])


def shape_from_dict(d: dict) -> Shape:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError("shape descriptor must be a dict with a 'kind' field")
    kind = d["kind"]
    params = d.get("params", {})
    if kind in ("circle", "ellipse", "sphere", "torus", "ball", "disk", "two_spheres"):
        return make_standard(kind, **params)
    if kind == "union":
        return UnionShape([shape_from_dict(c) for c in d["components"]])
    if kind == "transformed":
        return TransformedShape(
            shape_from_dict(d["base"]),
            matrix=d.get("matrix"),
            translation=d.get("translation"),
        )
    if kind == "planar-composite":
        return PlanarComposite(Region.from_dict(d["region"]))
    raise ValueError(f"unknown shape kind {kind!r}")


def load_shape(path: str) -> Shape:
    with open(path) as fh:
        return shape_from_dict(json.load(fh))


def exact_diameter(shape: Shape) -> float:
    return shape.diameter()


def _allocate(total: int, weights: np.ndarray) -> np.ndarray:
    """Largest-remainder allocation of ``total`` items proportional to
    ``weights``."""
    w = np.asarray(weights, dtype=float)
    share = total * w / w.sum()
    base = np.floor(share).astype(int)
    rem = total - int(base.sum())
    if rem > 0:
        order = np.argsort(-(share - base))
        base[order[:rem]] += 1
    return base


def _grid_sides(n: int, k: int) -> tuple[int, ...]:
    """Near-equal grid sides with product <= n (at least 1 each)."""
    sides = [max(1, int(math.floor(n ** (1.0 / k))))] * k
    improved = True
    while improved:
        improved = False
        for i in range(k):
            trial = sides.copy()
            trial[i] += 1
            if math.prod(trial) <= n:
                sides = trial
                improved = True
    return tuple(sides)


def _chart_points(chart: Chart, n: int, rng, mode: str):
    if mode == "random":
        u = rng.random((n, chart.k))
    elif mode == "stratified":
        sides = _grid_sides(n, chart.k)
        g = math.prod(sides)
        idx = np.unravel_index(np.arange(g), sides)
        u = np.empty((g, chart.k))
        for dim in range(chart.k):
            u[:, dim] = (idx[dim] + rng.random(g)) / sides[dim]
        if n > g:
            u = np.vstack([u, rng.random((n - g, chart.k))])
    else:
        raise ValueError(f"unknown sampling mode {mode!r}")
    pos, dens, nrm = chart.fn(u)
    dens = np.broadcast_to(np.asarray(dens, dtype=float), (len(u),))
    return pos, dens / len(u), nrm


def sample(
    shape: Shape,
    stratum: str | None = None,
    n: int = 1000,
    seed: int = 0,
    mode: str = "random",
) -> SampleBatch:
    """Draw ``n`` weighted points on a stratum of ``shape``.

    Weights sum to the stratum measure in expectation.  ``mode`` is either
    "random" (i.i.d.) or "stratified" (jittered grid per chart, padded with
    random points when n is not a grid product). Deterministic per seed.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    stratum = stratum or shape.default_stratum()
    charts = shape.charts(stratum)
    counts = _allocate(n, np.array([c.measure for c in charts]))
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(len(charts))
    pos_parts, w_parts, nrm_parts = [], [], []
    has_normals = True
    for chart, cnt, child in zip(charts, counts, children):
        if cnt == 0:
            continue
        rng = np.random.default_rng(child)
        pos, w, nrm = _chart_points(chart, int(cnt), rng, mode)
        pos_parts.append(pos)
        w_parts.append(w)
        if nrm is None:
            has_normals = False
        else:
            nrm_parts.append(nrm)
    positions = np.vstack(pos_parts)
    weights = np.concatenate(w_parts)
    normals = np.vstack(nrm_parts) if has_normals and nrm_parts else None
    return SampleBatch(positions, weights, normals)
