"""Counterexample and bound-verification configurations.

Two families of constructions probe the limits of distance-distribution
shape identification. The reflection pair builds two visibly different
planar sets with identical interpoint distance distributions out of three
disjoint regions tied together by a pair of reflections: with I1 * I2
equal to the rotation R, replacing Omega_2 by R(Omega_2) permutes the pair
distances without changing their distribution. The two-sphere experiments
quantify the opposite phenomenon: the far tail of the distance
distribution separates a union of two spheres from the single sphere with
the same total area and diameter, because the pair measure near the
diameter is quadratically suppressed for the union but linear for the
sphere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from .pairkernel import pair_stream
from .regions import AnnularSector, ConvexPolygon, Region
from .shapes import PlanarComposite, Shape, UnionShape, two_spheres

__all__ = [
    "CaelliConfig",
    "CaelliValidation",
    "caelli_pair",
    "default_caelli_config",
    "TwoSphereConfig",
    "TailEstimate",
    "tail_volume_ratio",
    "single_sphere_tail",
    "single_sphere_tail_exact",
    "distance_tail",
]

# Region set-equality is decided by symmetric-difference area against this
# relative tolerance; set-inequality must exceed the same threshold by a
# wide margin to count.
EQ_TOL_REL = 1e-9


@dataclass
class CaelliValidation:
    """Named symmetric-difference margins for the reflection-pair setup."""

    om1_reflection: float
    om2_reflection: float
    om3_rotation: float
    om3_asymmetry: float
    degenerate: bool

    @property
    def passed(self) -> bool:
        return (
            self.om1_reflection == 0.0
            and self.om2_reflection == 0.0
            and self.om3_rotation == 0.0
            and self.om3_asymmetry > 0.0
        )


@dataclass
class CaelliConfig:
    """Three disjoint planar regions with interlocking mirror symmetries.

    ``axis1`` and ``axis1 + q*pi`` are the angles of two mirror lines
    through the origin; I1 and I2 are the reflections in them and
    R = I1 * I2 is the rotation by -2*q*pi. The construction requires
    I1(om1) = om1, I2(om2) = om2, R(om3) = om3, and (for a nondegenerate
    pair) I1(om3) != om3.
    """

    q: Fraction
    om1: Region
    om2: Region
    om3: Region
    axis1: float = 0.0

    @property
    def axis2(self) -> float:
        return self.axis1 + float(self.q) * math.pi

    @property
    def rotation_angle(self) -> float:
        # composition of the two reflections: rotation by 2*(axis1 - axis2)
        return -2.0 * float(self.q) * math.pi

    def rotate(self, region: Region) -> Region:
        return region.rotated(self.rotation_angle)

    def reflect1(self, region: Region) -> Region:
        return region.reflected(self.axis1)

    def reflect2(self, region: Region) -> Region:
        return region.reflected(self.axis2)

    def validate(self) -> CaelliValidation:
        """Check every construction precondition; raise naming the failed
        symmetry, and flag (but allow) a rotation-symmetric om2."""
        scale = max(self.om1.area + self.om2.area + self.om3.area, 1.0)
        tol = EQ_TOL_REL * scale

        def sym_diff(a: Region, b: Region) -> float:
            return a.symmetric_difference_area(b)

        d1 = sym_diff(self.reflect1(self.om1), self.om1)
        d2 = sym_diff(self.reflect2(self.om2), self.om2)
        d3 = sym_diff(self.rotate(self.om3), self.om3)
        d3a = sym_diff(self.reflect1(self.om3), self.om3)
        if d1 > tol:
            raise ValueError(
                f"om1 is not symmetric under reflection 1 (symdiff {d1:.3g})"
            )
        if d2 > tol:
            raise ValueError(
                f"om2 is not symmetric under reflection 2 (symdiff {d2:.3g})"
            )
        if d3 > tol:
            raise ValueError(
                f"om3 is not symmetric under the rotation (symdiff {d3:.3g})"
            )
        if d3a <= tol:
            raise ValueError(
                "om3 is symmetric under reflection 1; the pair would be "
                "congruent by construction"
            )
        Region(
            list(self.om1.components)
            + list(self.om2.components)
            + list(self.om3.components)
        ).validate_disjoint()
        degenerate = sym_diff(self.rotate(self.om2), self.om2) <= tol
        return CaelliValidation(
            om1_reflection=0.0 if d1 <= tol else d1,
            om2_reflection=0.0 if d2 <= tol else d2,
            om3_rotation=0.0 if d3 <= tol else d3,
            om3_asymmetry=d3a,
            degenerate=degenerate,
        )

    def to_json_dict(self) -> dict:
        return {
            "q": [self.q.numerator, self.q.denominator],
            "axis1": self.axis1,
            "om1": self.om1.to_dict(),
            "om2": self.om2.to_dict(),
            "om3": self.om3.to_dict(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CaelliConfig":
        num, den = d["q"]
        return cls(
            q=Fraction(num, den),
            om1=Region.from_dict(d["om1"]),
            om2=Region.from_dict(d["om2"]),
            om3=Region.from_dict(d["om3"]),
            axis1=float(d.get("axis1", 0.0)),
        )


def caelli_pair(config: CaelliConfig) -> tuple[Shape, Shape]:
    """Build the pair (X, X') with equal interpoint distance distributions.

    X = om1 u om2 u om3 and X' = om1 u R(om2) u om3. Since R = I1 * I2 and
    I2 fixes om2, R(om2) = I1(om2), so X' = om3 u I1(om1 u om2): every
    within-piece distance is preserved by a rigid motion and every
    cross-piece pair maps measure-preservingly onto a cross-piece pair of
    X, which is what makes the two distance distributions equal while the
    sets differ.
    """
    config.validate()
    om2_img = config.rotate(config.om2)
    x = Region(
        list(config.om1.components)
        + list(config.om2.components)
        + list(config.om3.components)
    )
    xp = Region(
        list(config.om1.components)
        + list(om2_img.components)
        + list(config.om3.components)
    )
    return PlanarComposite(x), PlanarComposite(xp)


def default_caelli_config() -> CaelliConfig:
    """The documented default configuration, shipped as a data file."""
    text = (
        resources.files("riesz_lab")
        .joinpath("data/caelli_default.json")
        .read_text()
    )
    return CaelliConfig.from_json_dict(json.loads(text))


def _build_default_caelli() -> CaelliConfig:
    """Construct the frozen default: mirror lines at 0 and 45 degrees
    (q = 1/4, so R is the quarter turn), two congruent rectangles hugging
    their mirror lines outside radius 1.1, and a quarter-turn-symmetric
    ring of four annular sectors well inside radius 0.75."""
    q = Fraction(1, 4)
    om1 = Region([ConvexPolygon.rectangle(1.2, 2.2, -0.25, 0.25)])
    rect = ConvexPolygon.rectangle(1.2, 2.2, -0.25, 0.25)
    om2 = Region([rect.rotated(math.pi / 4.0)])
    deg = math.pi / 180.0
    om3 = Region(
        [
            AnnularSector(0.45, 0.75, (15.0 + 90.0 * k) * deg, 45.0 * deg)
            for k in range(4)
        ]
    )
    return CaelliConfig(q=q, om1=om1, om2=om2, om3=om3)


@dataclass
class TwoSphereConfig:
    """Two sphere surfaces with centers on the x axis, diameter at most 2.

    ``tail_constant`` is the constant C in the quadratic tail bound
    ratio(eps) <= C * eps^2 valid for eps below ``eps1``; it blows up as
    either sphere approaches radius 1 because the far tail then loses its
    quadratic suppression.
    """

    r1: float = 1.0 / math.sqrt(2.0)
    r2: float = 1.0 / math.sqrt(2.0)
    separation: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.r1 >= self.r2 > 0.0):
            raise ValueError("need r1 >= r2 > 0")
        if self.r1 >= 1.0:
            raise ValueError("the tail constant needs both radii below 1")
        if self.separation is None:
            self.separation = 2.0 - self.r1 - self.r2
        if self.separation < 0.0:
            raise ValueError("separation must be nonnegative")
        if self.diameter > 2.0 + 1e-12:
            raise ValueError(
                f"diameter {self.diameter:g} exceeds 2; the quadratic tail "
                "bound assumes diameter at most 2"
            )

    @property
    def diameter(self) -> float:
        return self.separation + self.r1 + self.r2

    @property
    def eps1(self) -> float:
        return min(1.0, self.r1, self.r2)

    @property
    def tail_constant(self) -> float:
        if self.r1 >= 1.0 or self.r2 >= 1.0:
            raise ValueError("the tail constant needs both radii below 1")
        return 1.0 / (4.0 * self.r1 * self.r2 * (1.0 - self.r1) * (1.0 - self.r2))

    @property
    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        s = self.separation / 2.0
        return (
            np.array([-s, 0.0, 0.0]),
            np.array([s, 0.0, 0.0]),
        )

    def as_union_shape(self) -> UnionShape:
        return two_spheres(self.r1, self.r2, separation=self.separation)

    @classmethod
    def quadratic_bound_example(cls) -> "TwoSphereConfig":
        """Radii 1/2 inside the unit ball: maximal cross-pair distance 2,
        small tail constant C = 4."""
        return cls(r1=0.5, r2=0.5, separation=1.0)

    @classmethod
    def sphere_mimic(cls) -> "TwoSphereConfig":
        """Equal total area and diameter as the unit sphere: r1 = r2 =
        1/sqrt(2) (areas add to 4*pi) with separation making the diameter
        exactly 2. Residue data cannot distinguish this union from the
        sphere; the tail test below can."""
        return cls()

    def documented_eps(self) -> float:
        """Separation scale at which the union tail provably undercuts the
        single-sphere tail: eps small enough that C*eps^2 stays below
        (eps - eps^2/4), with a 10% safety margin."""
        c0 = self.tail_constant
        return 0.9 * min(self.eps1, 1.0 / (2.0 * (c0 + 0.25)))


@dataclass
class TailEstimate:
    """Monte Carlo tail fraction with its standard error."""

    value: float
    stderr: float
    n_pairs: int
    threshold: float

    def __float__(self) -> float:
        return self.value


def tail_volume_ratio(
    config: TwoSphereConfig,
    eps: float,
    n_pairs: int = 1_000_000,
    seed: int = 0,
) -> TailEstimate:
    """Fraction of cross pairs (x on S1, y on S2) with |x - y| >= 2 - eps.

    Estimates the normalized product measure of the far tail, the quantity
    the quadratic bound ratio <= C * eps^2 controls. Points are sampled
    area-uniformly on each sphere, so the indicator mean is the ratio.
    """
    if not (0.0 < eps < config.eps1):
        raise ValueError(
            f"eps must lie in (0, {config.eps1:g}); got {eps:g}"
        )
    c1, c2 = config.centers
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    hits = 0
    done = 0
    chunk = 1 << 18
    while done < n_pairs:
        n = min(chunk, n_pairs - done)
        x = c1 + config.r1 * _unit_sphere(rng, n)
        y = c2 + config.r2 * _unit_sphere(rng, n)
        d = np.sqrt(np.einsum("ij,ij->i", x - y, x - y))
        hits += int(np.count_nonzero(d >= 2.0 - eps))
        done += n
    p = hits / n_pairs
    err = math.sqrt(max(p * (1.0 - p), 0.0) / n_pairs)
    return TailEstimate(p, err, int(n_pairs), 2.0 - eps)


def _unit_sphere(rng, n: int) -> np.ndarray:
    z = 2.0 * rng.random(n) - 1.0
    th = 2.0 * math.pi * rng.random(n)
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([s * np.cos(th), s * np.sin(th), z])


def single_sphere_tail_exact(eps: float) -> float:
    """Normalized pair measure of {|x - y| >= 2 - eps} on the unit sphere.

    With t = <x, y> uniform on [-1, 1], the tail fraction is
    (1 - ((2 - eps)^2 / 2 - 1)) / 2 = eps - eps^2 / 4.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    return eps - eps * eps / 4.0


def single_sphere_tail(
    eps: float, n_pairs: int = 1_000_000, seed: int = 0
) -> TailEstimate:
    """Monte Carlo version of ``single_sphere_tail_exact`` on S^2(1)."""
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    hits = 0
    done = 0
    chunk = 1 << 18
    while done < n_pairs:
        n = min(chunk, n_pairs - done)
        x = _unit_sphere(rng, n)
        y = _unit_sphere(rng, n)
        d = np.sqrt(np.einsum("ij,ij->i", x - y, x - y))
        hits += int(np.count_nonzero(d >= 2.0 - eps))
        done += n
    p = hits / n_pairs
    err = math.sqrt(max(p * (1.0 - p), 0.0) / n_pairs)
    return TailEstimate(p, err, int(n_pairs), 2.0 - eps)


def distance_tail(
    shape: Shape,
    threshold: float,
    n_pairs: int = 1_000_000,
    seed: int = 0,
) -> TailEstimate:
    """Normalized pair-measure fraction of {|x - y| >= threshold}.

    Runs over the shape's own pair measure (all pairs, same-component and
    cross), normalized by the exact squared stratum measure; this is the
    far tail of the interpoint distance distribution itself.
    """
    stratum = shape.default_stratum()
    total = shape.stratum_measure(stratum) ** 2
    acc = 0.0
    sq = 0.0
    count = 0
    for xp, xw, yp, yw, _xn, _yn in pair_stream(
        shape, stratum, int(n_pairs), seed, mode="random"
    ):
        d = np.sqrt(np.einsum("ij,ij->i", xp - yp, xp - yp))
        contrib = np.where(d >= threshold, xw * yw, 0.0)
        acc += float(np.sum(contrib))
        sq += float(np.sum(contrib * contrib))
        count += len(d)
    var = max(sq - acc * acc / max(count, 1), 0.0)
    return TailEstimate(
        acc / total, math.sqrt(var) / total, int(n_pairs), threshold
    )
