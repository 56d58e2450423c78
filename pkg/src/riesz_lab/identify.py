"""Decision procedure: is this shape a ball, a circle, or a 2-sphere?

The meromorphic continuation of the pair integral carries enough geometry
to pin down three families up to congruence. The pole lattice reveals the
intrinsic dimension and body/closed character. For bodies, the residues at
-d and -d-1 give volume and boundary volume, and their isoperimetric
equality singles out the round ball. For closed curves, the regular value
at z = -2 vanishes exactly for round circles and is positive otherwise.
For closed surfaces, the residue at -4 measures the integrated squared
difference of principal curvatures, which vanishes exactly for unions of
round spheres; area and diameter then pin the radius, and a far-tail test
of the distance distribution separates a single sphere from a union of
smaller ones that mimics its area and diameter.

Every check carries an explicit margin, and the verdict keeps the whole
evidence ledger; a shape that fails any check comes back Inconclusive with
the first failing criterion named.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .beta import (
    DiameterEstimate,
    MeromorphicSummary,
    beta_eval,
    diameter_via_beta,
    fit_profile,
    residues,
)
from .constants import ball_volume, sphere_volume
from .constructions import TailEstimate, distance_tail, single_sphere_tail_exact
from .shapes import Shape

__all__ = [
    "Budgets",
    "Fingerprint",
    "Check",
    "Verdict",
    "fingerprint",
    "classify",
    "radius_from_residue",
]

# Absolute scale-invariant thresholds used on top of the 3-sigma statistical
# ones: curves are called round when |B(-2)| (the scale-invariant excess
# bending energy) is below B_MINUS2_TOL; surfaces pass the umbilic test
# when the residue at -4 (the integrated squared difference of principal
# curvatures, also scale invariant) is below UMBILIC_TOL in magnitude.
B_MINUS2_TOL = 0.025
UMBILIC_TOL = 5.0

# Relative tail parameter for the far-tail test of multi-component
# surfaces: threshold = (1 - TAIL_EPS / 2) * (2 * r_hat) with r_hat the
# area-implied radius; a single round sphere then shows the tail fraction
# TAIL_EPS - TAIL_EPS^2 / 4 regardless of its size.
TAIL_EPS = 0.08
# Relative slack for the tail fraction on top of 3 sigma: absorbs the
# error of the area-implied radius (bounded by the area check that runs
# first), amplified by the tail's threshold sensitivity
# d ln P / d ln s = -s^2 / (2 P) of about -24; the shapes this check
# separates differ by an order of magnitude, so the slack stays loose.
TAIL_TOL_REL = 0.10


@dataclass
class Budgets:
    """Sampling budgets for fingerprinting; defaults fit a desk-scale run."""

    n_pairs: int = 8_000_000
    bins: int = 128
    t_fit_frac: float = 0.25
    i_max: int = 2
    mode: str = "stratified"
    diam_n_max: int = 64
    diam_pairs: int = 1_000_000
    tail_pairs: int = 1_000_000


@dataclass
class Fingerprint:
    """Numeric summary of a shape's continued pair integral.

    ``m`` is read off the first pole of the computed ladder; ``body`` and
    ``n_components`` are trusted metadata (the poles do not reveal the
    number of components, and body-ness enters through which weighting the
    histogram used).
    """

    m: int
    d: int
    body: bool
    n_components: int
    summary: MeromorphicSummary
    b_minus2: tuple[float, float] | None = None
    diameter: DiameterEstimate | None = None
    tail: TailEstimate | None = None
    tail_radius: float | None = None
    seed: int = 0
    budgets: Budgets = field(default_factory=Budgets)
    shape_dict: dict | None = None

    def residue(self, z: float) -> tuple[float, float]:
        p = self.summary.residue_at(z)
        if p is None:
            raise ValueError(f"fingerprint has no pole at z = {z:g}")
        return p.residue, p.stderr


@dataclass
class Check:
    """One criterion of the decision chain with its margin."""

    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool

    def to_json_dict(self) -> dict:
        # coerce numpy scalars so the dict is json-serializable as-is
        return {
            "name": self.name,
            "measured": float(self.measured),
            "expected": float(self.expected),
            "tolerance": float(self.tolerance),
            "passed": bool(self.passed),
        }


@dataclass
class Verdict:
    """Classification outcome plus the full evidence ledger."""

    klass: str  # "Ball", "Circle", "Sphere2", or "Inconclusive"
    d: int
    radius: float | None
    checks: list[Check]

    @property
    def failing(self) -> str | None:
        for c in self.checks:
            if not c.passed:
                return c.name
        return None

    def to_json_dict(self) -> dict:
        return {
            "class": self.klass,
            "d": int(self.d),
            "radius": None if self.radius is None else float(self.radius),
            "failing": self.failing,
            "checks": [c.to_json_dict() for c in self.checks],
        }


def _area_radius(summary: MeromorphicSummary) -> tuple[float, float] | None:
    """Radius implied by the area residue Res(-2) = sigma_1 * 4 pi r^2,
    with its propagated stderr; None when the residue is unusable."""
    p = summary.residue_at(-2.0)
    if p is None or p.residue <= 0.0:
        return None
    denom = sphere_volume(1) * 4.0 * math.pi
    r = math.sqrt(p.residue / denom)
    return r, 0.5 * r * p.stderr / p.residue


def fingerprint(
    shape: Shape, budgets: Budgets | None = None, seed: int = 0
) -> Fingerprint:
    """Compute the residue ladder and the class-specific extras.

    Curves get the regular value B(-2); surfaces get a diameter estimate,
    and multi-component surfaces additionally get the far-tail fraction of
    the distance distribution at the threshold (1 - TAIL_EPS/2) * 2 *
    r_hat, with r_hat the area-implied radius (the best-measured scale).
    """
    budgets = budgets or Budgets()
    t_fit = budgets.t_fit_frac * shape.diameter()
    profile = fit_profile(
        shape,
        n_pairs=budgets.n_pairs,
        seed=seed,
        t_fit=t_fit,
        i_max=budgets.i_max,
        bins=budgets.bins,
        mode=budgets.mode,
    )
    summary = residues(shape, profile=profile)
    first_pole = max(p.z for p in summary.poles)
    fp = Fingerprint(
        m=int(round(-first_pole)),
        d=shape.ambient_dim,
        body=shape.is_body,
        n_components=shape.n_components,
        summary=summary,
        seed=seed,
        budgets=budgets,
        shape_dict=shape.to_dict(),
    )
    if not fp.body and fp.m == 1:
        val, err = beta_eval(shape, -2.0, profile=profile, with_stderr=True)
        fp.b_minus2 = (float(np.real(val)), err)
    if not fp.body and fp.m == 2:
        fp.diameter = diameter_via_beta(
            shape,
            n_max=budgets.diam_n_max,
            n_pairs=budgets.diam_pairs,
            seed=seed + 1,
            mode=budgets.mode,
        )
        if fp.n_components > 1:
            ar = _area_radius(summary)
            if ar is not None:
                r_hat = ar[0]
                fp.tail_radius = r_hat
                threshold = (1.0 - TAIL_EPS / 2.0) * 2.0 * r_hat
                fp.tail = distance_tail(
                    shape, threshold, n_pairs=budgets.tail_pairs, seed=seed + 2
                )
    return fp


def radius_from_residue(fp: Fingerprint, hypothesis: str | None = None) -> float:
    """Model radius implied by the leading residue.

    Circle: Res(-1) = sigma_0 * 2 pi r; sphere: Res(-2) = sigma_1 * 4 pi
    r^2; ball: Res(-d) = sigma_{d-1} * omega_d * r^d with omega_d the unit
    ball volume. Raises on a nonpositive residue.
    """
    if hypothesis is None:
        hypothesis = "Ball" if fp.body else ("Circle" if fp.m == 1 else "Sphere2")
    if hypothesis == "Ball":
        res, _ = fp.residue(-fp.d)
        if res <= 0.0:
            raise ValueError("leading residue must be positive")
        return (res / (sphere_volume(fp.d - 1) * ball_volume(fp.d))) ** (
            1.0 / fp.d
        )
    if hypothesis == "Circle":
        res, _ = fp.residue(-1.0)
        if res <= 0.0:
            raise ValueError("leading residue must be positive")
        return res / (sphere_volume(0) * 2.0 * math.pi)
    if hypothesis == "Sphere2":
        res, _ = fp.residue(-2.0)
        if res <= 0.0:
            raise ValueError("leading residue must be positive")
        return math.sqrt(res / (sphere_volume(1) * 4.0 * math.pi))
    raise ValueError(f"unknown hypothesis {hypothesis!r}")


def _significant(name: str, value: float, err: float, tol_rel: float) -> Check:
    """The quantity must be positive and measured to better than tol_rel
    (or 3 sigma, whichever is looser, mirroring the other checks)."""
    tol = max(tol_rel * abs(value), 3.0 * err)
    ok = value > 0.0 and 3.0 * err <= tol
    return Check(name, value, value if ok else 0.0, tol, ok)


def classify(
    fp: Fingerprint, reference: Fingerprint, tol_rel: float = 0.02
) -> Verdict:
    """Run the decision chain of the identification theorem.

    The reference fingerprint names the model family through its own pole
    structure; comparisons are scale equivariant (the scale comes from the
    ratio of leading residues), and tolerances default to
    max(tol_rel relative, 3 * stderr) per check. The chain: (a) the pole
    lattice must match; (b) bodies must match the ball's boundary volume
    at the volume-implied radius (isoperimetric equality); (c) curves must
    have B(-2) = 0 and a well-measured length; (d) surfaces must pass the
    umbilic residue test, match the diameter implied by their area, and
    (for declared multi-component shapes) show the far-tail fraction of a
    single round sphere.
    """
    checks: list[Check] = []
    lattice_ok = (
        fp.body == reference.body
        and fp.m == reference.m
        and fp.d == reference.d
    )
    checks.append(
        Check(
            "pole-lattice",
            float(-fp.d if fp.body else -fp.m),
            float(-reference.d if reference.body else -reference.m),
            0.0,
            lattice_ok,
        )
    )
    if not lattice_ok:
        return Verdict("Inconclusive", fp.d, None, checks)

    if fp.body:
        return _classify_body(fp, reference, tol_rel, checks)
    if fp.m == 1:
        return _classify_curve(fp, reference, tol_rel, checks)
    if fp.m == 2:
        return _classify_surface(fp, reference, tol_rel, checks)
    return Verdict("Inconclusive", fp.d, None, checks)


def _classify_body(fp, reference, tol_rel, checks) -> Verdict:
    d = fp.d
    res_d, err_d = fp.residue(-d)
    checks.append(_significant("volume", res_d, err_d, tol_rel))
    if not checks[-1].passed:
        return Verdict("Inconclusive", d, None, checks)
    # volume-implied radius, then the isoperimetric comparison: the
    # boundary volume must equal that of the round ball of the same volume
    # (equality holds only for the ball).
    r_hat = radius_from_residue(fp, "Ball")
    res_b, err_b = fp.residue(-d - 1)
    sigma_b = sphere_volume(d - 2)
    bvol = -res_b * (d - 1) / sigma_b
    err_bvol = err_b * (d - 1) / sigma_b
    expected_bvol = sphere_volume(d - 1) * r_hat ** (d - 1)
    tol = max(tol_rel * expected_bvol, 3.0 * err_bvol)
    checks.append(
        Check(
            "boundary-volume",
            bvol,
            expected_bvol,
            tol,
            abs(bvol - expected_bvol) <= tol,
        )
    )
    if not checks[-1].passed:
        return Verdict("Inconclusive", d, None, checks)
    return Verdict("Ball", d, r_hat, checks)


def _classify_curve(fp, reference, tol_rel, checks) -> Verdict:
    if fp.b_minus2 is None:
        raise ValueError("curve classification needs B(-2) in the fingerprint")
    val, err = fp.b_minus2
    tol = max(B_MINUS2_TOL, 3.0 * err)
    checks.append(Check("B(-2)", val, 0.0, tol, abs(val) <= tol))
    if not checks[-1].passed:
        return Verdict("Inconclusive", fp.d, None, checks)
    res_1, err_1 = fp.residue(-1.0)
    checks.append(_significant("length", res_1, err_1, tol_rel))
    if not checks[-1].passed:
        return Verdict("Inconclusive", fp.d, None, checks)
    return Verdict("Circle", fp.d, radius_from_residue(fp, "Circle"), checks)


def _classify_surface(fp, reference, tol_rel, checks) -> Verdict:
    res_4, err_4 = fp.residue(-4.0)
    tol = max(UMBILIC_TOL, 3.0 * err_4)
    checks.append(Check("Res(-4)", res_4, 0.0, tol, abs(res_4) <= tol))
    if not checks[-1].passed:
        return Verdict("Inconclusive", fp.d, None, checks)
    res_2, err_2 = fp.residue(-2.0)
    checks.append(_significant("area", res_2, err_2, tol_rel))
    if not checks[-1].passed:
        return Verdict("Inconclusive", fp.d, None, checks)
    ar = _area_radius(fp.summary)
    r_hat, r_err = ar
    if fp.diameter is None:
        raise ValueError("surface classification needs a diameter estimate")
    diam = fp.diameter.extrapolated
    expected_diam = 2.0 * r_hat
    tol = max(max(tol_rel, 0.03) * expected_diam, 3.0 * 2.0 * r_err)
    checks.append(
        Check(
            "diameter",
            diam,
            expected_diam,
            tol,
            abs(diam - expected_diam) <= tol,
        )
    )
    if not checks[-1].passed:
        return Verdict("Inconclusive", fp.d, None, checks)
    if fp.n_components > 1:
        if fp.tail is None or fp.tail_radius is None:
            raise ValueError(
                "multi-component surface classification needs the tail estimate"
            )
        expected_tail = single_sphere_tail_exact(TAIL_EPS)
        tol = max(TAIL_TOL_REL * expected_tail, 3.0 * fp.tail.stderr)
        checks.append(
            Check(
                "tail",
                fp.tail.value,
                expected_tail,
                tol,
                abs(fp.tail.value - expected_tail) <= tol,
            )
        )
        if not checks[-1].passed:
            return Verdict("Inconclusive", fp.d, None, checks)
    return Verdict("Sphere2", fp.d, r_hat, checks)
