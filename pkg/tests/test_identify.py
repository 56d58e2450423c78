"""Shape identification from pair-distance fingerprints.

Positive cases must recover the class and the radius; the designed
near-misses (flat-free torus test fails on the umbilic residue, a
non-circular curve fails on the regularized energy value, a two-sphere
union fails on the distance tail) must come back Inconclusive with the
correct failing criterion named.
"""
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from riesz_lab.identify import Budgets, classify, fingerprint, radius_from_residue
from riesz_lab.shapes import Ball, Circle, Ellipse, Sphere, Torus, two_spheres

FAST = Budgets(n_pairs=2_000_000)


@pytest.fixture(scope="module")
def references():
    return {
        "sphere": fingerprint(Sphere(1.0), FAST, seed=100),
        "circle": fingerprint(Circle(1.0), FAST, seed=100),
        "ball3": fingerprint(Ball(3, 1.0), FAST, seed=100),
        "disk": fingerprint(Ball(2, 1.0), FAST, seed=100),
    }


def test_budget_defaults_are_frozen():
    # the acceptance pipeline runs on these defaults; changing them silently
    # would invalidate the calibrated detection margins
    b = Budgets()
    assert b.n_pairs == 8_000_000
    assert b.bins == 128
    assert b.mode == "stratified"
    assert b.diam_n_max == 64


@pytest.mark.parametrize(
    "shape, ref, klass, radius",
    [
        (Sphere(1.0), "sphere", "Sphere2", 1.0),
        (Sphere(2.0), "sphere", "Sphere2", 2.0),
        (Circle(1.0), "circle", "Circle", 1.0),
        (Circle(0.5), "circle", "Circle", 0.5),
        (Ball(3, 1.0), "ball3", "Ball", 1.0),
        (Ball(2, 1.0), "disk", "Ball", 1.0),
    ],
)
def test_positive_identifications(references, shape, ref, klass, radius):
    fp = fingerprint(shape, FAST, seed=7)
    verdict = classify(fp, references[ref])
    assert verdict.klass == klass
    assert verdict.failing is None
    assert_allclose(verdict.radius, radius, rtol=0.02)


@pytest.mark.parametrize(
    "shape, ref, failing",
    [
        (Torus(2.0, 1.0), "sphere", "Res(-4)"),
        (Ellipse(2.0, 1.0), "circle", "B(-2)"),
        (two_spheres(), "sphere", "tail"),
    ],
)
def test_designed_near_misses(references, shape, ref, failing):
    fp = fingerprint(shape, FAST, seed=7)
    verdict = classify(fp, references[ref])
    assert verdict.klass == "Inconclusive"
    assert verdict.failing == failing


def test_fingerprint_fields():
    fp = fingerprint(Sphere(1.0), FAST, seed=3)
    assert fp.m == 2
    assert fp.n_components == 1
    assert fp.summary.residue_at(-2.0) is not None
    assert fp.diameter is not None
    assert fp.seed == 3


def test_fingerprint_curve_has_b_minus2():
    fp = fingerprint(Circle(1.0), FAST, seed=4)
    assert fp.m == 1
    assert fp.b_minus2 is not None
    value, stderr = fp.b_minus2
    assert abs(value) < max(0.025, 4 * stderr)


def test_union_fingerprint_has_tail():
    fp = fingerprint(two_spheres(), FAST, seed=5)
    assert fp.n_components == 2
    assert fp.tail is not None
    # far below the single-sphere prediction at the same threshold
    assert fp.tail.value < 0.02


def test_radius_from_residue_sphere():
    fp = fingerprint(Sphere(1.5), FAST, seed=6)
    assert_allclose(radius_from_residue(fp), 1.5, rtol=0.02)


def test_mismatched_lattice_is_inconclusive(references):
    # a surface checked against a curve reference cannot match the pole
    # lattice, whatever the numbers are
    fp = fingerprint(Sphere(1.0), FAST, seed=8)
    verdict = classify(fp, references["circle"])
    assert verdict.klass == "Inconclusive"


def test_verdict_serialization(references):
    fp = fingerprint(Sphere(1.0), FAST, seed=9)
    verdict = classify(fp, references["sphere"])
    d = verdict.to_json_dict()
    assert d["class"] == "Sphere2"
    assert isinstance(d["checks"], list) and d["checks"]
    for chk in d["checks"]:
        assert set(chk) >= {"name", "measured", "expected", "tolerance", "passed"}
    assert all(chk["passed"] for chk in d["checks"])


@pytest.mark.parametrize("ref", ["sphere", "circle", "ball3"])
def test_verdict_json_dict_is_serializable(references, ref):
    # numpy scalars must be coerced: json.dumps rejects np.bool_ outright
    shape = {"sphere": Sphere(1.0), "circle": Circle(1.0), "ball3": Ball(3, 1.0)}[ref]
    verdict = classify(fingerprint(shape, FAST, seed=4), references[ref])
    parsed = json.loads(json.dumps(verdict.to_json_dict()))
    assert parsed["class"] == verdict.klass
    assert all(isinstance(chk["passed"], bool) for chk in parsed["checks"])


def test_checks_name_the_discriminators(references):
    fp = fingerprint(Torus(2.0, 1.0), FAST, seed=10)
    verdict = classify(fp, references["sphere"])
    names = [c.name for c in verdict.checks]
    assert any("Res(-4)" in n for n in names)
    failed = [c for c in verdict.checks if not c.passed]
    assert failed and failed[0].name == verdict.failing
