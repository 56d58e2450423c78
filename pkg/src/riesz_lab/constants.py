"""Measure constants for round spheres and balls."""
from __future__ import annotations

import math


def sphere_volume(j: int) -> float:
    """Total j-dimensional measure of the unit j-sphere in R^{j+1}.

    sigma_0 = 2 (two points), sigma_1 = 2*pi, sigma_2 = 4*pi, ...
    """
    if j < 0:
        raise ValueError("sphere dimension must be >= 0")
    return 2.0 * math.pi ** ((j + 1) / 2.0) / math.gamma((j + 1) / 2.0)


def ball_volume(d: int) -> float:
    """Volume of the unit d-ball: omega_d = pi^{d/2} / Gamma(d/2 + 1)."""
    if d < 0:
        raise ValueError("ball dimension must be >= 0")
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
