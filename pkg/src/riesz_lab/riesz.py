"""Generalized Riesz energies of curves, surfaces, and solid bodies.

``riesz_energy`` evaluates I_z(X) = double integral of |x - y|^z over X x X
wherever that integral converges, routing between three estimators:

* direct Monte Carlo on the defining double integral, used where the
  variance is finite and benign (Re z > -m/2 for an m-dimensional measure);
* a boundary (Stokes) reduction for solid bodies,
      I_z(Omega) = -1/((z+2)(z+d)) * I'_{z+2}(boundary),
  where I' is the <n_x, n_y>-weighted boundary pair integral — this trades
  the interior near-singularity for a milder boundary one and covers the
  rest of the convergence strip Re z in (-d, -d/2];
* the histogram continuation of ``beta`` for closed manifolds below the
  direct range.

At z = -2 the boundary prefactor vanishes, but so does the weighted
boundary integral (the outward normal field integrates to zero over a
closed boundary), so for d >= 3 the quotient is removable:
I_{-2} = -G'(d-2)/(d-2) with G'(w) the log-weighted boundary pair integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beta import beta_eval, fit_profile
from .errors import DomainError
from .pairkernel import pair_integral
from .shapes import Shape

_EPS_POLE = 1e-9


@dataclass
class EnergyValue:
    z: complex
    value: complex
    stderr: float
    n_pairs: int
    method: str

    @property
    def real(self) -> float:
        return complex(self.value).real


def _m_eff(shape: Shape) -> int:
    return shape.ambient_dim if shape.is_body else shape.intrinsic_dim


def _check_domain(shape: Shape, z: complex) -> None:
    m = _m_eff(shape)
    if z.real <= -m + _EPS_POLE:
        raise DomainError(
            f"I_z diverges for Re z <= -{m} on a {m}-dimensional measure; "
            f"got z = {z:g}. Use beta_eval for the continued value."
        )


def body_energy_stokes(
    shape: Shape,
    z: complex,
    n_pairs: int = 1_000_000,
    seed: int = 0,
    mode: str = "random",
) -> EnergyValue:
    """Riesz energy of a solid body via its boundary pair integral.

    Valid for Re z > -d - 1 except at the prefactor poles/zeros z = -d and
    z = -2 (z = -2 is removable for d >= 3 and handled exactly there).
    The boundary must be smooth, so piecewise-smooth composites are refused.
    """
    if not shape.is_body:
        raise ValueError("the boundary reduction applies to solid bodies only")
    if shape.kind == "planar-composite":
        raise DomainError(
            "the boundary reduction needs a smooth boundary; "
            "planar composites have corners"
        )
    z = complex(z)
    d = shape.ambient_dim
    if z.real <= -d - 1:
        raise DomainError(
            f"the boundary reduction needs Re z > -{d + 1}; got z = {z:g}"
        )
    if abs(z + d) < _EPS_POLE:
        raise DomainError(f"z = -{d} is the volume pole; use residues()")
    if abs(z + 2.0) < _EPS_POLE:
        if d == 2:
            raise DomainError("z = -2 is the volume pole in the plane")
        est = pair_integral(
            shape, "boundary", z + 2.0, n_pairs=n_pairs, seed=seed,
            normal_weight=True, log_weight=True, mode=mode,
        )
        pref = -1.0 / (d - 2.0)
        return EnergyValue(z, pref * est.value, abs(pref) * est.stderr,
                           est.n_pairs, "stokes")
    est = pair_integral(
        shape, "boundary", z + 2.0, n_pairs=n_pairs, seed=seed,
        normal_weight=True, mode=mode,
    )
    pref = -1.0 / ((z + 2.0) * (z + d))
    return EnergyValue(z, pref * est.value, abs(pref) * est.stderr,
                       est.n_pairs, "stokes")


def riesz_energy(
    shape: Shape,
    z: complex,
    n_pairs: int = 1_000_000,
    seed: int = 0,
    mode: str = "random",
    t_fit: float | None = None,
) -> EnergyValue:
    """I_z(X) with automatic estimator choice; see the module docstring.

    Raises DomainError when Re z is at or below the divergence threshold
    (-1 for curves, -2 for surfaces and plane bodies, -3 for solid bodies).
    """
    z = complex(z)
    _check_domain(shape, z)
    m = _m_eff(shape)
    if z.real > -m / 2.0:
        est = pair_integral(shape, None, z, n_pairs=n_pairs, seed=seed, mode=mode)
        return EnergyValue(z, est.value, est.stderr, est.n_pairs, "direct")
    if shape.is_body:
        return body_energy_stokes(shape, z, n_pairs=n_pairs, seed=seed, mode=mode)
    profile = fit_profile(
        shape, n_pairs=n_pairs, seed=seed, t_fit=t_fit, mode="stratified"
    )
    value, err = beta_eval(shape, z, profile, with_stderr=True)
    return EnergyValue(z, value, err, profile.n_pairs, "continuation")


def moebius_energy(shape: Shape, n_grid: int = 4096) -> float:
    """Knot energy of a closed curve: the double integral of
    |x - y|^{-2} - d_arc(x, y)^{-2} over ordered parameter pairs.

    The diagonal band |i - j| <= 1 is excluded from the quadrature and
    restored by its exact limit: the integrand tends to kappa^2 / 12 as the
    separation vanishes, so the band contributes
    sum_i w_i (w_{i-1} + w_i + w_{i+1}) kappa_i^2 / 12 up to O(h^2).
    Circles give exactly 4; every other closed curve gives more.
    """
    jet = getattr(shape, "curve_jet", None)
    if jet is None:
        raise ValueError("moebius_energy needs a closed curve with a smooth jet")
    if n_grid < 16:
        raise ValueError("n_grid must be at least 16")
    h = 2.0 * math.pi / n_grid
    theta = h * np.arange(n_grid)
    pos, vel, acc = jet(theta)
    speed = np.linalg.norm(vel, axis=1)
    w = speed * h
    total_len = float(w.sum())
    # cumulative trapezoid keeps partial arc lengths O(h^2) accurate
    arc = np.concatenate(([0.0], np.cumsum(0.5 * h * (speed[:-1] + speed[1:]))))

    if pos.shape[1] == 2:
        cross = vel[:, 0] * acc[:, 1] - vel[:, 1] * acc[:, 0]
        kappa = np.abs(cross) / speed**3
    else:
        cross = np.cross(vel, acc)
        kappa = np.linalg.norm(cross, axis=1) / speed**3

    total = 0.0
    idx = np.arange(n_grid)
    for k0 in range(2, n_grid - 1, 64):
        ks = np.arange(k0, min(k0 + 64, n_grid - 1))
        j = (idx[None, :] + ks[:, None]) % n_grid
        diff = pos[j] - pos[None, :, :]
        chord2 = np.einsum("kij,kij->ki", diff, diff)
        a = np.abs(arc[j] - arc[None, :])
        a = np.minimum(a, total_len - a)
        integrand = 1.0 / chord2 - 1.0 / a**2
        total += float(np.sum(integrand * (w[None, :] * w[j])))
    band = float(np.sum(w * (np.roll(w, 1) + w + np.roll(w, -1)) * kappa**2) / 12.0)
    return total + band
