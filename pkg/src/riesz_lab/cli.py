"""Command-line front end: every pipeline behind one executable.

Each subcommand reads a shape description from a JSON file, runs one
pipeline with an explicit seed, and writes a JSON or CSV report carrying
enough metadata (version, seed, budgets) to reproduce it byte for byte.
Exit codes: 0 success, 2 validation error (bad arguments, bad shape file),
3 numerical-domain error (an exponent where the integral diverges).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .beta import beta_eval, fit_profile, residues
from .constructions import (
    TwoSphereConfig,
    caelli_pair,
    default_caelli_config,
    single_sphere_tail,
    single_sphere_tail_exact,
    tail_volume_ratio,
)
from .constructions import CaelliConfig
from .distributions import (
    chord_length_distribution,
    crofton_moments,
    interpoint_cdf,
    two_sample_ks,
)
from .errors import DomainError
from .identify import Budgets, classify, fingerprint
from .riesz import moebius_energy, riesz_energy
from .shapes import load_shape

__all__ = ["main"]


def _add_common(p: argparse.ArgumentParser, pairs_default: int = 1_000_000) -> None:
    p.add_argument("--seed", type=int, required=True, help="RNG seed (mandatory)")
    p.add_argument("--pairs", type=int, default=pairs_default, help="pair budget")
    p.add_argument("--bins", type=int, default=128, help="histogram bins")
    p.add_argument("--tfit", type=float, default=None, help="profile fit window")
    p.add_argument(
        "--mode",
        choices=("random", "stratified"),
        default="stratified",
        help="pair sampling mode",
    )
    p.add_argument("--out", default="-", help="output path ('-' = stdout)")
    p.add_argument(
        "--format", choices=("json", "csv"), default=None, help="output format"
    )


def _positive(args) -> None:
    if args.pairs <= 0 or args.bins <= 0:
        raise ValueError("budgets must be positive")


def _meta(args, **extra) -> dict:
    meta = {
        "version": __version__,
        "seed": args.seed,
        "pairs": args.pairs,
        "bins": args.bins,
        "mode": args.mode,
    }
    if args.tfit is not None:
        meta["tfit"] = args.tfit
    meta.update(extra)
    return meta


def _emit(args, payload: dict, csv_writer=None, default_format: str = "json") -> int:
    fmt = args.format or default_format
    if fmt == "csv" and csv_writer is None:
        raise ValueError("this subcommand has no CSV representation")

    def write(fh):
        if fmt == "json":
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        else:
            meta = payload.get("meta", {})
            items = ", ".join(f"{k}={meta[k]}" for k in sorted(meta))
            fh.write(f"# riesz-lab {items}\n")
            csv_writer(fh)

    if args.out == "-":
        write(sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write(fh)
    return 0


def _z_list(raw: list[str]) -> list[float]:
    try:
        return [float(tok) for item in raw for tok in item.split(",") if tok]
    except ValueError as exc:
        raise ValueError(f"bad z/q list: {raw}") from exc


def cmd_energy(args) -> int:
    _positive(args)
    shape = load_shape(args.shape)
    zs = _z_list(args.z)
    if not zs:
        raise ValueError("energy needs at least one z")
    values = []
    for z in zs:
        e = riesz_energy(
            shape, z, n_pairs=args.pairs, seed=args.seed, mode=args.mode,
            t_fit=args.tfit,
        )
        values.append(
            {
                "z": z,
                "value": float(np.real(e.value)),
                "stderr": e.stderr,
                "method": e.method,
                "n_pairs": e.n_pairs,
            }
        )
    payload = {"shape": shape.to_dict(), "values": values, "meta": _meta(args)}

    def rows(fh):
        fh.write("z,value,stderr,method\n")
        for v in values:
            fh.write(f"{v['z']:.12g},{v['value']:.12g},{v['stderr']:.12g},{v['method']}\n")

    return _emit(args, payload, rows)


def cmd_beta(args) -> int:
    _positive(args)
    shape = load_shape(args.shape)
    zs = _z_list(args.z)
    if not zs:
        raise ValueError("beta needs at least one z")
    profile = fit_profile(
        shape, n_pairs=args.pairs, seed=args.seed, t_fit=args.tfit,
        bins=args.bins, mode=args.mode,
    )
    values = []
    for z in zs:
        val, err = beta_eval(shape, z, profile=profile, with_stderr=True)
        values.append(
            {"z": z, "re": float(np.real(val)), "im": float(np.imag(val)), "stderr": err}
        )
    payload = {"shape": shape.to_dict(), "values": values, "meta": _meta(args)}

    def rows(fh):
        fh.write("z,re,im,stderr\n")
        for v in values:
            fh.write(f"{v['z']:.12g},{v['re']:.12g},{v['im']:.12g},{v['stderr']:.12g}\n")

    return _emit(args, payload, rows)


def cmd_residues(args) -> int:
    _positive(args)
    shape = load_shape(args.shape)
    profile = fit_profile(
        shape, n_pairs=args.pairs, seed=args.seed, t_fit=args.tfit,
        bins=args.bins, mode=args.mode,
    )
    summary = residues(shape, profile=profile)
    payload = {
        "shape": shape.to_dict(),
        "summary": summary.to_json_dict(),
        "meta": _meta(args),
    }

    def rows(fh):
        fh.write("z,residue,stderr\n")
        for p in summary.poles:
            fh.write(f"{p.z:.12g},{p.residue:.12g},{p.stderr:.12g}\n")

    return _emit(args, payload, rows)


def cmd_distro(args) -> int:
    _positive(args)
    shape = load_shape(args.shape)
    dist = interpoint_cdf(shape, n_pairs=args.pairs, seed=args.seed, mode="random")
    payload = {
        "shape": shape.to_dict(),
        "total_mass": dist.total_mass,
        "diameter": dist.diameter,
        "effective_n": dist.effective_n(),
        "meta": _meta(args, mode="random"),
    }
    return _emit(args, payload, dist.write_csv, default_format="csv")


def cmd_chord(args) -> int:
    _positive(args)
    shape = load_shape(args.shape)
    chords = chord_length_distribution(shape, n_lines=args.pairs, seed=args.seed)
    moments = crofton_moments(chords)
    e1, e1_err = chords.first_moment()
    payload = {
        "shape": shape.to_dict(),
        "n_lines": chords.n_lines,
        "hitting_measure": chords.hitting_measure,
        "hitting_measure_stderr": chords.hitting_measure_stderr(),
        "first_moment": e1,
        "first_moment_stderr": e1_err,
        "vol": moments.vol,
        "vol_stderr": moments.vol_stderr,
        "boundary": moments.boundary,
        "boundary_stderr": moments.boundary_stderr,
        "calibration": moments.calibration,
        "meta": _meta(args),
    }
    return _emit(args, payload, chords.write_csv)


def cmd_moebius(args) -> int:
    shape = load_shape(args.shape)
    energy = moebius_energy(shape, n_grid=args.grid)
    payload = {
        "shape": shape.to_dict(),
        "moebius_energy": energy,
        "b_minus2": energy - 4.0,
        "meta": {"version": __version__, "seed": args.seed, "grid": args.grid},
    }
    return _emit(args, payload)


def cmd_identify(args) -> int:
    _positive(args)
    shape = load_shape(args.shape)
    model = load_shape(args.model)
    budgets = Budgets(n_pairs=args.pairs, bins=args.bins, mode=args.mode)
    fp = fingerprint(shape, budgets, seed=args.seed)
    ref = fingerprint(model, budgets, seed=args.seed + 1)
    verdict = classify(fp, ref)
    payload = {
        "shape": shape.to_dict(),
        "model": model.to_dict(),
        "verdict": verdict.to_json_dict(),
        "meta": _meta(args),
    }
    return _emit(args, payload)


def cmd_caelli(args) -> int:
    _positive(args)
    if args.config:
        with open(args.config) as fh:
            config = CaelliConfig.from_json_dict(json.load(fh))
    else:
        config = default_caelli_config()
    validation = config.validate()
    x, xp = caelli_pair(config)
    dx = interpoint_cdf(x, n_pairs=args.pairs, seed=args.seed, mode="random")
    dxp = interpoint_cdf(xp, n_pairs=args.pairs, seed=args.seed + 1, mode="random")
    ks = two_sample_ks(dx, dxp)
    payload = {
        "config": config.to_json_dict(),
        "validation": {
            "om1_reflection": validation.om1_reflection,
            "om2_reflection": validation.om2_reflection,
            "om3_rotation": validation.om3_rotation,
            "om3_asymmetry": validation.om3_asymmetry,
            "degenerate": validation.degenerate,
        },
        "area_x": x.volume(),
        "area_sym_diff": x.region.symmetric_difference_area(xp.region),
        "ks": {
            "statistic": ks.statistic,
            "threshold": ks.threshold,
            "passed": ks.passed,
        },
        "meta": _meta(args, mode="random"),
    }
    return _emit(args, payload)


def cmd_tails(args) -> int:
    _positive(args)
    eps_list = _z_list(args.q) if args.q else [0.05, 0.1, 0.2]
    config = TwoSphereConfig.quadratic_bound_example()
    singles = []
    ratios = []
    for i, eps in enumerate(eps_list):
        t = single_sphere_tail(eps, n_pairs=args.pairs, seed=args.seed + i)
        singles.append(
            {
                "eps": eps,
                "value": t.value,
                "stderr": t.stderr,
                "exact": single_sphere_tail_exact(eps),
            }
        )
        r = tail_volume_ratio(config, eps, n_pairs=args.pairs, seed=args.seed + 100 + i)
        ratios.append(
            {
                "eps": eps,
                "value": r.value,
                "stderr": r.stderr,
                "bound": config.tail_constant * eps * eps,
            }
        )
    mimic = TwoSphereConfig.sphere_mimic()
    payload = {
        "single_sphere": singles,
        "two_sphere": {
            "r1": config.r1,
            "r2": config.r2,
            "separation": config.separation,
            "tail_constant": config.tail_constant,
            "ratios": ratios,
        },
        "sphere_mimic": {
            "r1": mimic.r1,
            "r2": mimic.r2,
            "separation": mimic.separation,
            "tail_constant": mimic.tail_constant,
            "documented_eps": mimic.documented_eps(),
        },
        "meta": _meta(args),
    }
    return _emit(args, payload)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riesz-lab",
        description="pair energies, meromorphic continuation, and "
        "distance-distribution geometry",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", help="Riesz energy at one or more exponents")
    p.add_argument("--shape", required=True, help="shape JSON file")
    p.add_argument("--z", action="append", default=[], help="exponent(s)")
    _add_common(p)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("beta", help="continued pair integral at given points")
    p.add_argument("--shape", required=True)
    p.add_argument("--z", action="append", default=[])
    _add_common(p)
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("residues", help="pole ladder with residues")
    p.add_argument("--shape", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_residues)

    p = sub.add_parser("distro", help="interpoint distance CDF (CSV)")
    p.add_argument("--shape", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_distro)

    p = sub.add_parser("chord", help="chord-length distribution and moments")
    p.add_argument("--shape", required=True)
    _add_common(p, pairs_default=200_000)
    p.set_defaults(func=cmd_chord)

    p = sub.add_parser("moebius", help="knot energy of a closed curve")
    p.add_argument("--shape", required=True)
    p.add_argument("--grid", type=int, default=4096, help="quadrature points")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.set_defaults(func=cmd_moebius)

    p = sub.add_parser("identify", help="ball / circle / sphere decision")
    p.add_argument("--shape", required=True)
    p.add_argument("--model", required=True, help="reference model JSON file")
    _add_common(p, pairs_default=8_000_000)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("caelli", help="equal-distribution pair experiment")
    p.add_argument("--config", default=None, help="config JSON (default builtin)")
    _add_common(p, pairs_default=300_000)
    p.set_defaults(func=cmd_caelli)

    p = sub.add_parser("tails", help="far-tail fractions and bounds")
    p.add_argument("--q", action="append", default=[], help="eps value(s)")
    _add_common(p)
    p.set_defaults(func=cmd_tails)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
