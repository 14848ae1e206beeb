"""Command-line front end.

    hiddentime verify-spinors [--config FILE] [--seed N] [--format json|csv] [--out PATH]
    hiddentime winding        [--config FILE] ...
    hiddentime bw             [--order N] ...
    hiddentime simulate       [--n SAMPLES] [--partitions K] ...

Exit status is 0 when every check passes, 1 when any check fails and 2
for usage or configuration errors.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .config import RunConfig, build_config, load_document
from .dirac_verify import (
    dirac_residual,
    sandwich_identity,
    standard_gamma_set,
    time_field,
)
from .errors import ConfigError, DomainError
from .geometry import (
    FourMomentum,
    angles_from_velocity,
    hyperbolic_constraint_residual,
    reduced_coordinates,
    unit_time_vector,
)
from .hidden_time_sim import TwoSlitConfig, histogram, two_slit_experiment
from .hopf import (
    WindingNumber,
    bw_product,
    bw_residual,
    loop_samples,
    quantization_defect,
    symmetrize,
    symmetry_defect,
    winding_turns,
)
from .report import Report
from .spinors import Branch, lorentz_norm, plane_wave, spinor

MAX_BW_ORDER = 4


def random_kinematics(rng: np.random.Generator, count: int, max_speed: float = 0.99) -> list[dict]:
    """Masses uniform in [0.1, 10], speeds uniform in [0, max_speed], isotropic directions."""
    cases = []
    for _ in range(count):
        m = float(rng.uniform(0.1, 10.0))
        speed = float(rng.uniform(0.0, max_speed))
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        cases.append({"m": m, "v": [float(c) for c in speed * direction]})
    return cases


def cmd_verify_spinors(cfg: RunConfig) -> Report:
    tol = cfg.tolerances
    report = Report("verify-spinors", cfg.seed, __version__)
    g = standard_gamma_set()
    rng = np.random.default_rng(cfg.seed)
    cases = list(cfg.kinematics) + random_kinematics(rng, cfg.random_cases)
    for case in cases:
        m, v = case["m"], case["v"]
        op_mass = case.get("operator_mass", m)
        inputs = {"m": m, "v": v}
        if "operator_mass" in case:
            inputs["operator_mass"] = op_mass
        for branch in Branch:
            state = plane_wave(spinor(m, v, branch))
            r = dirac_residual(state, g, mass=op_mass)
            report.add(f"dirac_residual[{branch.value}]", inputs, r, tol["dirac_residual"], r < tol["dirac_residual"])
            norm = lorentz_norm(state.spinor)
            report.add(
                f"lorentz_norm[{branch.value}]", inputs, norm, tol["lorentz_norm"],
                abs(norm - branch.sign) < tol["lorentz_norm"],
            )
            s = sandwich_identity(state, g)
            expected = branch.sign * m
            report.add(
                f"sandwich[{branch.value}]", inputs, s.real, tol["sandwich"],
                abs(s.real - expected) < tol["sandwich"] and abs(s.imag) < tol["sandwich"],
            )
        angles = angles_from_velocity(v)
        c = angles.coord()
        h = hyperbolic_constraint_residual(*reduced_coordinates(c))
        report.add("hyperbolic_constraint", inputs, h, tol["hyperbolic"], abs(h) < tol["hyperbolic"])
        p = FourMomentum.from_velocity(m, v)
        contraction = time_field(c, p).contract(unit_time_vector(c))
        report.add(
            "time_field", inputs, contraction, tol["time_field"],
            abs(abs(contraction) - m) < tol["time_field"],
        )
    return report


def cmd_winding(cfg: RunConfig) -> Report:
    tol = cfg.tolerances
    report = Report("winding", cfg.seed, __version__)
    for value in cfg.g_values:
        w = WindingNumber.of(value)
        inputs = {"g": str(w.g), "samples": cfg.loop_samples}
        defect = quantization_defect(w)
        admissible = defect < tol["quantization"]
        report.add("quantization", inputs, defect, tol["quantization"], admissible)
        turns = winding_turns(loop_samples(w, cfg.loop_samples))
        residue = abs(turns - round(turns))
        integral = residue < tol["winding_residue"]
        agrees = integral == admissible and (not admissible or round(turns) == -2 * w.g)
        report.add("winding_agreement", inputs, turns, tol["winding_residue"], agrees)
    return report


def cmd_bw(cfg: RunConfig) -> Report:
    if not (1 <= cfg.order <= MAX_BW_ORDER):
        raise ConfigError(f"order must lie in 1..{MAX_BW_ORDER}, got {cfg.order}", "order")
    tol = cfg.tolerances
    report = Report("bw", cfg.seed, __version__)
    g = standard_gamma_set()
    rng = np.random.default_rng(cfg.seed)
    for case in random_kinematics(rng, cfg.bw_cases):
        m, v = case["m"], case["v"]
        inputs = {"m": m, "v": v, "order": cfg.order}
        up = spinor(m, v, Branch.POS_UP)
        M = bw_product([up] * cfg.order)
        for k in range(1, cfg.order + 1):
            r = bw_residual(M, g, k)
            report.add(f"bw_residual[{k}]", inputs, r, tol["bw_residual"], r < tol["bw_residual"])
        sym = symmetry_defect(M)
        report.add("symmetry", inputs, sym, tol["symmetry"], sym < tol["symmetry"])
        if cfg.order == 1:
            d = dirac_residual(plane_wave(up), g)
            gap = abs(bw_residual(M, g, 1) - d)
            report.add("consistency_n1", inputs, gap, tol["bw_residual"], gap < tol["bw_residual"])
        else:
            down = spinor(m, v, Branch.POS_DOWN)
            mixed = symmetrize(bw_product([up] + [down] * (cfg.order - 1)))
            for k in range(1, cfg.order + 1):
                r = bw_residual(mixed, g, k)
                report.add(f"bw_residual_mixed[{k}]", inputs, r, tol["bw_residual"], r < tol["bw_residual"])
    return report


def cmd_simulate(cfg: RunConfig) -> Report:
    if cfg.n < 1:
        raise ConfigError(f"sample count must be >= 1, got {cfg.n}", "n")
    sigmas = cfg.tolerances["sigmas"]
    report = Report("simulate", cfg.seed, __version__)
    if isinstance(cfg.experiment, TwoSlitConfig):
        result = two_slit_experiment(cfg.experiment, cfg.n, cfg.seed, cfg.partitions)
    else:
        dist, bins = cfg.experiment
        result = histogram(dist, bins, cfg.n, cfg.seed, cfg.partitions)
    for row in result.rows(sigmas):
        inputs = {"bin": row.bin, "analytic_p": row.analytic_p, "n": cfg.n}
        report.add(f"bin[{row.bin}]", inputs, row.mc_freq, row.bound, row.passed)
        report.rows.append(
            {"bin": row.bin, "analytic_p": row.analytic_p, "mc_freq": row.mc_freq, "bound": row.bound, "pass": row.passed}
        )
    return report


COMMANDS = {
    "verify-spinors": cmd_verify_spinors,
    "winding": cmd_winding,
    "bw": cmd_bw,
    "simulate": cmd_simulate,
}


def _u64(text: str) -> int:
    value = int(text, 0)
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hiddentime", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML configuration document")
        p.add_argument("--seed", type=_u64)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--n", type=int, help="Monte Carlo sample count")
        p.add_argument("--order", type=int, help="Bargmann-Wigner order")
        p.add_argument("--partitions", type=int, help="worker count for sampling")
    return parser


def run(argv: list[str] | None = None) -> tuple[int, str, RunConfig]:
    """Parse arguments and run the command; returns ``(exit_status, rendered_output, config)``."""
    args = build_parser().parse_args(argv)
    doc = load_document(args.config) if args.config else None
    cfg = build_config(
        args.command,
        doc,
        seed=args.seed,
        output_format=args.format,
        output_path=args.out,
        n=args.n,
        order=args.order,
        partitions=args.partitions,
    )
    report = COMMANDS[args.command](cfg)
    text = report.to_json() if cfg.output_format == "json" else report.to_csv()
    return (0 if report.ok else 1), text, cfg


def main(argv: list[str] | None = None) -> int:
    try:
        status, text, cfg = run(argv)
    except (ConfigError, DomainError) as exc:
        print(f"hiddentime: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
