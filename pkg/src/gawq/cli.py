"""Command-line interface: `gawq <subcommand> <config> [--out DIR]`.

Subcommands and their artifacts (all CSVs carry a header row and
full-precision scientific notation; repeated runs are byte-identical):

  spectrum     spectrum.csv           reflection/transmission over a k grid
  singularity  singularities.csv      real-axis scattering divergences
  poles        poles.csv              Siegert poles at the configured gamma
  trajectory   trajectory.csv         poles per gamma over a sweep grid
  modes        profiles_p<i>.csv,     bound-state site profiles and
               coefficients.csv       packet expansion coefficients
  evolve       snapshots.csv,         wave-packet run: densities, series,
               observables.csv,       and a key-value fit report
               fits.txt
  dump         (stdout)               canonical config round-trip
  verify       verify_report.txt      full acceptance suite

Exit codes: 0 ok, 2 config error, 3 numerical error, 4 boundary violation,
5 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import acceptance
from .config import RunConfig, dump_config, parse_config_file, pole_box
from .dynamics import (
    clean_flank_window,
    evolve,
    fit_growth_rate,
    fit_spatial_slope,
    init_gaussian,
    init_gaussian_at_arrival,
    make_lattice,
    plateau_stats,
    plateau_window,
)
from .errors import (
    BoundaryViolationError,
    ConfigError,
    GawqError,
    NonNormalizableStateError,
    NumericalError,
)
from .model import dispersion
from .modes import (
    bound_profile,
    decomposition_coefficient,
    normalization_factor,
    overlap_coefficient,
)
from .output import atomic_write_text, format_number, write_csv
from .scattering import spectrum_sweep
from .spectral import find_singularities, solve_poles, trajectory_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_BOUNDARY = 4
EXIT_VERIFY = 5


def _require(cfg: RunConfig, attr: str, command: str) -> None:
    if getattr(cfg, attr) is None:
        raise ConfigError(f"`{command}` requires the `{attr.replace('_', '.')}` block")


def cmd_spectrum(cfg: RunConfig, out: Path) -> int:
    _require(cfg, "grid", "spectrum")
    results = spectrum_sweep(cfg.system, cfg.grid.points())
    rows = [
        (res.k, float(dispersion(cfg.system, res.k)), res.r.real, res.r.imag,
         res.t.real, res.t.imag, res.R, res.T, res.flux_sum, int(res.singular))
        for res in results
    ]
    write_csv(
        out / "spectrum.csv",
        ["k", "omega_k", "Re_r", "Im_r", "Re_t", "Im_t", "R", "T", "flux_sum", "singular_flag"],
        rows,
    )
    print(f"wrote {out / 'spectrum.csv'} ({len(rows)} rows)")
    return EXIT_OK


def cmd_singularity(cfg: RunConfig, out: Path) -> int:
    points = find_singularities(cfg.system)
    write_csv(
        out / "singularities.csv",
        ["k", "gamma", "omega", "residual"],
        [(p.k, p.gamma, p.omega, p.residual) for p in points],
    )
    print(f"wrote {out / 'singularities.csv'} ({len(points)} roots)")
    return EXIT_OK


def _pole_rows(gamma: float, poles) -> list[tuple]:
    return [
        (gamma, q.k_n.real, q.k_n.imag, q.E_n.real, q.E_n.imag,
         q.classification, q.residual, q.branch)
        for q in poles
    ]


def cmd_poles(cfg: RunConfig, out: Path) -> int:
    poles = solve_poles(cfg.system, pole_box(cfg))
    write_csv(
        out / "poles.csv",
        ["gamma", "Re_k", "Im_k", "Re_E", "Im_E", "class", "residual", "branch"],
        _pole_rows(cfg.system.gamma, poles),
    )
    print(f"wrote {out / 'poles.csv'} ({len(poles)} poles)")
    return EXIT_OK


def cmd_trajectory(cfg: RunConfig, out: Path) -> int:
    _require(cfg, "sweep", "trajectory")
    rows = []
    for gamma, poles in trajectory_sweep(cfg.system, cfg.sweep.points(), box=pole_box(cfg)):
        rows.extend(_pole_rows(gamma, poles))
    write_csv(
        out / "trajectory.csv",
        ["gamma", "Re_k", "Im_k", "Re_E", "Im_E", "class", "residual", "branch"],
        rows,
    )
    print(f"wrote {out / 'trajectory.csv'} ({len(rows)} rows)")
    return EXIT_OK


def cmd_modes(cfg: RunConfig, out: Path) -> int:
    _require(cfg, "packet", "modes")
    poles = solve_poles(cfg.system, pole_box(cfg))
    coeff_rows = []
    for idx, pole in enumerate(poles):
        try:
            nf = normalization_factor(cfg.system, pole, kind="bilinear")
        except NonNormalizableStateError:
            nf = None  # in-continuum: report the un-normalized profile
        prof_rows = []
        for j in range(-80, cfg.system.N + 81):
            amp = bound_profile(cfg.system, pole, j, norm_factor=nf)
            prof_rows.append((j, amp.real, amp.imag, abs(amp) ** 2))
        write_csv(
            out / f"profiles_p{idx}.csv",
            ["j", "Re_amp", "Im_amp", "abs2"],
            prof_rows,
        )
        if nf is None:
            c = overlap_coefficient(cfg.system, pole, cfg.packet, norm_factor=None)
            coeff_rows.append((idx, c.real, c.imag, float("nan"), float("nan")))
        else:
            coeff = decomposition_coefficient(cfg.system, pole, cfg.packet)
            coeff_rows.append((idx, coeff.C_n.real, coeff.C_n.imag,
                               coeff.A_n.real, coeff.A_n.imag))
    write_csv(
        out / "coefficients.csv",
        ["pole_id", "Re_C", "Im_C", "Re_A", "Im_A"],
        coeff_rows,
    )
    print(f"wrote {out / 'coefficients.csv'} ({len(poles)} poles)")
    return EXIT_OK


def cmd_evolve(cfg: RunConfig, out: Path) -> int:
    _require(cfg, "packet", "evolve")
    _require(cfg, "evolve", "evolve")
    if cfg.lattice_sites is None:
        raise ConfigError("`evolve` requires `lattice.sites`")
    ev = cfg.evolve
    j_min, j_max = make_lattice(cfg.lattice_sites, cfg.system.N)
    if ev.start_at_arrival:
        state = init_gaussian_at_arrival(cfg.system, cfg.packet, j_min, j_max)
    else:
        state = init_gaussian(cfg.system, cfg.packet, j_min, j_max)
    obs = evolve(
        cfg.system, state, ev.t_end, ev.snapshots, ev.tol, edge_guard=ev.edge_guard
    )

    snap_rows = []
    for t, P in obs.snapshots:
        for offset, p in enumerate(P):
            snap_rows.append((t, j_min + offset, p))
    write_csv(out / "snapshots.csv", ["t", "j", "P"], snap_rows)

    write_csv(
        out / "observables.csv",
        ["t", "R_L", "T_L", "interior", "atom_prob", "total_norm"],
        zip(obs.times, obs.R_L, obs.T_L, obs.interior_prob, obs.atom_prob, obs.total_norm),
    )

    report = _fit_report(cfg, obs)
    atomic_write_text(out / "fits.txt", report)
    print(f"wrote {out / 'snapshots.csv'}, {out / 'observables.csv'}, {out / 'fits.txt'}")
    return EXIT_OK


def _fit_report(cfg: RunConfig, obs) -> str:
    """Key-value fit summary; inapplicable entries are reported as n/a."""
    lines = []
    final_idx = -1
    lines.append(f"final_time = {format_number(obs.times[final_idx])}")
    lines.append(f"final_R_L = {format_number(obs.R_L[final_idx])}")
    lines.append(f"final_T_L = {format_number(obs.T_L[final_idx])}")
    lines.append(f"final_total_norm = {format_number(obs.total_norm[final_idx])}")

    growth_window = (1900.0, 2500.0)
    try:
        rate = fit_growth_rate(obs, growth_window)
        obs.fitted_growth_rate = rate
        lines.append(f"growth_rate[{growth_window[0]:g},{growth_window[1]:g}] = {format_number(rate)}")
    except (ValueError, NumericalError):
        lines.append("growth_rate = n/a")

    slope_done = False
    for t_snap, P in obs.snapshots:
        if abs(t_snap - 2200.0) < 1e-9:
            for side in ("left", "right"):
                try:
                    window = clean_flank_window(P, obs.j_min, cfg.system, side)
                    slope = fit_spatial_slope(P, obs.j_min, side, window)
                except (ValueError, NumericalError):
                    lines.append(f"spatial_slope_{side} = n/a")
                    continue
                if side == "left":
                    obs.fitted_left_slope = slope
                else:
                    obs.fitted_right_slope = slope
                lines.append(
                    f"spatial_slope_{side}[{window[0]},{window[1]}] = {format_number(slope)}"
                )
                slope_done = True
    if not slope_done:
        lines.append("spatial_slope = n/a (no snapshot at t=2200)")

    plateau_done = False
    for t_snap, P in obs.snapshots:
        if abs(t_snap - 160.0) < 1e-9 and cfg.packet is not None:
            try:
                window = plateau_window(cfg.system, cfg.packet, t_snap)
                slope_abs, ratio, level = plateau_stats(P, obs.j_min, window)
            except (ValueError, NumericalError):
                continue
            obs.plateau_flatness = ratio
            lines.append(f"plateau_abs_ln_slope[t=160] = {format_number(slope_abs)}")
            lines.append(f"plateau_max_min_ratio[t=160] = {format_number(ratio)}")
            lines.append(f"plateau_level[t=160] = {format_number(level)}")
            plateau_done = True
    if not plateau_done:
        lines.append("plateau = n/a (no snapshot at t=160)")
    return "\n".join(lines) + "\n"


def cmd_dump(cfg: RunConfig, out: Path) -> int:
    del out
    sys.stdout.write(dump_config(cfg))
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    suite = acceptance.AcceptanceSuite()
    results = suite.run_all()
    lines = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"[{status}] criterion {res.index:>2}: {res.name} ({res.elapsed:.1f}s) {res.detail}"
        print(line)
        lines.append(line)
    atomic_write_text(out / "verify_report.txt", "\n".join(lines) + "\n")
    print(f"wrote {out / 'verify_report.txt'}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {
    "spectrum": cmd_spectrum,
    "singularity": cmd_singularity,
    "poles": cmd_poles,
    "trajectory": cmd_trajectory,
    "modes": cmd_modes,
    "evolve": cmd_evolve,
    "dump": cmd_dump,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gawq",
        description="waveguide-plus-emitter transport calculations from flat key-value configs",
    )
    parser.add_argument("subcommand", choices=sorted(COMMANDS))
    parser.add_argument("config", help="path to a key-value config file")
    parser.add_argument("--out", default=None, help="output directory (overrides out.dir)")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config_file(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out) if args.out is not None else cfg.out_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"config error: cannot create output directory {out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        return COMMANDS[args.subcommand](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BoundaryViolationError as exc:
        print(f"boundary violation: {exc}", file=sys.stderr)
        return EXIT_BOUNDARY
    except (GawqError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
