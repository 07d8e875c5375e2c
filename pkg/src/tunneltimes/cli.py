"""Command-line front end: run scenario files, emit CSV, plot data, figures.

Usage:

    tunneltimes scenario.yaml --out results/

Outputs land in the --out directory:

* results.csv        one row per scenario / scan point
* scan_<param>.dat   two-column series for a requested scan
* oracle_report.txt  operator-route cross-check, when the oracle task runs
* *.png              figures for the report and scan paths (--no-figures skips)

Exit codes: 0 on success, 1 on configuration errors, 2 when any row hit a
numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .barriers import (
    AttoclockBarrier,
    BarrierStack,
    attoclock_to_smooth,
    cos2_bump_barrier,
    gaussian_bump_barrier,
    sampled_barrier,
)
from .config import (
    TASKS,
    ConfigError,
    ScenarioConfig,
    SmoothConfig,
    StackConfig,
    parse_config,
)
from .kernel_oracle import delta_tau_zeta, region_map_calibration
from .traversal import (
    TraversalReport,
    attoclock_scan,
    dwell_time,
    traversal_time,
    traversal_time_smooth,
)
from .wavepackets import (
    GaussianPacket,
    Regime,
    classify_regime,
    density_of,
    signed_density_pair,
    truncate,
)

CSV_HEADER = ("scenario", "regime", "tau_trav", "tau_part", "tau_non",
              "tau_tun", "tau_dwell", "err_est", "wall_ms")


@dataclass
class ResultRow:
    """One CSV row; fields for tasks that did not run stay at 0."""

    scenario: str
    regime: str
    tau_trav: float = 0.0
    tau_part: float = 0.0
    tau_non: float = 0.0
    tau_tun: float = 0.0
    tau_dwell: float = 0.0
    err_est: float = 0.0
    wall_ms: float = 0.0

    def as_record(self) -> tuple[str, ...]:
        return (self.scenario, self.regime,
                *(format(v, ".15g") for v in (self.tau_trav, self.tau_part,
                                              self.tau_non, self.tau_tun,
                                              self.tau_dwell, self.err_est,
                                              self.wall_ms)))


@dataclass
class RunOutcome:
    rows: list[ResultRow]
    exit_code: int
    files: list[Path]


def _build_barrier(cfg: ScenarioConfig):
    bar = cfg.barrier
    if isinstance(bar, StackConfig):
        return BarrierStack.from_pairs(bar.segments, bar.b, cfg.units)
    if isinstance(bar, SmoothConfig):
        if bar.profile == "gaussian_bump":
            return gaussian_bump_barrier(bar.height, *bar.support,
                                         center=bar.center, width=bar.width,
                                         units=cfg.units)
        if bar.profile == "cos2_bump":
            return cos2_bump_barrier(bar.height, *bar.support, units=cfg.units)
        return sampled_barrier(bar.x, bar.v, units=cfg.units)
    return AttoclockBarrier(bar.z_eff, bar.i_p, bar.field)


def _build_density(cfg: ScenarioConfig):
    packet = GaussianPacket(q0=cfg.packet.q0, sigma=cfg.packet.sigma, k0=cfg.packet.k0)
    density = density_of(packet)
    if cfg.packet.truncation is not None:
        density = truncate(density, cfg.packet.truncation, cfg.quad)
    return packet, density


def _report_for(cfg: ScenarioConfig, density, barrier) -> TraversalReport:
    if isinstance(barrier, BarrierStack):
        return traversal_time(density, barrier, cfg.units, cfg.quad)
    if isinstance(barrier, AttoclockBarrier):
        barrier = attoclock_to_smooth(barrier, cfg.units)
    return traversal_time_smooth(density, barrier, cfg.units, cfg.quad)


def _classify_only(cfg: ScenarioConfig, density, barrier) -> Regime:
    if isinstance(barrier, BarrierStack):
        return classify_regime(density, barrier.kappa_min, barrier.kappa_max)
    if isinstance(barrier, AttoclockBarrier):
        barrier = attoclock_to_smooth(barrier, cfg.units)
    return classify_regime(density, 0.0, barrier.kappa_max)


def _oracle_report_text(cfg: ScenarioConfig, packet, stack: BarrierStack) -> tuple[str, bool]:
    lines = [f"oracle report for scenario '{cfg.scenario}'", ""]
    ok = True

    breakdown = delta_tau_zeta(packet, stack, cfg.units, cfg.quad,
                               n_sigmas=cfg.packet.n_sigmas)
    pair = signed_density_pair(packet)
    tau_k = dwell_time(pair, stack, cfg.units, cfg.quad)
    tau_z = breakdown.tau_barrier_part
    denom = max(abs(tau_k), 1e-300)
    rel = abs(tau_z - tau_k) / denom
    ok = ok and breakdown.converged
    lines += [
        "path equivalence (relative-coordinate route vs. wavenumber route):",
        f"  barrier term, zeta-space : {tau_z:.15g}",
        f"  dwell time,   k-space    : {tau_k:.15g}",
        f"  max relative deviation   : {rel:.3e}",
        f"  Im Q* = {breakdown.q_star.imag:.12g}   delta_tau = {breakdown.delta_tau:.12g}",
        "",
    ]

    if len(stack.segments) == 2:
        cal = region_map_calibration(stack, cfg.quad)
        lines.append("kernel region calibration (numeric integral vs. printed pieces):")
        for entry in cal.entries:
            lines.append(
                f"  interval ({entry.interval[0]:.6g}, {entry.interval[1]:.6g})"
                f" -> region {entry.region.value}: best '{entry.best_label}'"
                f" err {entry.best_max_err:.2e}; printed err {entry.printed_max_err:.2e}"
            )
            lines.append(f"    {entry.note}")
            ok = ok and entry.best_max_err < cal.tolerance
    else:
        lines.append("kernel region calibration skipped (needs exactly two segments)")
    return "\n".join(lines) + "\n", ok


def run(cfg: ScenarioConfig, out_dir: Path, *, make_figures: bool = True,
        quiet: bool = False) -> RunOutcome:
    """Execute the requested tasks and write all artifacts under out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files: list[Path] = []
    rows: list[ResultRow] = []
    exit_code = 0
    slug = "".join(c if c.isalnum() or c in "-_" else "_" for c in cfg.scenario)

    packet, density = _build_density(cfg)
    barrier = _build_barrier(cfg)
    tasks = cfg.tasks

    def say(msg):
        if not quiet:
            print(msg)

    t0 = time.perf_counter()
    row = ResultRow(scenario=cfg.scenario, regime="")
    report = None
    try:
        if {"traverse", "decompose"} & set(tasks):
            report = _report_for(cfg, density, barrier)
            row.regime = report.regime.value
            row.tau_trav = report.tau_trav
            row.tau_part = report.tau_part
            row.tau_non = report.tau_non
            row.tau_tun = report.tau_tun
            row.tau_dwell = report.tau_dwell
            row.err_est = report.diagnostics.err_total
            if not report.diagnostics.converged:
                exit_code = max(exit_code, 2)
        elif "classify" in tasks:
            row.regime = _classify_only(cfg, density, barrier).value
        if "dwell" in tasks:
            pair = signed_density_pair(packet)
            stack = barrier
            if not isinstance(stack, BarrierStack):
                raise ValueError("the dwell task requires a stack barrier")
            row.tau_dwell = dwell_time(pair, stack, cfg.units, cfg.quad)
            if not row.regime:
                row.regime = _classify_only(cfg, density, barrier).value
    except ValueError as exc:
        say(f"error in scenario '{cfg.scenario}': {exc}")
        row.regime = row.regime or "error"
        exit_code = max(exit_code, 2)
    row.wall_ms = 1e3 * (time.perf_counter() - t0)
    rows.append(row)

    if make_figures and ({"traverse", "decompose", "classify"} & set(tasks)):
        fig_barrier = barrier
        if isinstance(barrier, AttoclockBarrier):
            fig_barrier = attoclock_to_smooth(barrier, cfg.units)
        from .plots import scenario_figure

        fig_path = out_dir / f"report_{slug}.png"
        scenario_figure(fig_path, density, fig_barrier, report)
        files.append(fig_path)

    if "scan" in tasks and cfg.scan is not None:
        fields = np.linspace(cfg.scan.start, cfg.scan.stop, cfg.scan.steps)
        t0 = time.perf_counter()
        scan = attoclock_scan(barrier, fields, density, cfg.units, cfg.quad)
        per_row_ms = 1e3 * (time.perf_counter() - t0) / max(len(scan.entries), 1)
        for entry in scan.entries:
            rep = entry.report
            rows.append(ResultRow(
                scenario=f"{cfg.scenario}[field={entry.field:.6g}]",
                regime=rep.regime.value, tau_trav=rep.tau_trav,
                tau_part=rep.tau_part, tau_non=rep.tau_non, tau_tun=rep.tau_tun,
                tau_dwell=rep.tau_dwell, err_est=rep.diagnostics.err_total,
                wall_ms=per_row_ms,
            ))
            if not rep.diagnostics.converged:
                exit_code = max(exit_code, 2)
        for field, reason in scan.skipped:
            say(f"scan: skipped field={field:.6g}: {reason}")
        dat_path = out_dir / f"scan_{cfg.scan.param}.dat"
        with dat_path.open("w") as fh:
            fh.write(f"# {cfg.scan.param}  tau_part\n")
            for entry in scan.entries:
                fh.write(f"{entry.field:.15g} {entry.tau_part:.15g}\n")
        files.append(dat_path)
        say(f"scan: tau_part strictly decreasing: {scan.tau_part_strictly_decreasing}")
        if make_figures:
            from .plots import scan_figure

            fig_path = out_dir / f"scan_{cfg.scan.param}.png"
            scan_figure(fig_path, scan, cfg.scan.param)
            files.append(fig_path)

    if "oracle" in tasks:
        text, ok = _oracle_report_text(cfg, packet, barrier)
        oracle_path = out_dir / "oracle_report.txt"
        oracle_path.write_text(text)
        files.append(oracle_path)
        if not ok:
            exit_code = max(exit_code, 2)
        say(text)

    csv_path = out_dir / "results.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow(r.as_record())
    files.insert(0, csv_path)
    say(f"wrote {csv_path} ({len(rows)} row{'s' if len(rows) != 1 else ''})")
    return RunOutcome(rows=rows, exit_code=exit_code, files=files)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunneltimes",
        description="Compute quantum barrier traversal times from a scenario file.",
    )
    parser.add_argument("config", help="scenario YAML file")
    parser.add_argument("--task", action="append", default=None, metavar="NAME",
                        help="override config tasks (repeatable)")
    parser.add_argument("--out", default="out", metavar="DIR",
                        help="output directory (default: ./out)")
    parser.add_argument("--rel-tol", type=float, default=None, metavar="X",
                        help="override quadrature relative tolerance")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip rendering PNG figures")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
        if args.task:
            bad = [t for t in args.task if t not in TASKS]
            if bad:
                raise ConfigError([f"--task: unknown task {t!r}" for t in bad])
            cfg = replace(cfg, tasks=tuple(dict.fromkeys(args.task)))
            if "scan" in cfg.tasks and cfg.scan is None:
                raise ConfigError(["--task scan: config has no scan block"])
        if args.rel_tol is not None:
            if args.rel_tol <= 0:
                raise ConfigError(["--rel-tol: must be positive"])
            cfg = replace(cfg, quad=replace(cfg.quad, rel_tol=args.rel_tol))
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 1
    with warnings.catch_warnings():
        if args.quiet:
            warnings.simplefilter("ignore")
        outcome = run(cfg, Path(args.out), make_figures=not args.no_figures,
                      quiet=args.quiet)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
