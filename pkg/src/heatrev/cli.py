"""Command-line front door.

Subcommands: ``simulate`` (trajectory CSV), ``check`` (thresholds and
feasibility report), ``scan`` (grid CSV), ``eigenops`` (shell/ladder report
for user matrices), ``verify`` (the acceptance suite as a pass/fail table).

Exit codes: 0 success, 1 I/O failure, 2 invalid physics input,
3 verification failure. All temperatures on the command line are the
dimensionless products omega*beta; energies are reported in units of omega
and times in units of 1/G(+omega). Output is deterministic: identical
configuration gives byte-identical CSV.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import dynamics, eigenops, pairtls, reversal, thermo
from .dynamics import format_float
from .qcore import (
    DensityOperator,
    HermitianObservable,
    PositivityError,
    load_matrix,
)
from .verification import VerificationSuite

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_VERIFY_FAILED = 3


@dataclass
class RunConfig:
    """Validated command parameters (one instance per invocation)."""

    command: str
    beta_s_omega: float | None = None
    beta_b_omega: float | None = None
    re_alpha: float = 0.0
    im_alpha: float = 0.0
    mode: str = "collective"
    method: str = "analytic"
    t_max: float = 3.0
    n_steps: int = 200
    g_plus: float = 1.0
    output: str | None = None
    beta_s_values: tuple[float, ...] | None = None
    beta_b_values: tuple[float, ...] | None = None
    alpha_policy: object = "zero"
    diag: bool = False
    hamiltonian_path: str | None = None
    coupling_path: str | None = None
    state_path: str | None = None
    degeneracy_tol: float | None = None
    omega: float | None = None
    only: str | None = None


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _parse_range(spec: str) -> tuple[float, ...]:
    """Parse 'value' or 'start:stop:step' (inclusive endpoints)."""
    parts = spec.split(":")
    if len(parts) == 1:
        return (float(parts[0]),)
    if len(parts) != 3:
        raise CommandError(EXIT_INVALID, f"bad range spec {spec!r}; use start:stop:step")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise CommandError(EXIT_INVALID, f"bad range spec {spec!r}: need step > 0, stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(n))


def _parse_alpha_policy(spec: str):
    if spec in ("min", "max", "zero"):
        return spec
    if spec.startswith("list:"):
        try:
            values = tuple(float(v) for v in spec[5:].split(",") if v)
        except ValueError as exc:
            raise CommandError(EXIT_INVALID, f"bad alpha list {spec!r}: {exc}") from exc
        if not values:
            raise CommandError(EXIT_INVALID, "alpha list is empty")
        return values
    raise CommandError(EXIT_INVALID, f"unknown alpha policy {spec!r} (min, max, zero, list:v1,v2,...)")


def _open_output(cfg: RunConfig):
    """Returns (stream, close_needed, csv_on_stdout)."""
    if cfg.output is None or cfg.output == "-":
        return sys.stdout, False, True
    try:
        return open(cfg.output, "w", encoding="utf-8", newline="\n"), True, False
    except OSError as exc:
        raise CommandError(EXIT_IO, f"cannot open output {cfg.output!r}: {exc}") from exc


def _require(cfg: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise CommandError(EXIT_INVALID, f"--{name.replace('_omega', '').replace('_', '-')} is required")


def cmd_simulate(cfg: RunConfig) -> int:
    _require(cfg, "beta_s_omega", "beta_b_omega")
    if cfg.t_max <= 0 or cfg.n_steps < 1:
        raise CommandError(EXIT_INVALID, "need t_max > 0 and n_steps >= 1")
    if cfg.method not in ("analytic", "ode"):
        raise CommandError(EXIT_INVALID, f"unknown method {cfg.method!r}")
    if cfg.mode not in ("collective", "independent"):
        raise CommandError(EXIT_INVALID, f"unknown mode {cfg.mode!r}")
    try:
        pair_cfg = pairtls.PairConfig(cfg.beta_s_omega, cfg.re_alpha + 1j * cfg.im_alpha)
    except PositivityError as exc:
        raise CommandError(EXIT_INVALID, f"invalid alpha: {exc}") from exc
    try:
        bath = thermo.BathSpec(cfg.beta_b_omega, g_plus=cfg.g_plus)
    except ValueError as exc:
        raise CommandError(EXIT_INVALID, str(exc)) from exc

    t_grid = np.linspace(0.0, cfg.t_max, cfg.n_steps + 1)
    if cfg.method == "analytic":
        if cfg.mode == "collective":
            traj = dynamics.analytic_pair_trajectory(pair_cfg, bath, t_grid)
        else:
            traj = dynamics.independent_pair_trajectory(pair_cfg, bath, t_grid)
    else:
        gen = dynamics.pair_generator(bath, mode=cfg.mode)
        traj = dynamics.integrate(pairtls.pair_initial_state(pair_cfg), gen, t_grid)
    dynamics.trajectory_observables(traj, cfg.beta_s_omega, cfg.beta_b_omega)

    stream, close_needed, csv_on_stdout = _open_output(cfg)
    try:
        dynamics.write_trajectory_csv(traj, stream)
    finally:
        if close_needed:
            stream.close()

    e0 = traj.records[0].e_over_omega
    if cfg.mode == "collective":
        e_inf = pairtls.steady_energy(cfg.beta_s_omega, cfg.beta_b_omega, cfg.re_alpha)
        permanent = reversal.verdict(
            cfg.beta_s_omega, cfg.beta_b_omega, cfg.re_alpha
        ).permanent_reversal
    else:
        y = math.exp(-cfg.beta_b_omega)
        e_inf = 2.0 * y / (1.0 + y)
        permanent = False
    summary = (
        f"E0={format_float(e0)} E_inf={format_float(e_inf)} "
        f"permanent_reversal={1 if permanent else 0}"
    )
    print(summary, file=sys.stderr if csv_on_stdout else sys.stdout)
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    _require(cfg, "beta_s_omega", "beta_b_omega")
    if cfg.beta_b_omega == 0.0:
        raise CommandError(EXIT_INVALID, "thresholds are singular at omega*beta_B = 0")
    a, b = cfg.beta_s_omega, cfg.beta_b_omega
    v = reversal.verdict(a, b, cfg.re_alpha)
    bounds = reversal.feasibility_bounds(a)
    lines = [
        f"alpha_c = {v.alpha_c:.9g}",
        f"alpha_p = {v.alpha_p:.9g}",
        f"alpha_max = {v.alpha_max:.9g}",
        f"feasible = {'yes' if v.feasible else 'no'}",
    ]
    if bounds.applicable:
        lines.append(
            f"heating_reversal_min_beta_b = {bounds.min_beta_b_omega_for_heating_reversal:.9g}"
        )
        lines.append(
            f"cooling_reversal_max_beta_b = {bounds.max_beta_b_omega_for_cooling_reversal:.9g}"
        )
    else:
        lines.append("heating_reversal_min_beta_b = n/a")
        lines.append("cooling_reversal_max_beta_b = n/a")
    if cfg.re_alpha != 0.0 or cfg.im_alpha != 0.0:
        lines.append(f"initial_reversal = {'yes' if v.initial_reversal else 'no'}")
        lines.append(f"permanent_reversal = {'yes' if v.permanent_reversal else 'no'}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    if cfg.beta_b_values is None:
        raise CommandError(EXIT_INVALID, "--beta-b range is required")
    if cfg.diag and cfg.beta_s_values is not None:
        raise CommandError(EXIT_INVALID, "--diag scans take only --beta-b")
    if not cfg.diag and cfg.beta_s_values is None:
        raise CommandError(EXIT_INVALID, "--beta-s range is required unless --diag")
    try:
        cells = reversal.scan_region(
            cfg.beta_s_values, cfg.beta_b_values, cfg.alpha_policy, diag=cfg.diag
        )
    except (ValueError, PositivityError) as exc:
        raise CommandError(EXIT_INVALID, str(exc)) from exc
    stream, close_needed, _ = _open_output(cfg)
    try:
        reversal.write_scan_csv(cells, stream)
    finally:
        if close_needed:
            stream.close()
    return EXIT_OK


def _print_matrix(matrix: np.ndarray) -> None:
    for row in matrix:
        print("    " + "  ".join(f"{v.real:+.6g}{v.imag:+.6g}j" for v in row))


def cmd_eigenops(cfg: RunConfig) -> int:
    _require(cfg, "hamiltonian_path", "coupling_path")
    try:
        h_matrix = load_matrix(cfg.hamiltonian_path)
        a_matrix = load_matrix(cfg.coupling_path)
        state_matrix = load_matrix(cfg.state_path) if cfg.state_path else None
    except OSError as exc:
        raise CommandError(EXIT_IO, f"cannot read input: {exc}") from exc
    except ValueError as exc:
        raise CommandError(EXIT_INVALID, str(exc)) from exc
    try:
        hamiltonian = HermitianObservable(h_matrix)
        coupling = HermitianObservable(a_matrix)
    except ValueError as exc:
        raise CommandError(EXIT_INVALID, str(exc)) from exc

    shells = eigenops.spectral_groups(hamiltonian, cfg.degeneracy_tol)
    print("shells:")
    for shell in shells:
        print(f"  energy = {shell.energy:.9g}  multiplicity = {shell.multiplicity}")
    components = eigenops.build_eigenoperators(hamiltonian, coupling, cfg.degeneracy_tol)
    print("frequency map:")
    for nu in sorted(components):
        print(f"  nu = {nu:+.9g}")
        _print_matrix(components[nu])
    try:
        pair = eigenops.ladder_pair(hamiltonian, coupling, cfg.omega, cfg.degeneracy_tol)
    except eigenops.MultiFrequencyError as exc:
        raise CommandError(
            EXIT_INVALID,
            f"not a single-transition coupling; frequencies {list(exc.frequencies)}",
        ) from exc
    except eigenops.ZeroCouplingError as exc:
        raise CommandError(EXIT_INVALID, str(exc)) from exc
    print(f"single transition at omega = {pair.frequency:.9g}; lowering operator:")
    _print_matrix(pair.lowering)
    if state_matrix is not None:
        try:
            rho = DensityOperator(state_matrix)
        except (ValueError, PositivityError) as exc:
            raise CommandError(EXIT_INVALID, f"invalid state: {exc}") from exc
        apparent = thermo.apparent_temperature(rho, pair)
        print(f"beta_app_omega = {apparent.beta_app_omega:.9g}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    suite = VerificationSuite()
    try:
        results = suite.run(only=cfg.only)
    except ValueError as exc:
        raise CommandError(EXIT_INVALID, str(exc)) from exc
    width = max(len(r.check_id) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failed += 0 if r.passed else 1
        print(
            f"{status} criterion={r.criterion} {r.check_id.ljust(width)}  "
            f"{r.observed}  [{r.tolerance}]"
        )
    if failed:
        print(f"{failed} of {len(results)} checks failed")
        return EXIT_VERIFY_FAILED
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heatrev",
        description=(
            "Collective-dissipation heat-flow reversal: trajectories, thresholds, "
            "scans, and verification. Temperatures are omega*beta (dimensionless); "
            "energies are in units of omega, times in 1/G(+omega)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="evolve a correlated pair and emit the trajectory CSV")
    sim.add_argument("--beta-s", type=float, required=True, help="omega*beta_S (units 1/omega)")
    sim.add_argument("--beta-b", type=float, required=True, help="omega*beta_B (units 1/omega)")
    sim.add_argument("--re-alpha", type=float, default=0.0)
    sim.add_argument("--im-alpha", type=float, default=0.0)
    sim.add_argument("--mode", choices=("collective", "independent"), default="collective")
    sim.add_argument("--method", choices=("analytic", "ode"), default="analytic")
    sim.add_argument("--t-max", type=float, default=3.0, help="horizon in units 1/G+")
    sim.add_argument("--n-steps", type=int, default=200)
    sim.add_argument("--g-plus", type=float, default=1.0)
    sim.add_argument("--output", default=None, help="CSV path (default stdout)")

    chk = sub.add_parser("check", help="closed-form thresholds and feasibility for one point")
    chk.add_argument("--beta-s", type=float, required=True)
    chk.add_argument("--beta-b", type=float, required=True)
    chk.add_argument("--re-alpha", type=float, default=0.0)

    scn = sub.add_parser("scan", help="evaluate thresholds and steady changes over a grid")
    scn.add_argument("--beta-s", default=None, help="range start:stop:step or single value")
    scn.add_argument("--beta-b", required=True, help="range start:stop:step or single value")
    scn.add_argument("--alpha-policy", default="zero",
                     help="min | max | zero | list:v1,v2,...")
    scn.add_argument("--diag", action="store_true",
                     help="scan the diagonal beta_S = beta_B over the --beta-b range")
    scn.add_argument("--output", default=None)

    eig = sub.add_parser("eigenops", help="shells, frequency map, and ladder pair for user matrices")
    eig.add_argument("--hamiltonian", required=True, help="JSON matrix file")
    eig.add_argument("--coupling", required=True, help="JSON matrix file")
    eig.add_argument("--state", default=None, help="optional JSON density matrix")
    eig.add_argument("--tol", type=float, default=None, help="degeneracy tolerance")
    eig.add_argument("--omega", type=float, default=None, help="expected transition frequency")

    ver = sub.add_parser("verify", help="run the acceptance checks")
    ver.add_argument("--only", default=None, help="run a single named check")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if args.command in ("simulate", "check"):
        cfg.beta_s_omega = args.beta_s
        cfg.beta_b_omega = args.beta_b
        cfg.re_alpha = args.re_alpha
        if args.command == "simulate":
            cfg.im_alpha = args.im_alpha
            cfg.mode = args.mode
            cfg.method = args.method
            cfg.t_max = args.t_max
            cfg.n_steps = args.n_steps
            cfg.g_plus = args.g_plus
            cfg.output = args.output
    elif args.command == "scan":
        cfg.beta_s_values = _parse_range(args.beta_s) if args.beta_s else None
        cfg.beta_b_values = _parse_range(args.beta_b)
        cfg.alpha_policy = _parse_alpha_policy(args.alpha_policy)
        cfg.diag = args.diag
        cfg.output = args.output
    elif args.command == "eigenops":
        cfg.hamiltonian_path = args.hamiltonian
        cfg.coupling_path = args.coupling
        cfg.state_path = args.state
        cfg.degeneracy_tol = args.tol
        cfg.omega = args.omega
    elif args.command == "verify":
        cfg.only = args.only
    return cfg


_DISPATCH = {
    "simulate": cmd_simulate,
    "check": cmd_check,
    "scan": cmd_scan,
    "eigenops": cmd_eigenops,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return _DISPATCH[args.command](cfg)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
