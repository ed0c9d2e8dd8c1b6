"""Command-line front end.

Every scan takes ranges as ``from:to:count`` (a bare number is a
one-point range). Output goes to ``--out`` (atomic write) or stdout.
Exit codes: 0 success, 2 invalid input, 1 numerical or I/O failure.
See docs/FORMATS.md for the file schemas.
"""

import argparse
import itertools
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io as tio
from .husimi import GridTooSmallError, q_grid
from .majorana import RootFindingError, find_roots, polynomial_from_state, to_sphere
from .model import Couplings, triaxis_hamiltonian
from .semiclassical import ClassicalState, integrate_rk4
from .spectrum import GAP_THRESHOLD, SweepPointError, eigen_sweep, esqpt_estimate
from .spinalg import EigenConvergenceError, NotHermitianError, two_j_from
from .squeezing import FrameUndefinedError, mean_spin, squeezing_report, survival_curve
from .states import (BlochDirection, coherent_state, dicke_state, lowest_weight,
                     oat_state, tact_state, triaxis_state)

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


STATE_FILE_HELP = """state file: line 1 'two_j = <int>', then 2j+1 lines '<re> <im>' in
ascending-m order; rejected unless normalized to 1e-8 (see --renormalize)."""

FORMATS_HELP = {
    "spectrum": "CSV columns: mu0,k,E_k,parity (one row per grid point and level, "
                "parity +1 even / -1 odd). --esqpt CSV columns: mu0,dos_peak,gap_even,"
                "gap_even_energy,gap_odd,gap_odd_energy,min_normalized_gap,clustered.",
    "squeeze": "CSV columns: scan parameters, then xi2,phi_opt,mean_x,mean_y,mean_z,frame "
               "(frame = mean | fallback | undefined).",
    "husimi": "CSV columns: theta,phi,Q[,x,y,z]; rows theta-major, both angles ascending.",
    "majorana": "JSON object: two_j, roots [[re, im], ...], infinity_count, "
                "stars [[theta, phi], ...] (roots first, then stars at infinity).",
    "phase": "CSV columns: t,theta,phi,energy.",
    "survival": "CSV columns: t,P.",
    "state": STATE_FILE_HELP,
}


def parse_range(text, name):
    """``from:to:count`` -> array of ``count`` evenly spaced values."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            vals = np.array([v])
        elif len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise UsageError(f"--{name}: count must be >= 1")
            vals = np.linspace(lo, hi, n)
        else:
            raise UsageError(f"--{name}: expected 'from:to:count' or a number, got {text!r}")
    except ValueError:
        raise UsageError(f"--{name}: cannot parse {text!r} as 'from:to:count'")
    if not np.all(np.isfinite(vals)):
        raise UsageError(f"--{name}: values must be finite")
    return vals


def _finite(value, name):
    if value is None:
        return None
    if not math.isfinite(value):
        raise UsageError(f"--{name} must be finite")
    return value


def resolve_two_j(args, required=True):
    j, two_j = getattr(args, "j", None), getattr(args, "two_j", None)
    if j is not None and two_j is not None:
        raise UsageError("give only one of --j and --two-j")
    if two_j is not None:
        if two_j < 0:
            raise UsageError("--two-j must be non-negative")
        return two_j
    if j is not None:
        try:
            return two_j_from(j)
        except ValueError as exc:
            raise UsageError(f"--j: {exc}")
    if required:
        raise UsageError("one of --j or --two-j is required")
    return None


def _add_spin(p):
    g = p.add_argument_group("spin size")
    g.add_argument("--j", help="spin j as a half-integer, e.g. 10 or 1.5 or 3/2")
    g.add_argument("--two-j", type=int, help="twice the spin, N = 2j")


def _add_output(p, formats=("csv", "json")):
    p.add_argument("--out", default="-", help="output path ('-' for stdout, the default)")
    if formats:
        p.add_argument("--format", choices=formats, default=formats[0])


def _add_threads(p):
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for independent scan points")


def _add_state_spec(p):
    g = p.add_argument_group("state selection")
    g.add_argument("--state-file", help="read the state from a state file")
    g.add_argument("--renormalize", action="store_true",
                   help="accept and renormalize a state file whose norm is not 1")
    g.add_argument("--kind", choices=["lowest", "coherent", "dicke", "oat", "tact", "triaxis"],
                   help="generate the state instead of reading it")
    g.add_argument("--theta0", type=float, default=0.0, help="coherent/initial polar angle")
    g.add_argument("--phi0", type=float, default=0.0, help="coherent/initial azimuth")
    g.add_argument("--m", help="magnetic number for --kind dicke")
    g.add_argument("--mu", type=float, default=0.0, help="one-axis twist")
    g.add_argument("--nu", type=float, default=0.0, help="two-axis twist")
    g.add_argument("--mu0", type=float, default=0.0)
    g.add_argument("--mu1", type=float, default=0.0)
    g.add_argument("--mu2", type=float, default=0.0)


def _direction(theta, phi, what):
    _finite(theta, f"{what} theta")
    _finite(phi, f"{what} phi")
    if not 0.0 <= theta <= math.pi:
        raise UsageError(f"{what}: theta must lie in [0, pi]")
    return BlochDirection(theta, phi)


def resolve_state(args):
    """Build the state requested by the state-selection flags. Everything
    except the evolution itself is validated here; the returned thunk does
    the numerical work."""
    if args.state_file and args.kind:
        raise UsageError("give either --state-file or --kind, not both")
    if args.state_file:
        try:
            psi = tio.read_state_file(args.state_file, renormalize=args.renormalize)
        except tio.StateFileError as exc:
            raise UsageError(str(exc))
        return lambda: psi
    if not args.kind:
        raise UsageError("a state is required: pass --state-file or --kind")
    two_j = resolve_two_j(args)
    for name in ("mu", "nu", "mu0", "mu1", "mu2"):
        _finite(getattr(args, name), name)
    kind = args.kind
    if kind == "lowest":
        return lambda: lowest_weight(two_j)
    if kind == "coherent":
        d = _direction(args.theta0, args.phi0, "--theta0/--phi0")
        return lambda: coherent_state(two_j, d)
    if kind == "dicke":
        if args.m is None:
            raise UsageError("--kind dicke needs --m")
        try:
            psi = dicke_state(two_j, args.m)
        except ValueError as exc:
            raise UsageError(str(exc))
        return lambda: psi
    if kind == "oat":
        return lambda: oat_state(two_j, args.mu)
    if kind == "tact":
        return lambda: tact_state(two_j, args.nu)
    d = _direction(args.theta0, args.phi0, "--theta0/--phi0")
    return lambda: triaxis_state(two_j, (args.mu0, args.mu1, args.mu2), d)


def _check_threads(args):
    t = getattr(args, "threads", None)
    if t is not None and t < 1:
        raise UsageError("--threads must be a positive integer")
    return t


def _ordered_map(fn, items, threads):
    if not threads or threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _check_out(path, name):
    if path is None or path == "-":
        return
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise UsageError(f"--{name}: directory {parent} does not exist")
    if os.path.isdir(path):
        raise UsageError(f"--{name}: {path} is a directory")


def _emit_table(args, header, rows):
    if getattr(args, "format", "csv") == "json":
        return tio.table_json(header, rows)
    return tio.csv_text(header, rows)


# --- subcommands: each validates first and returns a callable doing the work


def cmd_spectrum(args):
    two_j = resolve_two_j(args)
    chi = _finite(args.chi, "chi")
    if not chi > 0:
        raise UsageError("--chi must be positive")
    grid = parse_range(args.mu0, "mu0")
    if grid.size < 2:
        raise UsageError("--mu0 needs at least 2 points")
    threads = _check_threads(args)
    if not 0 < args.gap_threshold:
        raise UsageError("--gap-threshold must be positive")

    def work():
        sweep = eigen_sweep(two_j, chi, grid[0], grid[-1], grid.size, threads=threads)
        rows = [(mu0, k, e, int(p))
                for mu0, lev, lab in zip(sweep.mu0_grid, sweep.levels, sweep.parity_labels)
                for k, (e, p) in enumerate(zip(lev, lab))]
        outputs = [(args.out, _emit_table(args, ["mu0", "k", "E_k", "parity"], rows))]
        if args.esqpt:
            rep = esqpt_estimate(sweep, threshold=args.gap_threshold)
            erows = []
            for mu0, peak, gaps, mn, cl in zip(rep.mu0_grid, rep.dos_peak, rep.gaps,
                                               rep.min_normalized_gap, rep.clustered):
                ge, go = gaps
                erows.append((mu0, peak, ge.size, ge.energy, go.size, go.energy, mn, bool(cl)))
            header = ["mu0", "dos_peak", "gap_even", "gap_even_energy", "gap_odd",
                      "gap_odd_energy", "min_normalized_gap", "clustered"]
            outputs.append((args.esqpt, _emit_table(args, header, erows)))
            region = rep.region
            msg = ("no clustering below threshold" if region is None else
                   f"clustering region mu0 in [{region[0]:.6g}, {region[1]:.6g}]")
            print(f"esqpt: {msg} (normalized gap threshold {tio.fmt(rep.threshold)})",
                  file=sys.stderr)
        return outputs
    return work


_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0),
         "-x": (-1.0, 0.0, 0.0), "-y": (0.0, -1.0, 0.0), "-z": (0.0, 0.0, -1.0)}


def cmd_squeeze(args):
    two_j = resolve_two_j(args)
    if two_j < 1:
        raise UsageError("squeezing needs j >= 1/2")
    threads = _check_threads(args)
    fallback = None if args.fallback_axis == "none" else _AXES[args.fallback_axis]
    if args.mode == "oat":
        names, grids = ["mu"], [parse_range(args.mu or "0", "mu")]
        make = lambda p: oat_state(two_j, p[0])  # noqa: E731
    elif args.mode == "tact":
        names, grids = ["nu"], [parse_range(args.nu or "0", "nu")]
        make = lambda p: tact_state(two_j, p[0])  # noqa: E731
    else:
        names = ["mu0", "mu1", "mu2"]
        grids = [parse_range(getattr(args, n) or "0", n) for n in names]
        init = _direction(args.theta0, args.phi0, "--theta0/--phi0")
        make = lambda p: triaxis_state(two_j, p, init)  # noqa: E731
    points = list(itertools.product(*grids))

    def one(p):
        psi = make(p)
        try:
            r, frame = squeezing_report(psi), "mean"
        except FrameUndefinedError:
            if fallback is None:
                m = mean_spin(psi)
                return (*p, float("nan"), float("nan"), *m, "undefined")
            r, frame = squeezing_report(psi, direction=fallback), "fallback"
        return (*p, r.xi2, r.phi_opt, *r.mean_spin, frame)

    def work():
        rows = _ordered_map(one, points, threads)
        header = names + ["xi2", "phi_opt", "mean_x", "mean_y", "mean_z", "frame"]
        return [(args.out, _emit_table(args, header, rows))]
    return work


def cmd_husimi(args):
    make = resolve_state(args)
    if args.n_theta < 2 or args.n_phi < 2:
        raise UsageError("--n-theta and --n-phi must be >= 2")

    def work():
        psi = make()
        try:
            g = q_grid(psi, args.n_theta, args.n_phi, cartesian=args.cartesian,
                       require_exact=args.exact)
        except GridTooSmallError as exc:
            raise UsageError(str(exc))
        header = ["theta", "phi", "Q"] + (["x", "y", "z"] if args.cartesian else [])
        rows = []
        for a, th in enumerate(g.theta_nodes):
            for b, ph in enumerate(g.phi_nodes):
                row = [th, ph, g.values[a, b]]
                if args.cartesian:
                    row += list(g.cartesian[a, b])
                rows.append(row)
        return [(args.out, _emit_table(args, header, rows))]
    return work


def cmd_majorana(args):
    make = resolve_state(args)

    def work():
        psi = make()
        c = to_sphere(find_roots(polynomial_from_state(psi)))
        doc = {
            "two_j": psi.two_j,
            "roots": [[z.real, z.imag] for z in c.finite_roots],
            "infinity_count": c.infinity_count,
            "stars": [[p.theta, p.phi] for p in c.sphere_points],
        }
        return [(args.out, tio.json_text(doc))]
    return work


def cmd_phase(args):
    for name in ("chi0", "chi1", "chi2", "theta0", "phi0", "dt"):
        _finite(getattr(args, name), name)
    if not args.dt > 0:
        raise UsageError("--dt must be positive")
    if args.steps < 0:
        raise UsageError("--steps must be non-negative")
    if args.stride < 1:
        raise UsageError("--stride must be >= 1")
    if not 1e-9 < args.theta0 < math.pi - 1e-9:
        raise UsageError("--theta0 must lie strictly between the poles")

    def work():
        tr = integrate_rk4(ClassicalState(args.theta0, args.phi0),
                           Couplings(args.chi0, args.chi1, args.chi2), args.dt, args.steps)
        idx = np.arange(0, tr.t.size, args.stride)
        if idx[-1] != tr.t.size - 1:
            idx = np.append(idx, tr.t.size - 1)
        rows = [(tr.t[i], tr.theta[i], tr.phi[i], tr.energy[i]) for i in idx]
        if tr.terminated:
            print(f"phase: trajectory reached a pole at t={tio.fmt(tr.t[-1])}", file=sys.stderr)
        return [(args.out, _emit_table(args, ["t", "theta", "phi", "energy"], rows))]
    return work


def cmd_survival(args):
    make = resolve_state(args)
    times = parse_range(args.t, "t")
    for name in ("chi0", "chi1", "chi2"):
        _finite(getattr(args, name), name)

    def work():
        psi = make()
        h = triaxis_hamiltonian(psi.two_j, Couplings(args.chi0, args.chi1, args.chi2))
        p = survival_curve(psi, h, times)
        return [(args.out, _emit_table(args, ["t", "P"], list(zip(times, p))))]
    return work


def cmd_state(args):
    make = resolve_state(args)
    return lambda: [(args.out, tio.format_state(make()))]


def build_parser():
    ap = argparse.ArgumentParser(
        prog="triaxis",
        description="Tri-axis spin squeezing: spectra, squeezing scans, Husimi-Q, "
                    "Majorana constellations and classical trajectories.",
        epilog="Ranges use 'from:to:count'. Exit codes: 0 ok, 2 invalid input, "
               "1 numerical or I/O failure.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("spectrum", help="parity-resolved rotor spectrum along mu0",
                       description="Sweep H'(chi0 = mu0 chi, chi). " + FORMATS_HELP["spectrum"])
    _add_spin(p)
    p.add_argument("--chi", type=float, default=1.0)
    p.add_argument("--mu0", required=True, help="mu0 range from:to:count")
    p.add_argument("--esqpt", help="also write per-point gap/DOS indicators to this path")
    p.add_argument("--gap-threshold", type=float, default=GAP_THRESHOLD,
                   help="normalized gap below which a point counts as clustered")
    _add_threads(p)
    _add_output(p)
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser("squeeze", help="squeezing parameter scan",
                       description=FORMATS_HELP["squeeze"])
    p.add_argument("--mode", choices=["oat", "tact", "triaxis"], required=True)
    _add_spin(p)
    p.add_argument("--mu", help="oat: mu range")
    p.add_argument("--nu", help="tact: nu range")
    p.add_argument("--mu0", help="triaxis: mu0 range or value")
    p.add_argument("--mu1", help="triaxis: mu1 range or value")
    p.add_argument("--mu2", help="triaxis: mu2 range or value")
    p.add_argument("--theta0", type=float, default=0.0, help="triaxis initial direction")
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--fallback-axis", choices=["none"] + sorted(_AXES), default="none",
                   help="reference axis used where the mean spin vanishes")
    _add_threads(p)
    _add_output(p)
    p.set_defaults(handler=cmd_squeeze)

    p = sub.add_parser("husimi", help="Husimi-Q on a Gauss-Legendre x uniform grid",
                       description=FORMATS_HELP["husimi"] + " " + STATE_FILE_HELP)
    _add_spin(p)
    _add_state_spec(p)
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--n-phi", type=int, default=128)
    p.add_argument("--cartesian", action="store_true", help="add x,y,z = Q * unit vector")
    p.add_argument("--exact", action="store_true",
                   help="require a grid on which the quadrature is exact")
    _add_output(p)
    p.set_defaults(handler=cmd_husimi)

    p = sub.add_parser("majorana", help="Majorana constellation as JSON",
                       description=FORMATS_HELP["majorana"] + " " + STATE_FILE_HELP)
    _add_spin(p)
    _add_state_spec(p)
    _add_output(p, formats=None)
    p.set_defaults(handler=cmd_majorana)

    p = sub.add_parser("phase", help="classical RK4 trajectory",
                       description=FORMATS_HELP["phase"])
    p.add_argument("--chi0", type=float, required=True)
    p.add_argument("--chi1", type=float, default=0.0)
    p.add_argument("--chi2", type=float, default=0.0)
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--stride", type=int, default=1, help="write every n-th step")
    _add_output(p)
    p.set_defaults(handler=cmd_phase)

    p = sub.add_parser("survival", help="survival probability under the tri-axis H",
                       description=FORMATS_HELP["survival"] + " " + STATE_FILE_HELP)
    _add_spin(p)
    _add_state_spec(p)
    p.add_argument("--chi0", type=float, default=1.0)
    p.add_argument("--chi1", type=float, default=0.0)
    p.add_argument("--chi2", type=float, default=0.0)
    p.add_argument("--t", required=True, help="time range from:to:count")
    _add_output(p)
    p.set_defaults(handler=cmd_survival)

    p = sub.add_parser("state", help="write amplitudes in the state-file format",
                       description=STATE_FILE_HELP)
    _add_spin(p)
    _add_state_spec(p)
    _add_output(p, formats=None)
    p.set_defaults(handler=cmd_state)
    return ap


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with status 2 on bad flags
    try:
        work = args.handler(args)
        for name in ("out", "esqpt"):
            _check_out(getattr(args, name, None), name)
        outputs = work()
        for path, text in outputs:
            tio.write_text(path, text)
    except UsageError as exc:
        print(f"triaxis {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EigenConvergenceError, RootFindingError, SweepPointError, NotHermitianError,
            ArithmeticError, FloatingPointError) as exc:
        print(f"triaxis {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        where = f" ({exc.filename})" if exc.filename else ""
        print(f"triaxis {args.command}: I/O error{where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
