"""Command line entry point.

Exit codes: 0 success, 1 configuration error, 2 leakage floor breached,
3 I/O error.
"""
import argparse
import os
import sys


from .basis import build_basis
from .evolution import LeakageFloorError, evolve
from .kick import KickParams, build_kick_matrix_bessel
from .oracle import compare_trajectories, run_grid, write_discrepancy_csv
from .scenario import ConfigError, initial_state, list_presets, parse_config, resolve, run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_LEAKAGE, EXIT_IO = 0, 1, 2, 3


def _read_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def cmd_simulate(args):
    target = _read_config(args.config) if args.config else args.preset
    out = args.out or (args.preset if args.preset else "run")
    paths, series = run_scenario(target, out, n_max=args.nmax, n_kicks=args.kicks,
                                 dump_kick=args.dump_kick, load_kick=args.load_kick)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_list(args):
    for p in list_presets():
        c = p.config
        print(f"{p.name:15s} eps={c.epsilon:<5g} T={c.T:<7g} lambda={c.wavelength:<4g} "
              f"n_max={c.n_max:<5d} kicks={c.n_kicks:<5d} tag={p.tag}")
    return EXIT_OK


def cmd_validate(args):
    cfg = _read_config(args.config)
    print(f"ok: n_max={cfg.n_max} epsilon={cfg.epsilon:g} T={cfg.T:g} n_kicks={cfg.n_kicks}")
    return EXIT_OK


def cmd_oracle(args):
    cfg = resolve(args.preset, n_max=args.nmax, n_kicks=args.kicks)
    basis = build_basis(cfg.L, cfg.n_max)
    params = KickParams(cfg.epsilon, cfg.wavelength, cfg.T, cfg.kick_phase)
    op = build_kick_matrix_bessel(basis, params)
    history = {}
    state0 = initial_state(cfg, basis)
    state0.renormalize = False
    evolve(state0, op, cfg.n_kicks, basis, order=cfg.order, norm_floor=0.0,
           observers=[lambda s: history.__setitem__(s.kicks_elapsed, s.A)])
    n_grid = args.n_grid or max(4096, 16 * cfg.n_max)
    run = run_grid(state0.A, basis, params, cfg.n_kicks, n_grid, args.substeps, cfg.order)
    rows = compare_trajectories(history, run, basis, cfg.T)
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        write_discrepancy_csv(args.out, rows)
    worst = max(r.l2_distance for r in rows)
    last = rows[-1]
    print(f"max l2_distance={worst:.3e} final grid_norm={last.grid_norm:.12f} "
          f"spectral_norm={last.spectral_norm:.12f}")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="kicked-dirac", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a config file or preset")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--config")
    src.add_argument("--preset")
    sim.add_argument("--out")
    sim.add_argument("--nmax", type=int)
    sim.add_argument("--kicks", type=int)
    sim.add_argument("--dump-kick", help="write the kick matrix in KICKMAT1 format")
    sim.add_argument("--load-kick", help="reuse a KICKMAT1 kick matrix")
    sim.set_defaults(func=cmd_simulate)

    sub.add_parser("list-presets", help="show built-in scenarios").set_defaults(func=cmd_list)

    val = sub.add_parser("validate", help="parse a config file and report errors")
    val.add_argument("--config", required=True)
    val.set_defaults(func=cmd_validate)

    orc = sub.add_parser("oracle-check", help="compare against the grid integrator")
    orc.add_argument("--preset", required=True)
    orc.add_argument("--kicks", type=int, required=True)
    orc.add_argument("--nmax", type=int)
    orc.add_argument("--n-grid", type=int)
    orc.add_argument("--substeps", type=int, default=64)
    orc.add_argument("--out", help="discrepancy CSV path")
    orc.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LeakageFloorError as exc:
        print(f"leakage floor: {exc}", file=sys.stderr)
        return EXIT_LEAKAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
