"""Command line entry point: run, verify, plot."""
import argparse
import os
import sys
import time
from pathlib import Path

from .errors import ConfigError, PhotomechError, UnknownField

OUTPUT_ENV = "PHOTOMECH_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def output_directory(cfg, override=None):
    base = override or os.environ.get(OUTPUT_ENV)
    if base:
        return Path(base) / cfg.name
    return Path(cfg.outputs.directory)


def run(config_path, output=None, quiet=False):
    """Solve one scenario and write trajectory CSV, snapshots and manifest."""
    from . import io
    from .scenario import config_to_dict, execute, load_config

    cfg = load_config(config_path)
    out = output_directory(cfg, output)
    t0 = time.perf_counter()
    problem, traj = execute(cfg)
    wall = time.perf_counter() - t0
    out.mkdir(parents=True, exist_ok=True)
    io.write_trajectory_csv(traj, out / io.TRAJECTORY_FILE)
    io.write_snapshots(traj, out / io.SNAPSHOT_DIR, cfg.outputs.snapshot_stride)
    io.write_manifest(config_to_dict(cfg), out / io.MANIFEST_FILE, wall,
                      extra={"steps": len(traj), "ndof": problem.layout.ndof})
    if not quiet:
        print(f"{cfg.name}: {len(traj)} states, {problem.layout.ndof} dofs, "
              f"{wall:.2f} s -> {out}")
    return out


def _probe(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("probe must be x,y,z") from None
    if len(vals) != 3:
        raise argparse.ArgumentTypeError("probe must be x,y,z")
    return vals


def build_parser():
    ap = argparse.ArgumentParser(prog="photomech",
                                 description="Photo-active continuum simulation kernel.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="solve a scenario configuration")
    r.add_argument("config", help="YAML scenario file or bundled scenario name")
    r.add_argument("-o", "--output", help=f"output root (overrides ${OUTPUT_ENV})")
    r.add_argument("-q", "--quiet", action="store_true")
    v = sub.add_parser("verify", help="run the identity-verification suite")
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--inject-fault", dest="fault", help=argparse.SUPPRESS)
    p = sub.add_parser("plot", help="write columnar plot data from a run")
    p.add_argument("trajectory", help="run directory or trajectory CSV")
    p.add_argument("--fields", nargs="+", required=True)
    p.add_argument("--probe", type=_probe, default=None, help="x,y,z for nodal histories")
    p.add_argument("-o", "--output", help="directory for plot files (default: <run>/plot)")
    sub.add_parser("scenarios", help="list bundled scenarios")
    return ap


def _resolve_config(name):
    from .scenario import bundled_scenarios

    path = Path(name)
    if path.exists():
        return path
    for cand in bundled_scenarios():
        if cand.stem == name:
            return cand
    return path


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            run(_resolve_config(args.config), args.output, args.quiet)
            return EXIT_OK
        if args.command == "verify":
            from .verification import verify

            report = verify(args.level, args.seed, fault=args.fault)
            return EXIT_OK if report["passed"] else EXIT_FAIL
        if args.command == "plot":
            from .io import emit_plot_data

            src = Path(args.trajectory)
            run_dir = src if src.is_dir() else src.parent
            out = Path(args.output) if args.output else run_dir / "plot"
            units = "nondimensional"
            manifest = run_dir / "manifest.yaml"
            if manifest.exists():
                from .io import read_manifest

                units = read_manifest(manifest)["config"].get("units", units)
            for path in emit_plot_data(src, args.fields, out, args.probe, units):
                print(path)
            return EXIT_OK
        if args.command == "scenarios":
            from .scenario import bundled_scenarios

            for p in bundled_scenarios():
                print(p.stem)
            return EXIT_OK
    except (ConfigError, UnknownField) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PhotomechError, FileNotFoundError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
