"""Run outputs: trajectory CSV, nodal snapshots, manifest, and plot data."""
import csv
import platform
from pathlib import Path

import numpy as np
import scipy
import yaml

from . import __version__
from .errors import UnknownField

TRAJECTORY_FILE = "trajectory.csv"
MANIFEST_FILE = "manifest.yaml"
SNAPSHOT_DIR = "snapshots"

ENERGY_COLUMNS = ("kinetic", "potential", "external_work", "dissipated", "total")
DIAG_COLUMNS = ("lambda", "lambda_free", "p_elec")
NORM_COLUMNS = ("y", "displacement", "ys_t", "ys_c")
SOLVER_COLUMNS = ("newton_iters", "residual")
TRAJECTORY_COLUMNS = (("step", "t") + ENERGY_COLUMNS + DIAG_COLUMNS
                      + tuple(f"{n}_rms" for n in NORM_COLUMNS) + SOLVER_COLUMNS)
NODAL_FIELDS = ("y", "x", "displacement", "ys_t", "ys_c")
PLOT_GROUPS = {
    "energy": ("kinetic", "potential", "dissipated", "total"),
    "work": ("external_work",),
    "lambda": ("lambda", "lambda_free", "p_elec"),
    "norms": tuple(f"{n}_rms" for n in NORM_COLUMNS),
    "newton": SOLVER_COLUMNS,
}


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def trajectory_rows(traj):
    for i, rec in enumerate(traj.steps):
        d = rec.diagnostics
        row = [i, rec.t] + [d[k] for k in ENERGY_COLUMNS + DIAG_COLUMNS]
        row += [d["fields"][n] for n in NORM_COLUMNS] + [int(d["newton_iters"]), d["residual"]]
        yield row


def write_trajectory_csv(traj, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for row in trajectory_rows(traj):
            w.writerow([_fmt(v) for v in row])


def nodal_table(layout, u):
    """Per-node columns: X, y, x, electronic pair (zero on free-space nodes)."""
    mesh = layout.mesh
    y, x, ys = layout.split(u)
    tron = np.zeros((layout.n_nodes, 2, 3))
    tron[layout.matter_nodes] = ys
    cols = {"node": np.arange(layout.n_nodes)}
    for i, c in enumerate("XYZ"):
        cols[c] = mesh.X[:, i]
    cols["y"] = y
    for i in range(3):
        cols[f"x{i + 1}"] = x[:, i]
    for s, name in enumerate(("ys_t", "ys_c")):
        for i in range(3):
            cols[f"{name}{i + 1}"] = tron[:, s, i]
    cols["matter"] = np.isin(np.arange(layout.n_nodes), layout.matter_nodes).astype(int)
    return cols


def write_snapshot(layout, rec, path):
    cols = nodal_table(layout, rec.u)
    names = list(cols)
    with open(path, "w", newline="") as fh:
        fh.write(f"# t = {_fmt(rec.t)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for r in range(len(cols["node"])):
            w.writerow([_fmt(cols[n][r]) for n in names])


def write_snapshots(traj, directory, stride=1):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    n = len(traj)
    for i in range(n):
        if i % stride and i != n - 1:
            continue
        p = directory / f"step_{i:06d}.csv"
        write_snapshot(traj.layout, traj[i], p)
        paths.append(p)
    return paths


def versions():
    import numpy
    import pydantic

    return {"photomech": __version__, "python": platform.python_version(),
            "numpy": numpy.__version__, "scipy": scipy.__version__,
            "pydantic": pydantic.__version__, "pyyaml": yaml.__version__}


def write_manifest(cfg_dict, path, wall_time, extra=None):
    doc = {"config": cfg_dict, "versions": versions(), "wall_time_s": float(wall_time)}
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        yaml.safe_dump(doc, fh, sort_keys=False)


def read_manifest(path):
    with open(path) as fh:
        return yaml.safe_load(fh)


# -- plot data ---------------------------------------------------------------------
def read_trajectory_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {h: data[:, i] for i, h in enumerate(header)}


def _read_snapshot(path):
    with open(path, newline="") as fh:
        first = fh.readline()
        t = float(first.split("=")[1])
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float)
    return t, {h: data[:, i] for i, h in enumerate(header)}


def _nodal_history_from_snapshots(run_dir):
    snaps = sorted((Path(run_dir) / SNAPSHOT_DIR).glob("step_*.csv"))
    out = []
    for p in snaps:
        out.append(_read_snapshot(p))
    return out


def _nodal_columns(field, table, node):
    if field == "y":
        return {"y": table["y"][node]}
    if field == "x":
        return {f"x{i}": table[f"x{i}"][node] for i in (1, 2, 3)}
    if field == "displacement":
        return {f"u{i}": table[f"x{i}"][node] - table["XYZ"[i - 1]][node] for i in (1, 2, 3)}
    return {f"{field}{i}": table[f"{field}{i}"][node] for i in (1, 2, 3)}


def _write_columns(path, columns, units):
    names = list(columns)
    with open(path, "w", newline="") as fh:
        fh.write(f"# units: {units}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        n = len(columns[names[0]])
        for r in range(n):
            w.writerow([_fmt(columns[c][r]) for c in names])


def emit_plot_data(source, fields, out_dir, probe=None, units="nondimensional"):
    """Write one comma-separated file per requested field.

    source is a Trajectory or a run directory / trajectory CSV written by
    ``photomech run``.  Scalar groups: energy, work, lambda, norms,
    newton.  Nodal fields (y, x, displacement, ys_t, ys_c) are sampled at
    the mesh node nearest to `probe`.
    """
    for f in fields:
        if f not in PLOT_GROUPS and f not in NODAL_FIELDS:
            raise UnknownField(f"unknown field {f!r}; known: "
                               f"{sorted(PLOT_GROUPS) + list(NODAL_FIELDS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if hasattr(source, "steps"):
        table = {h: np.array(col) for h, col in zip(TRAJECTORY_COLUMNS, zip(*trajectory_rows(source)))}
        snapshots = [(rec.t, nodal_table(source.layout, rec.u)) for rec in source.steps]
    else:
        src = Path(source)
        run_dir = src if src.is_dir() else src.parent
        table = read_trajectory_csv(run_dir / TRAJECTORY_FILE if src.is_dir() else src)
        snapshots = None
    written = []
    for f in fields:
        path = out_dir / f"{f}.csv"
        if f in PLOT_GROUPS:
            cols = {"t": table["t"]}
            cols.update({c: table[c] for c in PLOT_GROUPS[f]})
        else:
            if snapshots is None:
                snapshots = _nodal_history_from_snapshots(run_dir)
            if not snapshots:
                raise UnknownField(f"nodal field {f!r} requested but no snapshots are available")
            t0, first = snapshots[0]
            pts = np.stack([first["X"], first["Y"], first["Z"]], axis=1)
            target = np.zeros(3) if probe is None else np.asarray(probe, dtype=float)
            node = int(np.argmin(np.linalg.norm(pts - target, axis=1)))
            if f.startswith("ys") and not first["matter"][node]:
                raise UnknownField(f"{f!r} is undefined at free-space node {node}")
            cols = {"t": np.array([t for t, _ in snapshots])}
            per = [_nodal_columns(f, tab, node) for _, tab in snapshots]
            for key in per[0]:
                cols[key] = np.array([p[key] for p in per])
        _write_columns(path, cols, units)
        written.append(path)
    return written
