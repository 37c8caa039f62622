"""CSV and manifest output.

Floats are written with ``repr`` so every value reads back exactly.
"""

import csv
import hashlib
from pathlib import Path

import numpy as np

from ..metrics import to_db
from .config import dump_config
from .runner import ALGORITHMS

CURVE_COLUMNS = ("cycle", "algorithm", "msd_linear", "msd_db")
NODE_COLUMNS = ("node_id", "sigma2_true", "sigma2_est", "mu_k")
SUMMARY_COLUMNS = (
    "sweep_axis",
    "sweep_value",
    "algorithm",
    "steady_state_msd",
    "steady_state_msd_db",
    "convergence_cycles",
    "convergence_node_updates",
)


def _fmt(x):
    if x is None:
        return "not reached"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_csv(path, columns, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def write_curves(path, curves):
    rows = []
    for name in ALGORITHMS:
        values = curves[name]
        db = to_db(values)
        rows.extend((i + 1, name, float(v), float(g)) for i, (v, g) in enumerate(zip(values, db)))
    _write_csv(path, CURVE_COLUMNS, rows)


def write_nodes(path, diag):
    rows = zip(
        (int(k) for k in diag.node_id),
        (float(x) for x in diag.sigma2_true),
        (float(x) for x in diag.sigma2_est),
        (float(x) for x in diag.mu),
    )
    _write_csv(path, NODE_COLUMNS, rows)


def export_artifacts(artifacts, out_dir):
    """Write ``msd_curves.csv``, ``nodes.csv`` and ``manifest.txt`` to ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    curves_path = out / "msd_curves.csv"
    nodes_path = out / "nodes.csv"
    write_curves(curves_path, artifacts.curves)
    write_nodes(nodes_path, artifacts.diagnostics)

    lines = ["# config", dump_config(artifacts.config).rstrip("\n"), "# runs"]
    for i, (seed, digest) in enumerate(zip(artifacts.seeds, artifacts.stream_checksums)):
        lines.append(f"run_seed.{i} = {seed}")
        lines.append(f"stream_sha256.{i} = {digest}")
    lines.append("paired_stream_check = ok")
    lines.append("# results")
    for name in ALGORITHMS:
        for key, value in artifacts.summary[name].items():
            lines.append(f"{name}.{key} = {_fmt(value)}")
    lines.append("# artifacts")
    lines.append(f"sha256.msd_curves.csv = {_sha256(curves_path)}")
    lines.append(f"sha256.nodes.csv = {_sha256(nodes_path)}")
    lines.append(f"duration_seconds = {artifacts.duration_seconds:.3f}")
    manifest = out / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n")
    return {"msd_curves": curves_path, "nodes": nodes_path, "manifest": manifest}


def export_sweep(result, out_dir):
    """One artifact directory per sweep point plus ``summary.csv`` and ``checks.txt``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    axis = result.config.sweep_axis
    for value, art in result.points:
        export_artifacts(art, out / f"{axis}_{value}")
    rows = []
    for r in result.rows:
        ss = r["steady_state_msd"]
        rows.append(
            (
                r["sweep_axis"],
                r["sweep_value"],
                r["algorithm"],
                ss,
                float(to_db(ss)),
                r["convergence_cycles"],
                r["convergence_node_updates"],
            )
        )
    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, rows)
    checks = [f"{k} = {str(v).lower()}" for k, v in result.checks.items()]
    (out / "checks.txt").write_text("".join(c + "\n" for c in checks))
    return out / "summary.csv"


def read_curves(path):
    """Inverse of ``write_curves``: ``{algorithm: ndarray}``."""
    data = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            data.setdefault(row["algorithm"], []).append(float(row["msd_linear"]))
    return {k: np.array(v) for k, v in data.items()}


def read_nodes(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {
        "node_id": np.array([int(r["node_id"]) for r in rows]),
        "sigma2_true": np.array([float(r["sigma2_true"]) for r in rows]),
        "sigma2_est": np.array([float(r["sigma2_est"]) for r in rows]),
        "mu_k": np.array([float(r["mu_k"]) for r in rows]),
    }


def read_manifest(path):
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out
