"""Seeded, paired Monte-Carlo runs of IDLMS and the reliability-weighted variant.

Run ``r`` draws everything from a generator seeded with
``SeedSequence(master_seed, spawn_key=(r,)).generate_state(1, uint64)[0]``,
in this order: ``w_o`` (i.i.d. normal scaled by ``1/sqrt(dim)``), the node
variances, the regressors, the noise. Both algorithms then read the same
stream. Runs are evaluated in vectorised batches, but every reduction has a
fixed order, so a run's numbers do not depend on the batch it landed in.
"""

import hashlib
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..datagen import ModelParams, assign_node_variances, generate_stream
from ..incremental import idlms_arrays
from ..metrics import average_curves, convergence_time, msd_curve, steady_state_msd
from ..reliability import NodeDiagnostics, ReliabilityConfig, proposed_arrays
from .config import point_config

log = logging.getLogger(__name__)

ALGORITHMS = ("idlms", "proposed")


def derive_seed(master_seed, run_index):
    ss = np.random.SeedSequence(master_seed, spawn_key=(run_index,))
    return int(ss.generate_state(1, np.uint64)[0])


def stream_checksum(u, d):
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(u, dtype=np.float64).tobytes())
    h.update(np.ascontiguousarray(d, dtype=np.float64).tobytes())
    return h.hexdigest()


def make_run_data(cfg, run_index):
    """Model parameters and sample stream of run ``run_index``."""
    seed = derive_seed(cfg.master_seed, run_index)
    rng = np.random.default_rng(seed)
    w_o = rng.standard_normal(cfg.dim) / math.sqrt(cfg.dim)
    variances = assign_node_variances(cfg.n_nodes, cfg.variance_low, cfg.variance_high, rng)
    params = ModelParams(w_o=w_o, node_variances=variances)
    stream = generate_stream(params, cfg.n_cycles, rng, keep_noise=False)
    return params, stream, seed


def reliability_config(cfg):
    return ReliabilityConfig(
        ls=cfg.ls, a=cfg.a, mu_max=cfg.mu_max, normalization=cfg.variance_normalization
    )


@dataclass
class ExperimentResult:
    """One paired run."""

    run_index: int
    seed: int
    curves: dict
    diagnostics: NodeDiagnostics
    stream_sha256: str


def _run_batch(cfg, indices):
    data = [make_run_data(cfg, r) for r in indices]
    sums = [stream_checksum(s.u, s.d) for _, s, _ in data]
    u = np.stack([s.u for _, s, _ in data], axis=-1)
    d = np.stack([s.d for _, s, _ in data], axis=-1)
    w_o = np.stack([p.w_o for p, _, _ in data], axis=-1)
    sigma2 = [p.node_variances for p, _, _ in data]
    seeds = [seed for _, _, seed in data]
    del data[:]  # the stacked copies are all that is needed now

    base = idlms_arrays(u, d, cfg.mu_max, cfg.n_cycles, w_o=w_o)
    prop, est, mu = proposed_arrays(u, d, reliability_config(cfg), cfg.n_cycles, w_o=w_o)
    curves = {
        "idlms": msd_curve(base, cfg.msd_mode, cfg.msd_node),
        "proposed": msd_curve(prop, cfg.msd_mode, cfg.msd_node),
    }

    results = []
    for b, r in enumerate(indices):
        after = stream_checksum(u[..., b], d[..., b])
        if after != sums[b]:
            raise RuntimeError(f"run {r}: sample stream changed while being consumed")
        diag = NodeDiagnostics(
            node_id=np.arange(cfg.n_nodes),
            sigma2_true=sigma2[b],
            sigma2_est=est.sigma_tilde[:, b].copy(),
            mu=mu[:, b].copy(),
        )
        results.append(
            ExperimentResult(
                run_index=r,
                seed=seeds[b],
                curves={k: v[:, b].copy() for k, v in curves.items()},
                diagnostics=diag,
                stream_sha256=sums[b],
            )
        )
    return results


def run_experiment(cfg, run_index):
    """One paired run: both algorithms on the same stream."""
    return _run_batch(cfg, [run_index])[0]


@dataclass
class RunArtifacts:
    config: object
    curves: dict
    diagnostics: NodeDiagnostics
    seeds: list
    stream_checksums: list
    summary: dict
    duration_seconds: float = 0.0
    runs: list = field(default_factory=list, repr=False)


def summarize(curves, cfg):
    out = {}
    for name, c in curves.items():
        ct = convergence_time(c, cfg.threshold_factor, cfg.tail_fraction)
        out[name] = {
            "steady_state_msd": steady_state_msd(c, cfg.tail_fraction),
            "convergence_cycles": ct,
            "convergence_node_updates": None if ct is None else ct * cfg.n_nodes,
        }
    return out


def run_monte_carlo(cfg, keep_runs=False):
    """``cfg.n_runs`` paired runs, averaged per algorithm in run-index order.

    The exported node diagnostics are those of run 0.
    """
    if cfg.sweep_axis:
        raise ValueError("config describes a sweep; use run_sweep")
    t0 = time.perf_counter()
    per_run = {name: [] for name in ALGORITHMS}
    seeds, checksums, kept = [], [], []
    diagnostics = None
    for start in range(0, cfg.n_runs, cfg.batch_size):
        indices = list(range(start, min(start + cfg.batch_size, cfg.n_runs)))
        log.info("runs %d..%d of %d", indices[0], indices[-1], cfg.n_runs)
        try:
            batch = _run_batch(cfg, indices)
        except Exception as exc:
            raise RuntimeError(f"run batch starting at index {indices[0]} failed: {exc}") from exc
        for res in batch:
            for name in ALGORITHMS:
                per_run[name].append(res.curves[name])
            seeds.append(res.seed)
            checksums.append(res.stream_sha256)
            if res.run_index == 0:
                diagnostics = res.diagnostics
        if keep_runs:
            kept.extend(batch)
    curves = {name: average_curves(per_run[name]) for name in ALGORITHMS}
    return RunArtifacts(
        config=cfg,
        curves=curves,
        diagnostics=diagnostics,
        seeds=seeds,
        stream_checksums=checksums,
        summary=summarize(curves, cfg),
        duration_seconds=time.perf_counter() - t0,
        runs=kept,
    )


@dataclass
class SweepResult:
    config: object
    points: list
    rows: list
    checks: dict


def _monotone(values, increasing):
    if any(v is None for v in values):
        return False
    pairs = zip(values, values[1:])
    if increasing:
        return all(b >= a for a, b in pairs)
    return all(b <= a for a, b in pairs)


def run_sweep(cfg):
    """One Monte-Carlo experiment per value on ``cfg.sweep_axis``.

    Every point reuses the master seed, so run ``r`` of each point starts from
    the same seed. For the ``a`` and ``ls`` axes the summary records whether
    the proposed algorithm's steady-state MSD is non-increasing as the swept
    value grows; for ``a`` also whether its convergence time is
    non-decreasing.
    """
    points, rows = [], []
    for value in cfg.sweep_values:
        pcfg = point_config(cfg, value)
        log.info("sweep %s = %s", cfg.sweep_axis, value)
        art = run_monte_carlo(pcfg)
        points.append((value, art))
        for name in ALGORITHMS:
            s = art.summary[name]
            rows.append({"sweep_axis": cfg.sweep_axis, "sweep_value": value, "algorithm": name, **s})

    checks = {}
    if cfg.sweep_axis in ("a", "ls"):
        ordered = sorted(points, key=lambda p: p[0])
        ss = [p[1].summary["proposed"]["steady_state_msd"] for p in ordered]
        ct = [p[1].summary["proposed"]["convergence_cycles"] for p in ordered]
        checks["proposed_steady_state_nonincreasing"] = _monotone(ss, increasing=False)
        if cfg.sweep_axis == "a":
            checks["proposed_convergence_nondecreasing"] = _monotone(ct, increasing=True)
    return SweepResult(config=cfg, points=points, rows=rows, checks=checks)
