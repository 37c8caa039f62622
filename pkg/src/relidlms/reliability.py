"""Reliability-weighted incremental LMS.

Phase 1 runs plain IDLMS with step ``mu_max`` for ``ls`` cycles while every
node keeps its raw samples. The estimate leaving the last node after cycle
``ls`` serves as a reference; each node's residuals against it give a noise
variance estimate ``sigma_k``, mapped to a step size

    mu_k = mu_max * exp(-a * sigma_k).

Phase 2 continues IDLMS from the reference with these per-node steps on the
samples from cycle ``ls + 1`` on. Phase-1 samples are only used for the
variance estimate.
"""

from dataclasses import dataclass

import numpy as np

from ._ops import exp_elementwise, seq_sum
from .errors import ConfigError, ContractError
from .incremental import StepSizeProfile, run_cycles

NORMALIZATIONS = ("normalized", "literal")


@dataclass(frozen=True)
class ReliabilityConfig:
    """Phase-1 length, step-size gain and global step size.

    ``normalization="literal"`` drops the ``1/ls`` factor of the variance
    estimate (a plain sum of squared deviations). That sum grows with ``ls``
    and drives every step size to zero, so it exists only for comparison.
    """

    ls: int = 20
    a: float = 10.0
    mu_max: float = 0.01
    normalization: str = "normalized"

    def __post_init__(self):
        if int(self.ls) != self.ls or self.ls < 1:
            raise ConfigError(f"ls must be an integer >= 1, got {self.ls}")
        if not self.a >= 0:
            raise ConfigError(f"a must be >= 0, got {self.a}")
        if not self.mu_max > 0:
            raise ConfigError(f"mu_max must be > 0, got {self.mu_max}")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )


@dataclass(frozen=True)
class NoiseEstimate:
    """Residuals (``ls`` along axis 0), their mean and the variance estimate per node."""

    residuals: np.ndarray
    mean: np.ndarray
    sigma_tilde: np.ndarray


@dataclass(frozen=True)
class NodeDiagnostics:
    node_id: np.ndarray
    sigma2_true: np.ndarray
    sigma2_est: np.ndarray
    mu: np.ndarray


def _check_stream(params, stream, needed):
    if stream.n_nodes != params.n_nodes or stream.dim != params.dim:
        raise ContractError("stream dimensions do not match model parameters")
    if stream.n_cycles < needed:
        raise ConfigError(f"stream has {stream.n_cycles} cycles, {needed} required")


def run_phase1(params, stream, cfg):
    """Warm-up IDLMS over ``cfg.ls`` cycles.

    Returns
    -------
    psi_ref : ndarray, shape (M,)
        Estimate after the last node of cycle ``ls``.
    buffers : list of (ndarray, ndarray)
        Per node, its ``ls`` regressor rows ``(ls, M)`` and measurements ``(ls,)``.
    """
    _check_stream(params, stream, cfg.ls)
    traj = _phase1(stream.u, stream.d, cfg, params.w_o)
    buffers = [(stream.u[: cfg.ls, k], stream.d[: cfg.ls, k]) for k in range(params.n_nodes)]
    return traj.final, buffers


def _phase1(u, d, cfg, w_o=None):
    mu = np.full(u.shape[1], float(cfg.mu_max))
    return run_cycles(u, d, mu, np.zeros(u.shape[2:]), 0, cfg.ls, w_o)


def compute_residuals(buffer, psi_ref):
    """``d - u @ psi_ref`` for every buffered sample.

    ``buffer`` is ``(u, d)`` with the sample index on axis 0, or a list of
    ``(u, d)`` pairs. Extra axes (nodes, runs) broadcast against ``psi_ref``.
    """
    if isinstance(buffer, list):
        if not buffer:
            raise ContractError("empty sample buffer")
        u = np.array([p[0] for p in buffer], dtype=float)
        d = np.array([p[1] for p in buffer], dtype=float)
    else:
        u, d = (np.asarray(x, dtype=float) for x in buffer)
    psi_ref = np.asarray(psi_ref, dtype=float)
    if u.shape[0] == 0:
        raise ContractError("empty sample buffer")
    m_axis = u.ndim - psi_ref.ndim
    if m_axis < 1 or u.shape[m_axis] != psi_ref.shape[0]:
        raise ContractError(f"regressors {u.shape} incompatible with estimate {psi_ref.shape}")
    u_m = np.moveaxis(u, m_axis, 0)
    acc = u_m[0] * psi_ref[0]
    for j in range(1, psi_ref.shape[0]):
        acc = acc + u_m[j] * psi_ref[j]
    return d - acc


def estimate_noise_stats(residuals, normalization="normalized"):
    """Mean and variance estimate of residuals along axis 0.

    The variance is ``sum((n - mean)**2) / ls``; with
    ``normalization="literal"`` the division is skipped.
    """
    n = np.asarray(residuals, dtype=float)
    if n.ndim == 0 or n.shape[0] == 0:
        raise ContractError("need at least one residual")
    if normalization not in NORMALIZATIONS:
        raise ConfigError(f"unknown normalization {normalization!r}")
    ls = n.shape[0]
    g = seq_sum(n) / ls
    dev = n - g
    s = seq_sum(dev * dev)
    if normalization == "normalized":
        s = s / ls
    if np.ndim(g) == 0:
        return float(g), float(s)
    return g, s


def noise_estimate(buffer, psi_ref, normalization="normalized"):
    res = compute_residuals(buffer, psi_ref)
    g, s = estimate_noise_stats(res, normalization)
    return NoiseEstimate(res, np.asarray(g), np.asarray(s))


def map_step_size(sigma_tilde, cfg):
    """``mu_max * exp(-a * sigma_tilde)``, scalar or elementwise.

    Positive in exact arithmetic; underflows to 0.0 once ``a * sigma_tilde``
    exceeds about 745, which simply freezes that node.
    """
    s = np.asarray(sigma_tilde, dtype=float)
    if np.any(s < 0):
        raise ContractError("variance estimates must be >= 0")
    mu = cfg.mu_max * exp_elementwise(-cfg.a * s)
    return float(mu) if mu.ndim == 0 else mu


def run_phase2(params, stream, psi_start, profile, n_cycles, start_cycle=0):
    """Run ``n_cycles`` cycles with per-node step sizes from ``start_cycle`` on."""
    _check_stream(params, stream, start_cycle + n_cycles)
    if profile.n_nodes != params.n_nodes:
        raise ContractError(f"profile has {profile.n_nodes} entries, network has {params.n_nodes}")
    return run_cycles(
        stream.u, stream.d, profile.mu, psi_start, start_cycle, start_cycle + n_cycles, params.w_o
    )


def proposed_arrays(u, d, cfg, n_cycles, w_o=None):
    """Both phases on raw, possibly batched, arrays.

    Returns the full trajectory, the noise estimate and the step sizes.
    """
    if n_cycles <= cfg.ls:
        raise ConfigError(f"n_cycles ({n_cycles}) must exceed ls ({cfg.ls})")
    if d.shape[0] < n_cycles:
        raise ConfigError(f"stream has {d.shape[0]} cycles, {n_cycles} requested")
    first = _phase1(u, d, cfg, w_o)
    psi_ref = first.final
    est = noise_estimate((u[: cfg.ls], d[: cfg.ls]), psi_ref, cfg.normalization)
    mu = map_step_size(est.sigma_tilde, cfg)
    second = run_cycles(u, d, mu, psi_ref, cfg.ls, n_cycles, w_o)
    return first.concat(second), est, mu


def run_proposed(params, stream, cfg, n_cycles):
    """The full two-phase algorithm over ``n_cycles`` cycles.

    Cycles ``1..ls`` of the returned trajectory are plain IDLMS at
    ``mu_max``; the remaining cycles use the reliability-weighted steps.
    """
    _check_stream(params, stream, n_cycles)
    traj, est, mu = proposed_arrays(stream.u, stream.d, cfg, n_cycles, params.w_o)
    diag = NodeDiagnostics(
        node_id=np.arange(params.n_nodes),
        sigma2_true=params.node_variances.copy(),
        sigma2_est=est.sigma_tilde,
        mu=mu,
    )
    return traj, diag


def profile_from_estimate(sigma_tilde, cfg):
    return StepSizeProfile(map_step_size(sigma_tilde, cfg), mu_max=cfg.mu_max)
