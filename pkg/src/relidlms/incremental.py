"""Incremental LMS over a fixed ring of nodes.

Within cycle ``i`` the estimate enters node 0 as ``w_{i-1}``, every node
``k`` applies one LMS correction with its own step size,

    psi_k = psi_{k-1} + mu_k * u_k^T (d_k - u_k psi_{k-1}),

and the estimate leaving the last node is ``w_i``. This is steepest descent
on the instantaneous cost ``|d - u psi|^2``; the update adds the correction
(a literal subtraction would climb the cost and diverge).

Arrays may carry one extra trailing axis holding independent Monte-Carlo
runs: ``psi`` is ``(M,)`` or ``(M, B)``, a cycle's regressors ``(N, M)`` or
``(N, M, B)``. Every reduction runs in a fixed order, so a run gives the same
bits alone or inside any batch.
"""

from dataclasses import dataclass

import numpy as np

from ._ops import seq_dot, seq_sq_norm
from .errors import ConfigError, ContractError


@dataclass(frozen=True)
class NodeState:
    node_id: int
    psi: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.psi)):
            raise ContractError(f"node {self.node_id}: non-finite estimate")


class StepSizeProfile:
    """Per-node step sizes ``mu[k]``; ``uniform`` gives plain IDLMS."""

    def __init__(self, mu, mu_max=None):
        mu = np.asarray(mu, dtype=float)
        if mu.ndim == 0 or mu.shape[0] == 0:
            raise ContractError("step-size profile needs one entry per node")
        if np.any(mu < 0) or not np.all(np.isfinite(mu)):
            raise ContractError("step sizes must be finite and >= 0")
        if mu_max is not None and np.any(mu > mu_max):
            raise ContractError(f"step sizes must not exceed mu_max={mu_max}")
        self.mu = mu
        self.mu_max = mu_max

    @classmethod
    def uniform(cls, mu, n_nodes):
        return cls(np.full(n_nodes, float(mu)), mu_max=float(mu))

    @property
    def n_nodes(self):
        return self.mu.shape[0]

    def __repr__(self):
        return f"StepSizeProfile(mu={self.mu!r})"


@dataclass(frozen=True)
class Trajectory:
    """What one (or a batch of) run(s) produced, cycle by cycle.

    Attributes
    ----------
    estimates : ndarray, shape (T, M[, B])
        Network estimate ``w_i`` leaving the last node of every cycle.
    node_sq_dev : ndarray of shape (T, N[, B]) or None
        ``||w_o - psi_{k-1}||^2``: squared deviation of the estimate each node
        received, before its own update. Only filled when ``w_o`` is known.
    """

    estimates: np.ndarray
    node_sq_dev: object = None

    def __len__(self):
        return self.estimates.shape[0]

    @property
    def final(self):
        return self.estimates[-1]

    def concat(self, other):
        dev = None
        if self.node_sq_dev is not None and other.node_sq_dev is not None:
            dev = np.concatenate([self.node_sq_dev, other.node_sq_dev])
        return Trajectory(np.concatenate([self.estimates, other.estimates]), dev)


def lms_node_update(psi_in, u, d, mu_k):
    """One node's LMS correction.

    Returns ``psi_in + mu_k * u^T (d - u psi_in)``.
    """
    psi_in = np.asarray(psi_in, dtype=float)
    u = np.asarray(u, dtype=float)
    if u.shape != psi_in.shape:
        raise ContractError(f"regressor shape {u.shape} != estimate shape {psi_in.shape}")
    return _update(psi_in, u, d, mu_k)


def _update(psi, u, d, mu_k):
    e = d - seq_dot(u, psi)
    return psi + (mu_k * e) * u


def _cycle(psi, u_i, d_i, mu, w_o=None, dev_out=None):
    for k in range(u_i.shape[0]):
        if dev_out is not None:
            dev_out[k] = seq_sq_norm(w_o - psi)
        psi = _update(psi, u_i[k], d_i[k], mu[k])
    return psi


def run_cycle(w_prev, cycle_samples, profile):
    """Pass ``w_prev`` once around the ring and return the new network estimate.

    ``cycle_samples`` is ``(u, d)`` with one row per node in ascending node
    order.
    """
    u_i, d_i = cycle_samples
    u_i = np.asarray(u_i, dtype=float)
    d_i = np.asarray(d_i, dtype=float)
    mu = profile.mu if isinstance(profile, StepSizeProfile) else np.asarray(profile, dtype=float)
    if u_i.shape[0] != mu.shape[0] or d_i.shape[0] != mu.shape[0]:
        raise ContractError(
            f"expected {mu.shape[0]} node samples, got {u_i.shape[0]} regressors "
            f"and {d_i.shape[0]} measurements"
        )
    w_prev = np.asarray(w_prev, dtype=float)
    if u_i.shape[1:] != w_prev.shape:
        raise ContractError(f"regressor rows {u_i.shape[1:]} do not match estimate {w_prev.shape}")
    return _cycle(w_prev, u_i, d_i, mu)


def run_cycles(u, d, mu, psi0, start, stop, w_o=None):
    """Run cycles ``start .. stop-1`` of the arrays ``u``/``d`` from ``psi0``.

    Low-level engine shared by IDLMS and both phases of the proposed
    algorithm. ``mu`` has one entry per node (optionally per run too).
    """
    T = stop - start
    psi = np.array(psi0, dtype=float)
    estimates = np.empty((T,) + psi.shape)
    dev = None
    if w_o is not None:
        dev = np.empty((T, u.shape[1]) + psi.shape[1:])
    for t, i in enumerate(range(start, stop)):
        psi = _cycle(psi, u[i], d[i], mu, w_o, None if dev is None else dev[t])
        estimates[t] = psi
    return Trajectory(estimates, dev)


def idlms_arrays(u, d, mu, n_cycles, w_o=None, psi0=None):
    """IDLMS on raw (possibly batched) arrays with a uniform step size."""
    if d.shape[0] < n_cycles:
        raise ConfigError(f"stream has {d.shape[0]} cycles, {n_cycles} requested")
    if psi0 is None:
        psi0 = np.zeros(u.shape[2:])
    mu_vec = np.full(u.shape[1], float(mu))
    return run_cycles(u, d, mu_vec, psi0, 0, n_cycles, w_o)


def run_idlms(params, stream, mu, n_cycles):
    """Baseline IDLMS from ``w = 0`` over the first ``n_cycles`` cycles of ``stream``."""
    if not mu > 0:
        raise ConfigError(f"mu must be > 0, got {mu}")
    if n_cycles < 1:
        raise ConfigError(f"n_cycles must be >= 1, got {n_cycles}")
    if stream.n_nodes != params.n_nodes or stream.dim != params.dim:
        raise ContractError("stream dimensions do not match model parameters")
    return idlms_arrays(stream.u, stream.d, mu, n_cycles, w_o=params.w_o)
