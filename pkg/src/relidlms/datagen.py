"""Synthetic sensor-network data and the exact normal-equations oracle.

Every node ``k`` observes, at every time step ``i``, a Gaussian regressor row
``u[k, i]`` and a scalar measurement

    d[k, i] = u[k, i] @ w_o + v[k, i],

where ``v[k, i]`` is zero-mean Gaussian noise with a node-specific variance.
Regressors are independent across nodes and over time. All data are real.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._ops import seq_dot
from .errors import ConfigError, ContractError, NumericalError

# Condition numbers above this are treated as singular.
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class ModelParams:
    """Ground truth for one simulated network.

    ``regressor_covariance`` is shared by all nodes and defaults to the
    identity.
    """

    w_o: np.ndarray
    node_variances: np.ndarray
    regressor_covariance: Optional[np.ndarray] = None

    def __post_init__(self):
        w_o = np.asarray(self.w_o, dtype=float)
        var = np.asarray(self.node_variances, dtype=float)
        if w_o.ndim != 1 or w_o.size == 0:
            raise ConfigError("w_o must be a non-empty vector")
        if var.ndim != 1 or var.size == 0:
            raise ConfigError("node_variances must be a non-empty vector")
        if not np.all(var > 0) or not np.all(np.isfinite(var)):
            raise ConfigError("node_variances must be finite and > 0")
        cov = self.regressor_covariance
        cov = np.eye(w_o.size) if cov is None else np.asarray(cov, dtype=float)
        if cov.shape != (w_o.size, w_o.size):
            raise ConfigError(
                f"regressor_covariance must be {w_o.size}x{w_o.size}, got {cov.shape}"
            )
        if not np.array_equal(cov, cov.T):
            raise ConfigError("regressor_covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() <= 0:
            raise ConfigError("regressor_covariance must be positive definite")
        object.__setattr__(self, "w_o", w_o)
        object.__setattr__(self, "node_variances", var)
        object.__setattr__(self, "regressor_covariance", cov)

    @property
    def n_nodes(self):
        return self.node_variances.size

    @property
    def dim(self):
        return self.w_o.size


@dataclass(frozen=True)
class SampleStream:
    """Per-node time series of regressors and measurements.

    Attributes
    ----------
    u : ndarray, shape (T, N, M)
        ``u[i, k]`` is the regressor row seen by node ``k`` in cycle ``i``.
    d : ndarray, shape (T, N)
        Matching scalar measurements.
    noise : ndarray of shape (T, N) or None
        The realised noise, kept so tests can check exact identities.
        It is defined as ``d - u @ w_o`` evaluated in the library's fixed
        summation order, so that identity holds bit for bit.
    """

    u: np.ndarray
    d: np.ndarray
    noise: Optional[np.ndarray] = None

    @property
    def n_cycles(self):
        return self.d.shape[0]

    @property
    def n_nodes(self):
        return self.d.shape[1]

    @property
    def dim(self):
        return self.u.shape[2]

    def cycle(self, i):
        """The (u, d) pairs of all nodes for cycle ``i``, in ring order."""
        return self.u[i], self.d[i]


@dataclass(frozen=True)
class StatisticsOracle:
    """Global second-order statistics summed over nodes."""

    R_u: np.ndarray
    R_du: np.ndarray = field(repr=False)


def assign_node_variances(n_nodes, low, high, rng):
    """Draw one noise variance per node, uniform on ``[low, high]``."""
    if n_nodes < 1:
        raise ConfigError(f"n_nodes must be >= 1, got {n_nodes}")
    if not (low > 0):
        raise ConfigError(f"variance_low must be > 0, got {low}")
    if not (high >= low):
        raise ConfigError(f"variance_high ({high}) must be >= variance_low ({low})")
    return rng.uniform(low, high, size=n_nodes)


def measurements(u, w_o, noise):
    """``u @ w_o + noise`` with the summation order used everywhere else."""
    u = np.asarray(u, dtype=float)
    return seq_dot(np.moveaxis(u, -1, 0), w_o) + noise


def generate_stream(params, n_cycles, rng, noiseless=False, keep_noise=True):
    """Sample ``n_cycles`` cycles of data for every node.

    Draw order from ``rng``: regressors, then noise. With ``noiseless=True``
    the noise draw is skipped and ``d`` equals ``u @ w_o`` exactly.
    """
    if n_cycles < 1:
        raise ConfigError(f"n_cycles must be >= 1, got {n_cycles}")
    N, M = params.n_nodes, params.dim
    z = rng.standard_normal((n_cycles, N, M))
    cov = params.regressor_covariance
    if np.array_equal(cov, np.eye(M)):
        u = z
    else:
        u = z @ np.linalg.cholesky(cov).T
    clean = seq_dot(np.moveaxis(u, -1, 0), params.w_o)
    if noiseless:
        d = clean
        noise = np.zeros_like(clean)
    else:
        raw = rng.standard_normal((n_cycles, N)) * np.sqrt(params.node_variances)
        d = clean + raw
        noise = d - clean
    return SampleStream(u=u, d=d, noise=noise if keep_noise else None)


def statistics_oracle(params):
    """Exact ``R_u`` and ``R_du`` for ``params``: sums of identical per-node moments."""
    cov = params.regressor_covariance
    N = params.n_nodes
    return StatisticsOracle(R_u=N * cov, R_du=N * (cov @ params.w_o))


def empirical_statistics(stream):
    """Sample estimates of ``R_u`` and ``R_du`` from a stream.

    Each node's moments are time averages; the global statistics are their sum
    over nodes.
    """
    u, d = stream.u, stream.d
    T = stream.n_cycles
    R_u = np.einsum("tkm,tkn->mn", u, u) / T
    R_du = np.einsum("tkm,tk->m", u, d) / T
    return StatisticsOracle(R_u=R_u, R_du=R_du)


def solve_normal_equations(oracle):
    """Solve ``R_u w = R_du``.

    Raises
    ------
    NumericalError
        If ``R_u`` is singular or its condition number exceeds ``MAX_CONDITION``.
    """
    R_u = np.asarray(oracle.R_u, dtype=float)
    R_du = np.asarray(oracle.R_du, dtype=float)
    if R_u.ndim != 2 or R_u.shape[0] != R_u.shape[1] or R_du.shape != (R_u.shape[0],):
        raise ContractError(f"incompatible shapes R_u {R_u.shape}, R_du {R_du.shape}")
    cond = np.linalg.cond(R_u)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NumericalError(
            f"R_u is singular or ill-conditioned (condition number {cond:.3g})",
            condition_number=cond,
        )
    return np.linalg.solve(R_u, R_du)
