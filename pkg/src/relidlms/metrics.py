"""Mean-square deviation curves and summary statistics."""

import math

import numpy as np

from ._ops import seq_mean, seq_sq_norm
from .errors import ContractError

MSD_MODES = ("node-averaged", "single-node")


def msd(psi, w_o):
    """Squared Euclidean distance between an estimate and the true vector."""
    psi = np.asarray(psi, dtype=float)
    w_o = np.asarray(w_o, dtype=float)
    if psi.shape != w_o.shape:
        raise ContractError(f"shape mismatch: {psi.shape} vs {w_o.shape}")
    return float(seq_sq_norm(w_o - psi))


def msd_curve(trajectory, mode="node-averaged", node=0):
    """Per-cycle MSD from a trajectory's per-node squared deviations.

    ``node-averaged`` averages over all nodes the deviation of the estimate
    each node received in that cycle; ``single-node`` reports node ``node``
    only. A batched trajectory yields one curve per run, shape ``(T, B)``.
    """
    dev = trajectory.node_sq_dev
    if dev is None:
        raise ContractError("trajectory carries no deviation records (w_o unknown)")
    if mode == "node-averaged":
        return seq_mean(np.moveaxis(dev, 1, 0))
    if mode == "single-node":
        if not 0 <= node < dev.shape[1]:
            raise ContractError(f"node {node} out of range 0..{dev.shape[1] - 1}")
        return dev[:, node].copy()
    raise ContractError(f"unknown msd mode {mode!r}; expected one of {MSD_MODES}")


def average_curves(curves):
    """Pointwise mean of equal-length curves, summed in the order given."""
    curves = list(curves)
    if not curves:
        raise ContractError("need at least one curve")
    first = np.asarray(curves[0], dtype=float)
    acc = first.copy()
    for c in curves[1:]:
        c = np.asarray(c, dtype=float)
        if c.shape != first.shape:
            raise ContractError(f"ragged curves: {c.shape} vs {first.shape}")
        acc = acc + c
    return acc / len(curves)


def _tail_length(n, tail_fraction):
    if not 0 < tail_fraction <= 1:
        raise ContractError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    # round first: 0.1 * 2000 is 200.00000000000003 in binary
    return max(1, math.ceil(round(tail_fraction * n, 9)))


def steady_state_msd(curve, tail_fraction=0.1):
    """Mean of the last ``ceil(tail_fraction * len(curve))`` entries."""
    curve = np.asarray(curve, dtype=float)
    if curve.size == 0:
        raise ContractError("empty curve")
    tail = curve[-_tail_length(curve.size, tail_fraction):]
    # rounding can push a mean past the tail's extremes
    return float(np.clip(tail.mean(), tail.min(), tail.max()))


def convergence_time(curve, threshold_factor=2.0, tail_fraction=0.1):
    """First cycle from which the curve stays at or below ``threshold_factor``
    times its steady-state level.

    Returns ``None`` when the last entry is still above the threshold.
    """
    if not threshold_factor > 1:
        raise ContractError(f"threshold_factor must be > 1, got {threshold_factor}")
    curve = np.asarray(curve, dtype=float)
    level = threshold_factor * steady_state_msd(curve, tail_fraction)
    above = np.flatnonzero(curve > level)
    if above.size == 0:
        return 0
    if above[-1] == curve.size - 1:
        return None
    return int(above[-1] + 1)


def to_db(values):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(values, dtype=float))
