"""Fixed-order reductions.

numpy's pairwise/SIMD summation may group terms differently depending on
array layout, so a run evaluated alone and the same run evaluated inside a
batch could disagree in the last bit. Every reduction that feeds an
estimate or a reported curve goes through these helpers instead; they
accumulate strictly left to right along the leading axis and broadcast
over any trailing (batch) axes.
"""

import math

import numpy as np


def seq_dot(u, w):
    """Sum of ``u[j] * w[j]`` over the leading axis, left to right."""
    acc = u[0] * w[0]
    for j in range(1, len(u)):
        acc = acc + u[j] * w[j]
    return acc


def seq_sq_norm(x):
    acc = x[0] * x[0]
    for j in range(1, len(x)):
        acc = acc + x[j] * x[j]
    return acc


def seq_sum(x):
    acc = x[0]
    for j in range(1, len(x)):
        acc = acc + x[j]
    return acc


def seq_mean(x):
    return seq_sum(x) / len(x)


def exp_elementwise(x):
    """libm ``exp`` per element, immune to numpy's vectorised exp kernels."""
    arr = np.asarray(x, dtype=float)
    out = np.fromiter((math.exp(v) for v in arr.ravel()), dtype=float, count=arr.size)
    return out.reshape(arr.shape)
