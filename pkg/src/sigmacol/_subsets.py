"""Sums over every subset of a small ground set, indexed by bitmask (bit i <-> element i)."""

from __future__ import annotations

import numpy as np


def linear_sums(a) -> np.ndarray:
    """out[mask] = sum of a[i] over i in mask."""
    a = np.asarray(a)
    out = np.zeros(1, dtype=a.dtype if a.dtype != object else object)
    if a.dtype == object:
        out[0] = 0
    for v in a:
        out = np.concatenate([out, out + v])
    return out


def pair_sums(w) -> np.ndarray:
    """out[mask] = sum of w[i, j] over pairs i < j inside mask (w symmetric)."""
    w = np.asarray(w)
    n = w.shape[0]
    out = linear_sums(np.zeros(0, dtype=w.dtype))
    for k in range(n):
        out = np.concatenate([out, out + linear_sums(w[k, :k])])
    return out


def popcounts(n: int) -> np.ndarray:
    return linear_sums(np.ones(n, dtype=np.int64))
