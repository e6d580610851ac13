"""Numpy fallback for the counting kernels."""

from __future__ import annotations

import numpy as np


def count_sorted_within(z: np.ndarray, e: np.ndarray, tau: int) -> int:
    """Rows of z whose sorted version is within Hamming distance tau of e."""
    z = np.sort(np.asarray(z, dtype=np.int64), axis=1)
    e = np.asarray(e, dtype=np.int64)
    return int(((z != e).sum(axis=1) <= tau).sum())


def count_within(z: np.ndarray, e: np.ndarray, tau: int) -> int:
    """Rows of z within Hamming distance tau of e (no sorting)."""
    z = np.asarray(z, dtype=np.int64)
    e = np.asarray(e, dtype=np.int64)
    return int(((z != e).sum(axis=1) <= tau).sum())
