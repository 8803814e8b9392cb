"""Exact Hausdorff-Pompeiu distance between finite point sets.

Distances are euclidean. Brute force is the reference path; above a size
threshold a k-d tree picks nearest neighbours, and each chosen pair's
distance is then recomputed with the brute-force formula so both paths
report the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import GifsError, PointSet

ACCEL_THRESHOLD = 10_000
_BLOCK = 4_000_000  # pairwise distances held in memory at once


class EmptySet(GifsError, ValueError):
    pass


@dataclass(frozen=True)
class DistanceReport:
    h: float
    directed_12: float
    directed_21: float
    witness_12: tuple[np.ndarray, np.ndarray]  # (a in A, nearest b in B)
    witness_21: tuple[np.ndarray, np.ndarray]  # (b in B, nearest a in A)


def _as_array(S) -> np.ndarray:
    a = S.points if isinstance(S, PointSet) else np.asarray(S, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.shape[0] == 0:
        raise EmptySet("Hausdorff distance is defined for nonempty sets only")
    return a


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared distances between rows a[i] and b[i] (or broadcast), fixed summation order."""
    d = a[..., 0] - b[..., 0]
    out = d * d
    for c in range(1, a.shape[-1]):
        d = a[..., c] - b[..., c]
        out = out + d * d
    return out


def _nearest_brute(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For every row of A: index of a nearest row of B and the squared distance."""
    idx = np.empty(A.shape[0], dtype=np.int64)
    d2 = np.empty(A.shape[0])
    step = max(1, _BLOCK // B.shape[0])
    for i in range(0, A.shape[0], step):
        block = _sqdist(A[i:i + step, None, :], B[None, :, :])
        j = np.argmin(block, axis=1)
        idx[i:i + step] = j
        d2[i:i + step] = block[np.arange(block.shape[0]), j]
    return idx, d2


_CANDIDATES = 4


def _nearest_tree(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Same answer as ``_nearest_brute``, ties included (lowest index wins).

    The tree proposes a few candidates; their distances are recomputed with the
    brute-force formula. Rows whose last candidate is within rounding of the
    first may hide further ties and go through the brute-force path.
    """
    k = min(_CANDIDATES, B.shape[0])
    dt, cand = cKDTree(B).query(A, k=k)
    dt, cand = dt.reshape(len(A), k), np.asarray(cand, dtype=np.int64).reshape(len(A), k)
    d2 = _sqdist(A[:, None, :], B[cand])
    # order candidates by (exact distance, index) and keep the first
    order = np.lexsort((cand, d2), axis=1)[:, 0]
    rows = np.arange(len(A))
    idx, best = cand[rows, order], d2[rows, order]
    if k < B.shape[0]:
        unsure = np.flatnonzero(dt[:, -1] <= dt[:, 0] * (1 + 1e-9) + 1e-300)
        if unsure.size:
            idx[unsure], best[unsure] = _nearest_brute(A[unsure], B)
    return idx, best


def nearest(A, B, accelerate: bool | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Index of the nearest B-point for each A-point, and its euclidean distance."""
    A, B = _as_array(A), _as_array(B)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"point sets live in R^{A.shape[1]} and R^{B.shape[1]}")
    if accelerate is None:
        accelerate = max(A.shape[0], B.shape[0]) > ACCEL_THRESHOLD and B.shape[0] > 64
    idx, d2 = (_nearest_tree if accelerate else _nearest_brute)(A, B)
    return idx, np.sqrt(d2)


def directed_distance(A, B, accelerate: bool | None = None) -> float:
    """sup over a in A of the distance from a to B."""
    _, d = nearest(A, B, accelerate)
    return float(d.max())


def hausdorff(A, B, accelerate: bool | None = None) -> DistanceReport:
    A, B = _as_array(A), _as_array(B)
    ia, da = nearest(A, B, accelerate)
    ib, db = nearest(B, A, accelerate)
    i, j = int(np.argmax(da)), int(np.argmax(db))
    d12, d21 = float(da[i]), float(db[j])
    return DistanceReport(
        h=max(d12, d21),
        directed_12=d12,
        directed_21=d21,
        witness_12=(A[i], B[ia[i]]),
        witness_21=(B[j], A[ib[j]]),
    )


def hausdorff_distance(A, B, accelerate: bool | None = None) -> float:
    return hausdorff(A, B, accelerate).h
