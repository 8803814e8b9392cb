"""Affine GIFS on the cube [0, D]^M: maps, systems and finite point sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# Coordinates that drift further than this outside [0, D] are counted as clamped.
CLAMP_TOLERANCE = 1e-9

_POWER_TOL = 1e-12
_POWER_MAXITER = 10_000


class GifsError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(GifsError, ValueError):
    pass


class ContractionViolation(GifsError, ValueError):
    def __init__(self, C: float, index: int | None = None):
        self.C = C
        self.index = index
        where = "" if index is None else f" (map {index})"
        super().__init__(f"contraction bound {C!r} is not < 1{where}")


class RangeViolation(GifsError, ValueError):
    def __init__(self, index: int, lo: np.ndarray, hi: np.ndarray, D: float):
        self.index = index
        self.lo = lo
        self.hi = hi
        self.D = D
        super().__init__(
            f"map {index} sends the cube into the box "
            f"[{lo.tolist()}, {hi.tolist()}], which leaves [0, {D}]^M"
        )


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AffineMap:
    """f(u_1, ..., u_p) = blocks[0] @ u_1 + ... + blocks[p-1] @ u_p + offset."""

    blocks: np.ndarray  # shape (p, M, M)
    offset: np.ndarray  # shape (M,)

    def __post_init__(self):
        blocks = np.array(self.blocks, dtype=np.float64)
        offset = np.array(self.offset, dtype=np.float64).reshape(-1)
        if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
            raise DimensionMismatch(f"blocks must have shape (p, M, M), got {blocks.shape}")
        if blocks.shape[0] < 1:
            raise DimensionMismatch("an affine map needs at least one block")
        if offset.shape[0] != blocks.shape[1]:
            raise DimensionMismatch(
                f"offset has length {offset.shape[0]}, blocks are {blocks.shape[1]}x{blocks.shape[1]}"
            )
        if not (np.all(np.isfinite(blocks)) and np.all(np.isfinite(offset))):
            raise ValueError("affine map coefficients must be finite")
        object.__setattr__(self, "blocks", _frozen(blocks))
        object.__setattr__(self, "offset", _frozen(offset))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]], p: int) -> AffineMap:
        """Build from rows of ``[blocks[0] | ... | blocks[p-1] | offset]``."""
        a = np.array(rows, dtype=np.float64)
        M = a.shape[0]
        if a.ndim != 2 or a.shape[1] != p * M + 1:
            raise DimensionMismatch(f"expected {M} rows of {p * M + 1} numbers, got shape {a.shape}")
        blocks = np.stack([a[:, j * M:(j + 1) * M] for j in range(p)])
        return cls(blocks, a[:, -1])

    @property
    def p(self) -> int:
        return self.blocks.shape[0]

    @property
    def M(self) -> int:
        return self.blocks.shape[1]

    def rows(self) -> np.ndarray:
        """Coefficient rows ``[blocks[0] | ... | blocks[p-1] | offset]``, shape (M, pM + 1)."""
        return np.hstack([*self.blocks, self.offset[:, None]])

    def __eq__(self, other):
        if not isinstance(other, AffineMap):
            return NotImplemented
        return np.array_equal(self.blocks, other.blocks) and np.array_equal(self.offset, other.offset)

    def __hash__(self):
        return hash((self.blocks.tobytes(), self.offset.tobytes()))


def linear_part(block: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Rows of ``block @ u_i`` for a stack of points u of shape (n, M).

    The sum runs over columns left to right with separate multiplies and adds,
    so batched and single-point evaluation agree bit for bit.
    """
    out = u[:, 0:1] * block[:, 0][None, :]
    for c in range(1, block.shape[1]):
        out = out + u[:, c:c + 1] * block[:, c][None, :]
    return out


def apply_map(f: AffineMap, args: Sequence[Sequence[float]]) -> np.ndarray:
    """Evaluate ``f`` at one p-tuple of points, without clamping."""
    if len(args) != f.p:
        raise DimensionMismatch(f"map of order {f.p} applied to {len(args)} arguments")
    acc = f.offset[None, :]
    for block, u in zip(f.blocks, args):
        u = np.asarray(u, dtype=np.float64).reshape(1, -1)
        if u.shape[1] != f.M:
            raise DimensionMismatch(f"argument of dimension {u.shape[1]}, map works in R^{f.M}")
        acc = acc + linear_part(block, u)
    return acc[0]


def spectral_norm(A: np.ndarray) -> float:
    """Largest singular value of a square matrix.

    Closed form for M <= 2; otherwise power iteration on A^T A, returning
    sqrt(lambda + residual) so the Rayleigh quotient's error is covered.
    """
    A = np.asarray(A, dtype=np.float64)
    M = A.shape[0]
    if M == 1:
        return abs(float(A[0, 0]))
    if M == 2:
        a, b, c, d = (float(x) for x in A.ravel())
        return 0.5 * (math.hypot(a + d, c - b) + math.hypot(a - d, b + c))
    B = A.T @ A
    fro2 = float(np.sum(B.diagonal()))
    if fro2 == 0.0:
        return 0.0
    v = np.ones(M) / math.sqrt(M) + np.arange(M) * 1e-3
    v /= np.linalg.norm(v)
    lam, resid = fro2, 0.0
    for _ in range(_POWER_MAXITER):
        w = B @ v
        lam = float(v @ w)
        # B symmetric: some eigenvalue lies within |Bv - lam v| of lam
        resid = float(np.linalg.norm(w - lam * v))
        if resid <= _POWER_TOL * lam:
            break
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            # v landed in the null space; restart from the heaviest column
            v = np.eye(M)[int(np.argmax(B.diagonal()))]
            continue
        v = w / nw
    return min(math.sqrt(lam + resid), math.sqrt(fro2))


def lip_bound(f: AffineMap) -> float:
    """Certified Lipschitz bound of f from ((R^M)^p, d_max) to (R^M, euclidean)."""
    return float(sum(spectral_norm(A) for A in f.blocks))


def interval_image(f: AffineMap, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interval hull of f over the box [lo, hi]^p (same box for every argument)."""
    lo = np.broadcast_to(np.asarray(lo, dtype=np.float64), (f.M,))
    hi = np.broadcast_to(np.asarray(hi, dtype=np.float64), (f.M,))
    out_lo = f.offset.copy()
    out_hi = f.offset.copy()
    for A in f.blocks:
        a_lo = A * lo[None, :]
        a_hi = A * hi[None, :]
        out_lo += np.minimum(a_lo, a_hi).sum(axis=1)
        out_hi += np.maximum(a_lo, a_hi).sum(axis=1)
    return out_lo, out_hi


@dataclass(frozen=True, eq=False)
class GifsSystem:
    """A GIFS of order p on [0, D]^M with certified contraction bound C < 1.

    ``range_policy`` records how the standing hypothesis f_i(cube^p) within the
    cube was established: ``"strict"`` means interval arithmetic proved it;
    ``"clamp"`` means every map is composed with the projection onto the cube,
    which is 1-Lipschitz, so C stays a valid bound for the composed maps.
    """

    maps: tuple[AffineMap, ...]
    D: float
    p: int
    M: int
    lip_bounds: tuple[float, ...]
    C: float
    range_policy: str = "strict"
    range_excess: tuple[float, ...] = field(default=())

    @property
    def L(self) -> int:
        return len(self.maps)

    @property
    def beta(self) -> int:
        return self.p * self.M

    @property
    def diameter(self) -> float:
        """D * sqrt(M), the diameter of the cube."""
        return self.D * math.sqrt(self.M)

    def center(self) -> PointSet:
        return PointSet.from_array(np.full((1, self.M), self.D / 2), self.D)

    def __eq__(self, other):
        if not isinstance(other, GifsSystem):
            return NotImplemented
        return (self.maps == other.maps and self.D == other.D and self.p == other.p
                and self.M == other.M and self.range_policy == other.range_policy)

    def __hash__(self):
        return hash((self.maps, self.D, self.p, self.M))


def build_system(maps: Sequence[AffineMap], D: float, p: int, M: int,
                 range_policy: str = "strict") -> GifsSystem:
    """Validate maps, certify C < 1 and range containment, and build the system.

    Raises DimensionMismatch, ContractionViolation or RangeViolation (the last
    only under ``range_policy="strict"``).
    """
    maps = tuple(maps)
    if not maps:
        raise DimensionMismatch("a GIFS needs at least one map")
    if not (D > 0 and math.isfinite(D)):
        raise DimensionMismatch(f"cube side must be positive and finite, got {D!r}")
    if p < 1 or M < 1:
        raise DimensionMismatch(f"need p >= 1 and M >= 1, got p={p}, M={M}")
    if range_policy not in ("strict", "clamp"):
        raise ValueError(f"unknown range policy {range_policy!r}")
    for i, f in enumerate(maps):
        if f.p != p or f.M != M:
            raise DimensionMismatch(f"map {i} has (p, M) = ({f.p}, {f.M}), system has ({p}, {M})")

    lips = tuple(lip_bound(f) for f in maps)
    C = max(lips)
    if not C < 1:
        raise ContractionViolation(C, int(np.argmax(lips)))

    excess = []
    for i, f in enumerate(maps):
        lo, hi = interval_image(f, 0.0, D)
        over = max(0.0, float(np.max(-lo)), float(np.max(hi - D)))
        if over > 0 and range_policy == "strict":
            raise RangeViolation(i, lo, hi, D)
        excess.append(over)
    return GifsSystem(maps, float(D), p, M, lips, C, range_policy, tuple(excess))


class PointSet:
    """A finite subset of [0, D]^M with set semantics.

    Either raw floats or lattice points (D/n) * g with integer 0 <= g_i <= n.
    Rows are kept in a canonical sorted order, so equal sets have equal arrays.
    """

    __slots__ = ("points", "D", "n", "indices")

    def __init__(self, points: np.ndarray, D: float, n: int | None = None,
                 indices: np.ndarray | None = None):
        # Use from_array / from_indices; this trusts its inputs.
        self.points = _frozen(points)
        self.D = float(D)
        self.n = n
        self.indices = None if indices is None else _frozen(indices)

    @classmethod
    def from_array(cls, points, D: float) -> PointSet:
        a = np.array(points, dtype=np.float64)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2 or a.shape[0] == 0:
            raise ValueError("a point set needs a nonempty (count, M) array")
        if not np.all(np.isfinite(a)):
            raise ValueError("point coordinates must be finite")
        if np.any(a < 0) or np.any(a > D):
            raise ValueError(f"points must lie in [0, {D}]^M")
        return cls(unique_rows(a), D)

    @classmethod
    def from_indices(cls, indices, n: int, D: float) -> PointSet:
        g = np.array(indices, dtype=np.int64)
        if g.ndim != 2 or g.shape[0] == 0:
            raise ValueError("a lattice set needs a nonempty (count, M) index array")
        if np.any(g < 0) or np.any(g > n):
            raise ValueError(f"lattice indices must lie in [0, {n}]")
        g = unique_rows(g)
        return cls(lattice_coords(g, n, D), D, n, g)

    @property
    def M(self) -> int:
        return self.points.shape[1]

    @property
    def is_lattice(self) -> bool:
        return self.indices is not None

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.D == other.D and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.D, self.points.tobytes()))

    def __repr__(self):
        kind = f"lattice n={self.n}" if self.is_lattice else "raw"
        return f"PointSet({len(self)} points in [0, {self.D}]^{self.M}, {kind})"


def lattice_coords(g: np.ndarray, n: int, D: float) -> np.ndarray:
    """Coordinates (g / n) * D; exact at g = 0 and g = n."""
    return (g / n) * D


def unique_rows(a: np.ndarray) -> np.ndarray:
    """Distinct rows in lexicographic order (exact comparison; -0.0 folded into 0.0)."""
    if a.dtype.kind == "f":
        a = a + 0.0
    if a.shape[0] <= 1:
        return a.copy()
    order = np.lexsort(a.T[::-1])
    s = a[order]
    keep = np.empty(s.shape[0], dtype=bool)
    keep[0] = True
    np.any(s[1:] != s[:-1], axis=1, out=keep[1:])
    return s[keep]
