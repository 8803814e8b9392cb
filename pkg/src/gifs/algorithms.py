"""Deterministic and grid algorithms for GIFS attractors.

Every run counts operator applications: ``steps=k`` returns G^[k](K0) (or the
snapped analogue), which corresponds to the pseudocode loop with m = k + 1.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .core import (CLAMP_TOLERANCE, GifsError, GifsSystem, PointSet, lattice_coords,
                   linear_part, unique_rows)
from .metrics import hausdorff

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 2_000_000_000
CHUNK_ROWS = 1 << 20


class SnapMode(enum.Enum):
    FLOOR = "floor"  # (D/n) [n u / D]
    ROUND = "round"  # (D/n) [n u / D + 1/2]


class EmptyInput(GifsError, ValueError):
    pass


class TupleBudgetExceeded(GifsError):
    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"{count} map evaluations requested, budget is {budget}")


class VerificationFailure(GifsError, AssertionError):
    """A measured snapping gap exceeded its bound; this is a bug, not bad data."""


@dataclass
class StepRecord:
    step: int
    points: int   # size of the set after the step (deduplicated)
    tuples: int   # map evaluations in this step, L * prod |K_j|
    millis: float
    eps: float | None = None    # grid cell diagonal D sqrt(M) / n_k
    bound: float | None = None  # a priori distance bound to the attractor
    clamped: int = 0


@dataclass
class RunStats:
    algorithm: str
    records: list[StepRecord] = field(default_factory=list)
    initial_points: int = 0
    partial: bool = False
    stop_reason: str | None = None

    @property
    def total_tuples(self) -> int:
        return sum(r.tuples for r in self.records)

    @property
    def cumulative_tuples(self) -> list[int]:
        """Points computed up to each step (y_k)."""
        out, acc = [], 0
        for r in self.records:
            acc += r.tuples
            out.append(acc)
        return out

    @property
    def point_counts(self) -> list[int]:
        return [r.points for r in self.records]

    @property
    def steps_done(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class GapCertificate:
    """Measured h(snapped step, unsnapped step) against its bound."""

    step: int
    n: int
    eps: float
    bound: float
    measured: float

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound


class GridRunResult(NamedTuple):
    points: PointSet
    stats: RunStats
    certificates: list[GapCertificate]


def tuple_count(system: GifsSystem, sizes: Sequence[int]) -> int:
    return system.L * math.prod(sizes)


def _product_sums(parts: list[np.ndarray], max_rows: int) -> Iterator[np.ndarray]:
    """Yield ``parts[0][i0] + parts[1][i1] + ...`` over all index tuples, in blocks.

    Additions run left to right, matching ``apply_map``.
    """
    M = parts[0].shape[1]
    if len(parts) == 1:
        for i in range(0, parts[0].shape[0], max_rows):
            yield parts[0][i:i + max_rows]
        return
    tail = math.prod(q.shape[0] for q in parts[1:])
    if tail <= max_rows:
        step = max(1, max_rows // tail)
        for i in range(0, parts[0].shape[0], step):
            acc = parts[0][i:i + step]
            for q in parts[1:]:
                acc = (acc[:, None, :] + q[None, :, :]).reshape(-1, M)
            yield acc
    else:
        for row in parts[0]:
            yield from _product_sums([row[None, :] + parts[1], *parts[2:]], max_rows)


def _images(system: GifsSystem, arrays: Sequence[np.ndarray],
            max_rows: int = CHUNK_ROWS) -> Iterator[tuple[np.ndarray, int]]:
    """Blocks of f_l(u_1, ..., u_p) over all maps and tuples, clamped to the cube.

    Yields (block, number of points that needed clamping).
    """
    D = system.D
    for f in system.maps:
        parts = [f.offset[None, :] + linear_part(f.blocks[0], arrays[0])]
        parts += [linear_part(A, u) for A, u in zip(f.blocks[1:], arrays[1:])]
        for block in _product_sums(parts, max_rows):
            out = (block < -CLAMP_TOLERANCE) | (block > D + CLAMP_TOLERANCE)
            clamped = int(np.count_nonzero(out.any(axis=1)))
            yield np.clip(block, 0.0, D), clamped


def _check_args(system: GifsSystem, args: Sequence[PointSet]) -> list[np.ndarray]:
    if len(args) != system.p:
        raise ValueError(f"system of order {system.p} needs {system.p} sets, got {len(args)}")
    arrays = []
    for K in args:
        if len(K) == 0:
            raise EmptyInput("fractal operator applied to an empty set")
        if K.M != system.M:
            raise ValueError(f"set lives in R^{K.M}, system in R^{system.M}")
        arrays.append(K.points)
    return arrays


def _check_budget(count: int, budget: int | None, spent: int = 0) -> None:
    if budget is not None and spent + count > budget:
        raise TupleBudgetExceeded(spent + count, budget)


def _report_clamped(system: GifsSystem, clamped: int) -> None:
    if clamped and system.range_policy == "strict":
        log.warning("%d image points drifted outside the cube and were clamped", clamped)


def _raw_step(system: GifsSystem, args: Sequence[PointSet], budget: int | None,
              spent: int = 0) -> tuple[np.ndarray, int, int]:
    arrays = _check_args(system, args)
    count = tuple_count(system, [a.shape[0] for a in arrays])
    _check_budget(count, budget, spent)
    pieces, clamped = [], 0
    for block, c in _images(system, arrays):
        pieces.append(unique_rows(block))
        clamped += c
    _report_clamped(system, clamped)
    return unique_rows(np.concatenate(pieces)), count, clamped


def fractal_step(system: GifsSystem, args: Sequence[PointSet],
                 budget: int | None = DEFAULT_BUDGET) -> PointSet:
    """The fractal operator: union over maps of f_i(K_1 x ... x K_p)."""
    pts, _, _ = _raw_step(system, args, budget)
    return PointSet(pts, system.D)


def g_step(system: GifsSystem, K: PointSet, budget: int | None = DEFAULT_BUDGET) -> PointSet:
    """G(K) = F(K, ..., K)."""
    return fractal_step(system, [K] * system.p, budget)


def deterministic_run(system: GifsSystem, K0: PointSet | None = None, steps: int = 1,
                      budget: int | None = DEFAULT_BUDGET) -> tuple[PointSet, RunStats]:
    """Apply G ``steps`` times to K0 (default: the cube center).

    If the tuple budget would be exceeded, returns the last completed set with
    ``stats.partial`` set. Each record's ``bound`` is C^k h(A_0, A_1) / (1 - C).
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    K = system.center() if K0 is None else K0
    A0 = K
    stats = RunStats("det", initial_points=len(K))
    h01 = None
    for k in range(1, steps + 1):
        t0 = time.perf_counter()
        try:
            pts, count, clamped = _raw_step(system, [K] * system.p, budget, stats.total_tuples)
        except TupleBudgetExceeded as exc:
            stats.partial, stats.stop_reason = True, str(exc)
            break
        K = PointSet(pts, system.D)
        if h01 is None:
            h01 = hausdorff(A0, K).h
        stats.records.append(StepRecord(
            k, len(K), count, 1000 * (time.perf_counter() - t0),
            bound=system.C ** k * h01 / (1 - system.C), clamped=clamped))
    return K, stats


def snap_indices(v, n: int, D: float, mode: SnapMode = SnapMode.FLOOR) -> np.ndarray:
    """Integer lattice indices of the snapped points; v is expected in [0, D]."""
    if n < 1:
        raise ValueError("grid resolution n must be >= 1")
    v = np.asarray(v, dtype=np.float64)
    t = (v / D) * n
    if mode is SnapMode.ROUND:
        return np.clip(np.floor(t + 0.5), 0, n).astype(np.int64)
    g = np.clip(np.floor(t), 0, n)
    # make lattice(g) <= v < lattice(g + 1) hold in floating point
    g = np.where((g > 0) & (lattice_coords(g, n, D) > v), g - 1, g)
    g = np.where((g < n) & (lattice_coords(g + 1, n, D) <= v), g + 1, g)
    return g.astype(np.int64)


def snap(v, n: int, D: float, mode: SnapMode = SnapMode.FLOOR) -> np.ndarray:
    """Nearest lattice point below (FLOOR) or nearest overall (ROUND), componentwise."""
    return lattice_coords(snap_indices(v, n, D, mode), n, D)


def _encode(g: np.ndarray, n: int) -> np.ndarray | None:
    """Keys ordered like the index rows lexicographically; None if they would overflow."""
    M = g.shape[1]
    if (n + 1) ** M >= 2 ** 62:
        return None
    key = g[:, 0].copy()
    for c in range(1, M):
        key = key * (n + 1) + g[:, c]
    return key


def _decode(key: np.ndarray, n: int, M: int) -> np.ndarray:
    g = np.empty((key.shape[0], M), dtype=np.int64)
    for c in range(M - 1, -1, -1):
        key, g[:, c] = np.divmod(key, n + 1)
    return g


def _grid_step(system: GifsSystem, D0: PointSet, n: int, mode: SnapMode,
               budget: int | None, spent: int = 0) -> tuple[PointSet, int, int]:
    arrays = _check_args(system, [D0] * system.p)
    count = tuple_count(system, [a.shape[0] for a in arrays])
    _check_budget(count, budget, spent)
    pieces, clamped = [], 0
    for block, c in _images(system, arrays):
        g = snap_indices(block, n, system.D, mode)
        key = _encode(g, n)
        pieces.append(unique_rows(g) if key is None else np.unique(key))
        clamped += c
    _report_clamped(system, clamped)
    if pieces[0].ndim == 1:
        g = _decode(np.unique(np.concatenate(pieces)), n, system.M)
    else:
        g = unique_rows(np.concatenate(pieces))
    return PointSet(lattice_coords(g, n, system.D), system.D, n, g), count, clamped


def grid_step(system: GifsSystem, D0: PointSet, n: int, mode: SnapMode = SnapMode.FLOOR,
              budget: int | None = DEFAULT_BUDGET) -> PointSet:
    """G(D0) with every image snapped to the lattice (D/n) Z^M."""
    if n < 1:
        raise ValueError("grid resolution n must be >= 1")
    return _grid_step(system, D0, n, mode, budget)[0]


def grid_run(system: GifsSystem, K0: PointSet | None = None, schedule=(),
             mode: SnapMode = SnapMode.FLOOR, budget: int | None = DEFAULT_BUDGET,
             verify: bool = False) -> GridRunResult:
    """Run the grid algorithm with resolutions ``schedule`` (a GridSchedule or ints).

    With ``verify=True`` every step also computes the unsnapped G of the previous
    set and measures its Hausdorff distance to the snapped set; a gap above
    eps_k (FLOOR) or eps_k / 2 (ROUND), beyond 1e-9 D, raises VerificationFailure.
    """
    from .schedule import error_bound

    ns = [int(n) for n in getattr(schedule, "n", schedule)]
    if not ns:
        raise ValueError("grid schedule must have at least one entry")
    K = system.center() if K0 is None else K0
    stats = RunStats(f"grid-{mode.value}", initial_points=len(K))
    certs: list[GapCertificate] = []
    diam = system.diameter
    for k, n in enumerate(ns, start=1):
        t0 = time.perf_counter()
        try:
            nxt, count, clamped = _grid_step(system, K, n, mode, budget, stats.total_tuples)
        except TupleBudgetExceeded as exc:
            stats.partial, stats.stop_reason = True, str(exc)
            break
        millis = 1000 * (time.perf_counter() - t0)
        eps = diam / n
        if verify:
            exact = g_step(system, K, budget=None)
            measured = hausdorff(nxt, exact).h
            cert = GapCertificate(k, n, eps, eps if mode is SnapMode.FLOOR else eps / 2, measured)
            certs.append(cert)
            if measured > cert.bound + 1e-9 * system.D:
                raise VerificationFailure(
                    f"step {k}: measured gap {measured!r} exceeds bound {cert.bound!r}")
        stats.records.append(StepRecord(
            k, len(nxt), count, millis, eps=eps,
            bound=error_bound(ns[:k], system.C, system.D, system.M), clamped=clamped))
        K = nxt
    return GridRunResult(K, stats, certs)


def memory_p_run(system: GifsSystem, seeds: Sequence[PointSet], steps: int,
                 budget: int | None = DEFAULT_BUDGET) -> PointSet:
    """K_{n+p} = F(K_n, ..., K_{n+p-1}) from seeds K_1..K_p; returns K_{p+steps}."""
    if len(seeds) != system.p:
        raise ValueError(f"need exactly p = {system.p} seed sets")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    window = list(seeds)
    spent = 0
    for _ in range(steps):
        pts, count, _ = _raw_step(system, window, budget, spent)
        spent += count
        window = window[1:] + [PointSet(pts, system.D)]
    return window[-1]


def memory_p_bound(C: float, p: int, steps: int, D: float, M: int) -> float:
    """Bound on h(K_{p+steps}, attractor) when every seed lies in the cube.

    Each block of p new sets contracts the window maximum by C.
    """
    return C ** math.ceil(steps / p) * D * math.sqrt(M)
