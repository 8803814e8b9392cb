import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gifs.algorithms as alg
from gifs.algorithms import (SnapMode, TupleBudgetExceeded, deterministic_run, fractal_step,
                             g_step, grid_run, grid_step, memory_p_bound, memory_p_run, snap,
                             snap_indices)
from gifs.core import AffineMap, GifsSystem, PointSet, apply_map, build_system
from gifs.metrics import hausdorff
from gifs.schedule import error_bound, quadratic_schedule

from conftest import random_points, random_system


def constant_system(b, D=1.0, p=2):
    M = len(b)
    return build_system([AffineMap(np.zeros((p, M, M)), b)], D, p, M)


def midpoint_system():
    # (u1 + u2) / 2 has Lipschitz bound exactly 1, so it is built without certification
    f = AffineMap([[[0.5]], [[0.5]]], [0.0])
    return GifsSystem((f,), 1.0, 2, 1, (1.0,), 1.0)


def pts(*rows, D=1.0):
    return PointSet.from_array(rows, D)


def oracle_g(system, K):
    """G(K) by pure-Python enumeration of every tuple through apply_map, clamped."""
    import itertools
    out = set()
    for f in system.maps:
        for args in itertools.product(K.points, repeat=system.p):
            y = np.clip(apply_map(f, args), 0, system.D)
            out.add(tuple(float(v) + 0.0 for v in y))
    return out


def as_set(K):
    return {tuple(r) for r in K.points.tolist()}


# fractal operator -------------------------------------------------------------

def test_constant_map_image():
    s = constant_system([0.25, 0.75])
    out = fractal_step(s, [pts([0.1, 0.1], [0.9, 0.2]), pts([0.3, 0.3])])
    assert out.points.tolist() == [[0.25, 0.75]]


def test_midpoint_single_tuple():
    s = midpoint_system()
    assert fractal_step(s, [pts([0.0]), pts([1.0])]).points.tolist() == [[0.5]]


def test_example_a_at_origin(example_a):
    O = pts([0.0, 0.0])
    out = fractal_step(example_a, [O, O])
    assert as_set(out) == {(0.0, 0.0), (0.4, 0.0), (0.0, 0.04)}
    assert g_step(example_a, O) == out


def test_g_step_matches_enumeration_oracle(rng, examples):
    for s in examples.values():
        K = random_points(rng, 7)
        assert as_set(g_step(s, K)) == oracle_g(s, K)


def test_tuple_count_contract(rng, example_a):
    for n in (1, 2, 5, 13):
        K = random_points(rng, n)
        _, stats = deterministic_run(example_a, K, 1)
        assert stats.records[0].tuples == 3 * n ** 2


def test_constant_system_ignores_input(rng):
    s = constant_system([0.5, 0.5])
    for n in (1, 4, 9):
        assert len(g_step(s, random_points(rng, n))) == 1


def test_empty_and_arity_errors(example_a):
    with pytest.raises(ValueError):
        fractal_step(example_a, [pts([0.0, 0.0])])


def test_budget_guard(example_a):
    K = PointSet.from_array(np.linspace(0, 1, 40)[:, None].repeat(2, axis=1), 1.0)
    with pytest.raises(TupleBudgetExceeded) as exc:
        g_step(example_a, K, budget=3 * 40 * 40 - 1)
    assert exc.value.count == 4800 and exc.value.budget == 4799
    assert len(g_step(example_a, K, budget=4800)) > 0


def test_map_order_invariance(rng):
    for _ in range(10):
        s = random_system(rng, L=3)
        t = build_system(list(reversed(s.maps)), s.D, s.p, s.M)
        K = random_points(rng, 6)
        assert g_step(s, K) == g_step(t, K)
        assert grid_step(s, K, 7) == grid_step(t, K, 7)
        assert fractal_step(s, [K, random_points(rng, 3)]) is not None


def test_chunking_does_not_change_results(rng, monkeypatch, example_a):
    K = random_points(rng, 40)
    ref_g, ref_grid = g_step(example_a, K), grid_step(example_a, K, 30, SnapMode.ROUND)
    monkeypatch.setattr(alg, "CHUNK_ROWS", 7)
    monkeypatch.setattr(alg._images, "__defaults__", (7,))
    assert g_step(example_a, K) == ref_g
    assert grid_step(example_a, K, 30, SnapMode.ROUND) == ref_grid


def test_product_sums_deep_recursion():
    parts = [np.arange(3.0)[:, None], np.arange(4.0)[:, None] * 10, np.arange(5.0)[:, None] * 100]
    blocks = list(alg._product_sums(parts, max_rows=3))
    got = np.concatenate(blocks)[:, 0]
    expected = [a + b + c for a in range(3) for b in range(0, 40, 10) for c in range(0, 500, 100)]
    assert got.tolist() == expected


def test_order_three_system(rng):
    s = random_system(rng, M=1, p=3, L=2)
    K = random_points(rng, 4, M=1)
    assert as_set(g_step(s, K)) == oracle_g(s, K)


# deterministic run ---------------------------------------------------------------

def test_zero_applications_returns_seed(example_a):
    K0 = pts([0.2, 0.3])
    K, stats = deterministic_run(example_a, K0, 0)
    assert K == K0 and stats.records == []


def test_two_applications_count(example_a):
    _, stats = deterministic_run(example_a, pts([0.5, 0.5]), 2)
    assert [r.tuples for r in stats.records] == [3, 27]


def test_four_applications_counts(det_a4, example_a):
    K, stats = det_a4
    tuples = [r.tuples for r in stats.records]
    # collision-free recurrence x_k = L x_{k-1}^p from one point
    free = [3, 27, 2187, 3 ** 15]
    assert all(t <= f for t, f in zip(tuples, free))
    assert tuples[:3] == free[:3]
    # exact duplicates appear at step 3 (f1 ignores the second coordinate of its first argument)
    A2 = deterministic_run(example_a, example_a.center(), 2)[0]
    A3 = oracle_g(example_a, A2)
    assert stats.records[2].points == len(A3) == 1976
    assert tuples[3] == 3 * len(A3) ** 2 == 11_713_728
    assert stats.records[3].points == len(K)


def test_deterministic_contraction(examples):
    for s in examples.values():
        K, _ = deterministic_run(s, s.center(), 0)
        seq = [K]
        for _ in range(3):
            seq.append(g_step(s, seq[-1]))
        for k in range(1, len(seq) - 1):
            assert hausdorff(seq[k + 1], seq[k]).h <= s.C * hausdorff(seq[k], seq[k - 1]).h + 1e-9


def test_deterministic_partial_on_budget(example_a):
    K, stats = deterministic_run(example_a, example_a.center(), 4, budget=1000)
    assert stats.partial and stats.steps_done == 2
    assert len(K) == stats.records[-1].points


def test_deterministic_bounds_decay(example_a):
    _, stats = deterministic_run(example_a, example_a.center(), 3)
    b = [r.bound for r in stats.records]
    assert b[1] == pytest.approx(b[0] * example_a.C) and b[2] < b[1]


# snapping ----------------------------------------------------------------------

def test_snap_examples():
    assert snap([0.37], 10, 1.0, SnapMode.FLOOR).tolist() == [0.3]
    assert snap([0.37], 10, 1.0, SnapMode.ROUND).tolist() == [0.4]
    for D in (1.0, 0.3, 7.1, 1e-3):
        for n in (1, 3, 10, 97):
            assert snap([D], n, D, SnapMode.FLOOR).tolist() == [D]
            assert snap_indices([D], n, D).tolist() == [n]
            assert snap([0.0], n, D, SnapMode.ROUND).tolist() == [0.0]


@settings(max_examples=500, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(1, 10_000), st.integers(1, 4), st.data())
def test_snap_displacement_and_idempotence(D, n, M, data):
    v = np.array(data.draw(st.lists(st.floats(0, 1), min_size=M, max_size=M))) * D
    v = np.clip(v, 0, D)
    for mode in SnapMode:
        s = snap(v, n, D, mode)
        disp = float(np.linalg.norm(v - s))
        if mode is SnapMode.FLOOR:
            assert disp < D * math.sqrt(M) / n
            assert np.all(s <= v)
        else:
            assert disp <= D * math.sqrt(M) / (2 * n) + 1e-12 * max(D, 1)
        assert np.array_equal(snap(s, n, D, SnapMode.FLOOR), s)
        assert np.array_equal(snap(s, n, D, mode), s)


# grid step and run --------------------------------------------------------------

def test_grid_step_constant():
    s = constant_system([0.37, 0.81])
    out = grid_step(s, pts([0.5, 0.5]), 10)
    assert out.is_lattice and out.indices.tolist() == [[3, 8]]


def test_grid_step_example_a_n1(example_a):
    # images at the origin are (0,0), (0.4,0), (0,0.04); all floor to index (0,0)
    images = [apply_map(f, [[0, 0], [0, 0]]) for f in example_a.maps]
    assert {tuple(np.floor(y * 1).astype(int)) for y in images} == {(0, 0)}
    assert grid_step(example_a, pts([0.0, 0.0]), 1).points.tolist() == [[0.0, 0.0]]


def test_grid_step_is_snapped_g_step(rng):
    for trial in range(30):
        s = random_system(rng, M=int(rng.integers(1, 4)))
        K = random_points(rng, int(rng.integers(1, 12)), M=s.M)
        n = int(rng.integers(1, 60))
        for mode in SnapMode:
            expected = PointSet.from_indices(snap_indices(g_step(s, K).points, n, s.D, mode), n, s.D)
            got = grid_step(s, K, n, mode)
            assert got == expected
            assert np.array_equal(got.indices, expected.indices)
            assert len(got) <= (n + 1) ** s.M


def test_snap_gap_within_cell_diagonal_random(rng):
    for trial in range(100):
        s = random_system(rng, M=int(rng.integers(1, 3)))
        K = random_points(rng, int(rng.integers(1, 10)), M=s.M)
        n = int(rng.integers(1, 50))
        exact = g_step(s, K)
        eps = s.diameter / n
        assert hausdorff(grid_step(s, K, n, SnapMode.FLOOR), exact).h <= eps
        assert hausdorff(grid_step(s, K, n, SnapMode.ROUND), exact).h <= eps / 2 + 1e-12


def test_grid_run_single_coarse_step(rng):
    for _ in range(5):
        s = random_system(rng)
        out = grid_run(s, schedule=[1]).points
        assert set(map(tuple, out.points.tolist())) <= {(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)}


def test_grid_run_verified_stats(example_a):
    sched = quadratic_schedule(6, 1.0, 2)
    out, stats, certs = grid_run(example_a, schedule=sched, verify=True)
    assert [c.n for c in certs] == [1, 4, 9, 16, 25, 36]
    assert all(c.ok for c in certs)
    prev = stats.initial_points
    for r, n in zip(stats.records, sched.n):
        assert r.tuples == 3 * prev ** 2
        assert r.points <= min(r.tuples, (n + 1) ** 2)
        assert r.eps == pytest.approx(math.sqrt(2) / n)
        prev = r.points
    assert stats.records[-1].bound == pytest.approx(error_bound(sched, example_a.C))
    assert stats.cumulative_tuples[-1] == stats.total_tuples


def test_grid_run_verification_failure_detected(example_a, monkeypatch):
    real = alg.hausdorff

    class Fake:
        def __init__(self, rep):
            self.h = rep.h + 1.0

    monkeypatch.setattr(alg, "hausdorff", lambda a, b: Fake(real(a, b)))
    with pytest.raises(alg.VerificationFailure):
        grid_run(example_a, schedule=[4], verify=True)


def test_grid_run_budget_partial(example_a):
    out, stats, _ = grid_run(example_a, schedule=quadratic_schedule(8, 1, 2), budget=200)
    assert stats.partial and 0 < stats.steps_done < 8
    assert out.n == stats.steps_done ** 2


def test_error_envelope_against_reference(examples):
    for name in ("A", "C"):
        s = examples[name]
        ref_sched = quadratic_schedule(16, 1.0, 2)
        ref = grid_run(s, schedule=ref_sched, mode=SnapMode.ROUND).points
        tol = error_bound(ref_sched, s.C)
        sched = quadratic_schedule(8, 1.0, 2)
        K = s.center()
        for k, n in enumerate(sched.n, start=1):
            K = grid_step(s, K, n)
            assert hausdorff(K, ref).h <= error_bound(sched.n[:k], s.C, 1.0, 2) + tol


def test_clamping_is_counted_for_clamp_policy(examples):
    s = examples["B"]
    _, stats, _ = grid_run(s, PointSet.from_array([[0.0, 0.0], [0.0, 1.0]], 1.0), schedule=[4])
    # f1 sends ((0,1), (0,0)) to (0, -0.05)
    assert stats.records[0].clamped > 0


# memory-p -----------------------------------------------------------------------

def test_memory_p_equal_seeds_is_g_step(rng, example_a):
    K = random_points(rng, 5)
    assert memory_p_run(example_a, [K, K], 1) == g_step(example_a, K)


def test_memory_p_constant_system(rng):
    s = constant_system([0.2, 0.6])
    out = memory_p_run(s, [random_points(rng, 3), random_points(rng, 4)], 1)
    assert out.points.tolist() == [[0.2, 0.6]]
    assert memory_p_run(s, [out, out], 3) == out


def test_memory_p_window_order(example_a):
    a, b = pts([0.0, 0.0]), pts([1.0, 1.0])
    k3 = memory_p_run(example_a, [a, b], 1)
    assert k3 == fractal_step(example_a, [a, b])
    k4 = memory_p_run(example_a, [a, b], 2)
    assert k4 == fractal_step(example_a, [b, k3])


def test_memory_p_against_grid_reference(example_a):
    # six steps would need ~3.5e9 map evaluations; five stay at desk scale
    s = example_a
    steps = 5
    out = memory_p_run(s, [pts([0.0, 0.0]), pts([1.0, 1.0])], steps)
    sched = quadratic_schedule(12, 1.0, 2)
    ref = grid_run(s, schedule=sched).points
    bound = memory_p_bound(s.C, s.p, steps, s.D, s.M) + error_bound(sched, s.C)
    assert hausdorff(out, ref).h <= bound


def test_memory_p_budget(example_a):
    with pytest.raises(TupleBudgetExceeded):
        memory_p_run(example_a, [pts([0.0, 0.0]), pts([1.0, 1.0])], 6)
