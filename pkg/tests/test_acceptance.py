"""Exit criteria for the package, one test per criterion.

Each test prints a ``[AC<n>] PASS/FAIL`` line; the lines are repeated in the
pytest terminal summary.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from gdlearn.connection import assemble_connection_laplacian
from gdlearn.dataset import (sample_plane_grid, sample_sphere, sample_swiss_roll_clusters,
                             sample_torus)
from gdlearn.gdl import GdlParams, GeodesicDistanceLearner
from gdlearn.metrics import (RankingRelevance, average_precision, mean_abs_error,
                             mean_average_precision, precision_at, rank_relevance, recall_at)
from gdlearn.oracle import shortest_path_distances
from gdlearn.solver import solve_least_squares, solve_spd

from conftest import random_instance, random_rotations, record_acceptance
from test_connection import quadratic_by_edges

DEFAULT_PARAMS = GdlParams(k=16, t=1.0, d=2, weights="binary")


def check(tag, passed, detail):
    record_acceptance(f"[{tag}] {'PASS' if passed else 'FAIL'} {detail}")
    assert passed, detail


def test_ac1_torus_benchmark():
    cloud = sample_torus(2000, 2.0, 0.8, 7)
    queries = np.random.default_rng(0).choice(cloud.n, 10, replace=False)
    start = time.perf_counter()
    learner = GeodesicDistanceLearner(cloud, DEFAULT_PARAMS)
    F = learner.distances(queries)
    elapsed = time.perf_counter() - start
    errors = [mean_abs_error(F[:, c], shortest_path_distances(learner.graph, q).values)
              .mean_abs_error for c, q in enumerate(queries)]
    err = float(np.mean(errors))
    check("AC1", err <= 0.05 and elapsed <= 60,
          f"torus n=2000 mean rescaled error {err:.4f} (bound 0.05, per query "
          f"{np.round(errors, 3).tolist()}), runtime {elapsed:.1f}s (bound 60s)")


def test_ac2_plane_grid():
    cloud = sample_plane_grid(40)
    start = time.perf_counter()
    f = GeodesicDistanceLearner(cloud, DEFAULT_PARAMS).distance(0)
    elapsed = time.perf_counter() - start
    err = mean_abs_error(f, np.linalg.norm(cloud.points, axis=1)).mean_abs_error
    check("AC2", err <= 0.05 and elapsed <= 10,
          f"40x40 plane corner query error {err:.4f} (bound 0.05), runtime {elapsed:.1f}s")


def test_ac3_sphere():
    cloud = sample_sphere(2000, 1.0, 0)
    q = int(np.random.default_rng(0).integers(cloud.n))
    f = GeodesicDistanceLearner(cloud, DEFAULT_PARAMS).distance(q).values
    great_circle = np.arccos(np.clip(cloud.points @ cloud.points[q], -1.0, 1.0))
    err_all = mean_abs_error(f, great_circle).mean_abs_error
    keep = great_circle <= np.quantile(great_circle, 0.95)
    err_kept = mean_abs_error(f[keep], great_circle[keep]).mean_abs_error
    check("AC3", err_all <= 0.10 and err_kept <= 0.06,
          f"sphere query {q}: error {err_all:.4f} all points (bound 0.10), "
          f"{err_kept:.4f} without 5% nearest antipode (bound 0.06)")


def test_ac4_connection_laplacian_oracle():
    worst_gap, worst_asym, min_rayleigh = 0.0, 0.0, np.inf
    for seed in range(20):
        rng = np.random.default_rng(seed)
        d = 1 + seed % 3
        n = int(rng.integers(d + 6, 21))
        cloud, g, fr = random_instance(seed, n=n, m=3, d=d, k=3)
        B = assemble_connection_laplacian(g, fr)
        Bd = B.toarray()
        worst_asym = max(worst_asym, np.max(np.abs(Bd - Bd.T)))
        for _ in range(50):
            x = rng.standard_normal(n * d)
            quad = x @ (B @ x)
            worst_gap = max(worst_gap, abs(quad - quadratic_by_edges(g, fr, x)) / (1 + x @ x))
            min_rayleigh = min(min_rayleigh, quad / (x @ x))
    check("AC4", worst_gap <= 1e-9 and worst_asym <= 1e-10 and min_rayleigh >= -1e-10,
          f"quadratic-form gap {worst_gap:.2e} (bound 1e-9), asymmetry {worst_asym:.2e} "
          f"(bound 1e-10), min Rayleigh quotient {min_rayleigh:.3e}")


def test_ac5_gauge_invariance():
    cloud = sample_torus(500, 2.0, 0.8, 5)
    params = GdlParams(tol=1e-10)
    base = GeodesicDistanceLearner(cloud, params).prepare()
    rot = random_rotations(np.random.default_rng(5), cloud.n, 2)
    turned = GeodesicDistanceLearner(cloud, params, frames=base.frames.rotated(rot))
    q = int(np.random.default_rng(5).integers(cloud.n))
    f, g = base.distance(q).values, turned.distance(q).values
    rel = np.max(np.abs(f - g)) / np.max(np.abs(f))
    check("AC5", rel <= 1e-6, f"relative sup-norm change {rel:.2e} under frame rotation "
                             "(bound 1e-6)")


def test_ac6_solver_contracts():
    spd_worst = 0.0
    for seed in range(5):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((100, 100))
        A = A.T @ A + np.eye(100)
        b = rng.standard_normal(100)
        x = solve_spd(A, b, tol=1e-10).solution
        spd_worst = max(spd_worst, np.linalg.norm(b - A @ x) / np.linalg.norm(b))
    lsq_worst = 0.0
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        A = rng.standard_normal((50, 30))
        b = rng.standard_normal(50)
        x = solve_least_squares(A, b, tol=1e-10).solution
        lsq_worst = max(lsq_worst, np.max(np.abs(x - np.linalg.solve(A.T @ A, A.T @ b))))
    a = 1.3
    I2 = np.eye(2)
    two_block = np.eye(2) + np.array([[2.0, -2.0], [-2.0, 2.0]])
    block_err = np.max(np.abs(solve_spd(two_block, np.array([a, 0.0])).solution
                              - [3 * a / 5, 2 * a / 5]))
    # the same instance with d = 2 blocks
    two_block_d2 = np.eye(4) + np.block([[2 * I2, -2 * I2], [-2 * I2, 2 * I2]])
    block_err = max(block_err, np.max(np.abs(
        solve_spd(two_block_d2, np.array([a, a, 0, 0])).solution
        - [3 * a / 5, 3 * a / 5, 2 * a / 5, 2 * a / 5])))
    check("AC6", spd_worst <= 1e-10 and lsq_worst <= 1e-8 and block_err <= 1e-10,
          f"SPD relative residual {spd_worst:.2e}, LSQR vs normal equations {lsq_worst:.2e}, "
          f"2-block instance error {block_err:.2e}")


def test_ac7_metric_values():
    ap = average_precision(RankingRelevance([1, 0, 1], 2))
    exact = (Fraction(1) * 1 + Fraction(2, 3) * 1) / 2
    ap_ok = exact == Fraction(5, 6) and abs(ap - 5 / 6) <= 1e-15
    mp = mean_average_precision([RankingRelevance([1, 0], 1), RankingRelevance([0, 1], 1)])
    rng = np.random.default_rng(7)
    prefix_ok = True
    for _ in range(100):
        rel = rng.integers(0, 2, size=int(rng.integers(1, 60))).tolist()
        total = sum(rel) + int(rng.integers(0, 3))
        if total == 0:
            total = 1
        r = RankingRelevance(rel, total)
        hits = 0
        for i, value in enumerate(rel, start=1):
            hits += value
            prefix_ok &= precision_at(r, i) == pytest.approx(hits / i, abs=1e-15)
            prefix_ok &= recall_at(r, i) == pytest.approx(hits / total, abs=1e-15)
    check("AC7", ap_ok and mp == 0.75 and prefix_ok,
          f"AP(1,0,1)={ap!r} vs 5/6, MAP(1.0,0.5)={mp}, prefix identities "
          f"{'hold' if prefix_ok else 'broken'} on 100 vectors")


def test_ac8_retrieval_property():
    lab = sample_swiss_roll_clusters(1500, 3, seed=0)
    rng = np.random.default_rng(0)
    queries = np.concatenate([rng.choice(np.flatnonzero(lab.labels == c), 10, replace=False)
                              for c in range(3)])
    learned = GeodesicDistanceLearner(lab.cloud, DEFAULT_PARAMS).distances(queries)
    X = lab.cloud.points
    ambient = np.linalg.norm(X[:, None, :] - X[queries][None, :, :], axis=2)
    maps = {}
    for name, D in (("gdl", learned), ("euclidean", ambient)):
        maps[name] = mean_average_precision(
            [rank_relevance(D[:, c], lab.labels, q) for c, q in enumerate(queries)])
    check("AC8", maps["gdl"] > maps["euclidean"],
          f"swiss-roll clusters MAP: GDL {maps['gdl']:.4f} vs Euclidean {maps['euclidean']:.4f}")


def _best_time(fn, repeats=3):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def test_ac9_multi_query_amortization():
    cloud = sample_torus(2000, 2.0, 0.8, 7)
    queries = np.random.default_rng(0).choice(cloud.n, 10, replace=False)
    one = _best_time(lambda: GeodesicDistanceLearner(cloud, DEFAULT_PARAMS).distances(queries[:1]))
    ten = _best_time(lambda: GeodesicDistanceLearner(cloud, DEFAULT_PARAMS).distances(queries))
    check("AC9", ten < 4 * one,
          f"10 queries {ten:.2f}s vs single query {one:.2f}s, ratio {ten / one:.2f} (bound 4)")
