"""Acceptance gate: one test per criterion, at the stated tolerances.

Each criterion prints one PASS/FAIL line (run with ``pytest -s`` to see them
live).  Criterion 1's perturbed-vector counts are asserted exactly as
specified and are expected to fail: exact rational arithmetic yields
14 half-spaces / 16 rays, confirmed by two independent oracles (see
tests/test_polyhedra.py); the test is marked xfail(strict) so the honest
discrepancy stays visible without masking it.
"""

import math
import time

import numpy as np
import pytest

from netmean import frechet as fr
from netmean import graphspace as gs
from netmean import metric
from netmean import polyhedra as ph
from netmean import stats
from netmean.sampling import DistributionSpec, sample

AXIS3 = np.array([3.0, 2.0, 1.0])
AXIS4 = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])


def report(num, ok, detail, t0=None, budget=None):
    timing = ""
    if t0 is not None:
        elapsed = time.monotonic() - t0
        timing = f" [{elapsed:.1f}s"
        if budget is not None:
            timing += f" / budget {budget:.0f}s"
        timing += "]"
    print(f"\nACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}{timing}")
    assert ok, f"criterion {num}: {detail}"
    if t0 is not None and budget is not None:
        assert time.monotonic() - t0 < budget, f"criterion {num} exceeded {budget}s"


def ball_spec(seed, axis, radius=None, frac=0.8):
    axis = np.asarray(axis, dtype=float)
    a = metric.cone_angle(axis)
    if radius is None:
        radius = frac * min(
            float(np.linalg.norm(axis)) * math.sin(a / 4), float(axis.min())
        )
    return DistributionSpec(
        kind="uniform_ball_in_cone",
        seed=seed,
        center=axis,
        radius=radius,
        axis=axis,
        half_angle=a / 4,
    )


def scrambled(spec, n, stream):
    return stats._scrambled_draw(spec, n, stream)


# --------------------------------------------------------------------------


def test_criterion_01_domain_counts_unperturbed():
    t0 = time.monotonic()
    p = ph.reduce(ph.build_fundamental_domain(AXIS4))
    n_half = len(p.halfspaces)
    n_rays = len(ph.rays(p))
    report(
        "1a (w=1..6)",
        n_half == 7 and n_rays == 7,
        f"irredundant half-spaces = {n_half} (want 7), rays = {n_rays} (want 7)",
        t0,
        10,
    )


@pytest.mark.xfail(
    strict=True,
    reason="exact arithmetic gives 14 half-spaces / 16 rays, confirmed by an "
    "independent LP reducer and a brute-force ray oracle; the published "
    "18 / 79 could not be reproduced under any faithful reading",
)
def test_criterion_01_domain_counts_perturbed():
    t0 = time.monotonic()
    w = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.1])
    p = ph.reduce(ph.build_fundamental_domain(w))
    n_half = len(p.halfspaces)
    n_rays = len(ph.rays(p))
    report(
        "1b (w=1..5,6.1)",
        n_half == 18 and n_rays == 79,
        f"irredundant half-spaces = {n_half} (want 18), rays = {n_rays} (want 79)",
        t0,
        10,
    )


def test_criterion_02_d3_domain():
    t0 = time.monotonic()
    p = ph.reduce(ph.build_fundamental_domain(AXIS3))
    normals = sorted(tuple(int(v) for v in h.normal) for h in p.halfspaces)
    expected = [(-1, 1, 0), (0, -1, 1), (0, 0, -1)]  # x>=y, y>=z, z>=0
    report(
        2,
        normals == expected,
        f"reduced constraints {normals} == sorted region {expected}",
        t0,
        10,
    )


def test_criterion_03_cone_example():
    t0 = time.monotonic()
    _, rep = fr.cone_example(15.0)
    ok_closed = abs(rep["r0_closed_form"] - 13.5348) < 5e-4
    ok_min = abs(rep["r0_closed_form"] - rep["r0_minimized"]) < 1e-3
    ok_theta = rep["theta_value_spread"] < 1e-8
    report(
        3,
        ok_closed and ok_min and ok_theta,
        f"r0={rep['r0_closed_form']:.6f} (|r0-13.5348|={abs(rep['r0_closed_form']-13.5348):.2e}), "
        f"|closed-minimized|={abs(rep['r0_closed_form']-rep['r0_minimized']):.2e}, "
        f"theta spread={rep['theta_value_spread']:.2e}",
        t0,
        5,
    )


def _isometry_pairs(axis, n_pairs, seed):
    spec = ball_spec(seed, axis)
    u = sample(spec, n_pairs, stream=1).samples
    v = sample(spec, n_pairs, stream=2).samples
    d = gs.node_count(u.shape[1])
    _, _, inv_edge = metric._unique_action(d)
    images = v[:, inv_edge]  # (n, m, D)
    sq = np.sum((images - u[:, None, :]) ** 2, axis=2)
    argmins = np.argmin(sq, axis=1)  # identity row is 0 after lex sort
    values = np.sqrt(np.take_along_axis(sq, argmins[:, None], axis=1)[:, 0])
    d_e = np.linalg.norm(u - v, axis=1)
    return argmins, values, d_e


def test_criterion_04_quarter_cone_isometry():
    t0 = time.monotonic()
    worst = 0.0
    all_identity = True
    rng = np.random.default_rng(2024)
    axis4 = np.sort(rng.uniform(1.0, 6.0, 6))[::-1].copy()
    assert gs.is_distinct(axis4)
    for axis, seed in ((AXIS3, 11), (axis4, 12)):
        argmins, values, d_e = _isometry_pairs(axis, 10_000, seed)
        all_identity &= bool(np.all(argmins == 0))
        worst = max(worst, float(np.max(np.abs(values - d_e))))
    report(
        4,
        all_identity and worst <= 1e-12,
        f"aligner always identity: {all_identity}, max |d_P - d_E| = {worst:.2e}",
        t0,
        30,
    )


def test_criterion_05_oracle_equivalence():
    t0 = time.monotonic()
    rng = np.random.default_rng(5)
    worst = 0.0
    for case in range(50):
        if case % 2 == 0:
            axis, n = AXIS3, int(rng.integers(1, 6))
        else:
            axis, n = AXIS4, int(rng.integers(1, 4))
        spec = ball_spec(int(rng.integers(0, 2**31)), axis)
        s = scrambled(spec, n, stream=case + 1)
        cone_res = fr.mean_cone(s, axis)
        exact_res = fr.mean_exact_small(s)
        worst = max(
            worst, metric.procrustean_distance(cone_res.mean, exact_res.mean).value
        )
        lo = s.samples.min(axis=0).min()
        hi = s.samples.max(axis=0).max()
        for start in range(10):
            init = rng.uniform(lo, hi, s.D)
            it = fr.mean_iterative(s, init=init, tol=1e-13)
            worst = max(
                worst, metric.procrustean_distance(cone_res.mean, it.mean).value
            )
    report(5, worst <= 1e-9, f"max pairwise d_P between estimators = {worst:.2e}", t0, 120)


def _grid_refine_minimum(C, B, passes=3, pts=200):
    hi = max(1.0, float(C.max()) + 1.0)
    lo_box = np.zeros(3)
    hi_box = np.full(3, hi)
    best_x = None
    best_f = np.inf
    for _ in range(passes):
        axes = [np.linspace(lo_box[k], hi_box[k], pts) for k in range(3)]
        f1 = axes[0] ** 2 - 2 * C[0] * axes[0]
        f2 = axes[1] ** 2 - 2 * C[1] * axes[1]
        f3 = axes[2] ** 2 - 2 * C[2] * axes[2]
        F = f1[:, None, None] + f2[None, :, None] + f3[None, None, :]
        mask = (axes[0][:, None, None] <= axes[1][None, :, None]) & (
            axes[1][None, :, None] <= axes[2][None, None, :]
        )
        F = np.where(mask, F, np.inf)
        idx = np.unravel_index(np.argmin(F), F.shape)
        best_f = float(F[idx]) + B
        best_x = np.array([axes[0][idx[0]], axes[1][idx[1]], axes[2][idx[2]]])
        span = np.array([(hi_box[k] - lo_box[k]) / (pts - 1) for k in range(3)])
        lo_box = np.maximum(0.0, best_x - 2.5 * span)
        hi_box = np.minimum(hi, best_x + 2.5 * span)
    return best_x, best_f


def test_criterion_06_strata_vs_grid():
    t0 = time.monotonic()
    rng = np.random.default_rng(6)
    worst_pos = 0.0
    worst_val = 0.0
    for _ in range(200):
        C = rng.uniform(-1.0, 2.0, 3)
        B = float(rng.uniform(0.0, 4.0))
        res, _ = fr.mean_d3_strata(C, B)
        gx, gf = _grid_refine_minimum(C, B)
        worst_pos = max(worst_pos, float(np.linalg.norm(gx - res.mean)))
        worst_val = max(worst_val, abs(gf - res.frechet_value))
    report(
        6,
        worst_pos < 1e-4 and worst_val < 1e-6,
        f"max |x_grid - x_strata| = {worst_pos:.2e} (< 1e-4), "
        f"max value gap = {worst_val:.2e} (< 1e-6)",
        t0,
        120,
    )


def test_criterion_07_slln():
    t0 = time.monotonic()
    radius = 0.3
    spec = ball_spec(77, AXIS3, radius=radius)
    rows = stats.slln_experiment(spec, [100, 1000, 10000], replications=100)
    medians = [r["median_error"] for r in rows]
    monotone = medians[0] > medians[1] > medians[2]
    small = medians[2] < 0.05 * radius
    report(
        7,
        monotone and small,
        f"median d_P errors {[f'{m:.4f}' for m in medians]} decreasing={monotone}, "
        f"final < {0.05 * radius:.4f}: {small}",
        t0,
        300,
    )


def test_criterion_08_clt():
    t0 = time.monotonic()
    spec = ball_spec(88, AXIS3, radius=0.3)
    rep = stats.clt_experiment(spec, n=2000, replications=500)
    threshold = 1.63 / math.sqrt(500)
    report(
        8,
        rep["ks_distance"] < threshold,
        f"KS distance {rep['ks_distance']:.4f} < {threshold:.4f} "
        f"(skewness {[f'{v:.2f}' for v in rep['skewness']]})",
        t0,
        600,
    )


def test_criterion_09_ksample_size():
    t0 = time.monotonic()
    spec = ball_spec(99, AXIS3, radius=0.3)
    results = {}
    for k in (2, 3):
        rejections = 0
        reps = 1000
        for r in range(reps):
            groups = [
                scrambled(spec, 500, stream=100_000 * k + 8 * r + j)
                for j in range(k)
            ]
            test = stats.k_sample_test(groups, axis=AXIS3)
            rejections += test.p_value < 0.05
        results[k] = rejections / reps
    ok = all(0.03 <= rate <= 0.07 for rate in results.values())
    report(
        9,
        ok,
        f"empirical size at nominal 0.05: k=2 -> {results[2]:.3f}, k=3 -> {results[3]:.3f} "
        f"(band [0.03, 0.07])",
        t0,
        600,
    )


def _suite_quotient_invariance(rng, cases=1000):
    failures = 0
    for _ in range(cases):
        d = 3 if rng.random() < 0.5 else 4
        D = gs.num_edges(d)
        x, y = rng.random(D), rng.random(D)
        base = metric.procrustean_distance(x, y).value
        pi = gs.induce(tuple(rng.permutation(d)), d)
        rho = gs.induce(tuple(rng.permutation(d)), d)
        moved = metric.procrustean_distance(gs.act(pi, x), gs.act(rho, y)).value
        failures += abs(base - moved) > 1e-12
    return failures


def _suite_triangle(rng, cases=1000):
    failures = 0
    for _ in range(cases):
        d = 3 if rng.random() < 0.5 else 4
        D = gs.num_edges(d)
        x, y, z = rng.random(D), rng.random(D), rng.random(D)
        dxz = metric.procrustean_distance(x, z).value
        dxy = metric.procrustean_distance(x, y).value
        dyz = metric.procrustean_distance(y, z).value
        failures += dxz > dxy + dyz + 1e-12
    return failures


def _suite_single_vs_double(rng, cases=1000):
    failures = 0
    for _ in range(cases):
        d = 3 if rng.random() < 0.5 else 4
        D = gs.num_edges(d)
        x, y = rng.random(D), rng.random(D)
        _, _, inv_edge = metric._unique_action(d)
        xi = x[inv_edge]
        yi = y[inv_edge]
        gram = xi @ yi.T
        double = math.sqrt(
            max(0.0, float(x @ x) + float(y @ y) - 2 * float(np.max(gram)))
        )
        single = metric.procrustean_distance(x, y).value
        failures += abs(single - double) > 1e-12
    return failures


def _suite_orbit_stabilizer(rng, cases=1000):
    failures = 0
    for _ in range(cases):
        d = 3 if rng.random() < 0.5 else 4
        w = rng.integers(0, 3, gs.num_edges(d)).astype(float)
        failures += gs.orbit(w).shape[0] * gs.stabilizer(w).shape[0] != math.factorial(d)
    return failures


def _suite_sine_bound(rng, cases=1000):
    a = rng.uniform(1e-9, np.pi / 2, cases)
    return int(np.sum(np.sin(a / 4) < np.sin(a / 2) / 2 - 1e-15))


def _cone_points(rng, axis, half_angle, count):
    unit = axis / np.linalg.norm(axis)
    out = []
    while len(out) < count:
        direction = rng.standard_normal(axis.shape[0])
        direction -= (direction @ unit) * unit
        direction /= np.linalg.norm(direction)
        phi = rng.uniform(0, half_angle)
        pt = rng.uniform(0.1, 4.0) * (math.cos(phi) * unit + math.sin(phi) * direction)
        if np.all(pt >= 0):
            out.append(pt)
    return out


def _suite_half_cone_contained(rng, cases=1000):
    failures = 0
    for axis in (AXIS3, AXIS4):
        domain = ph.reduce(ph.build_fundamental_domain(axis))
        a = metric.cone_angle(axis)
        for pt in _cone_points(rng, axis, a / 2 * 0.999, cases // 2):
            failures += ph.contains(domain, pt) == "outside"
    return failures


def _suite_interior_representative(rng, cases=1000):
    failures = 0
    for axis in (AXIS3, AXIS4):
        domain = ph.reduce(ph.build_fundamental_domain(axis))
        D = axis.shape[0]
        done = 0
        while done < cases // 2:
            z = rng.uniform(0, 10, D)
            if not gs.is_distinct(z):
                continue
            orbit = metric.orbit_representatives(z)
            failures += not any(ph.contains(domain, q) == "inside" for q in orbit)
            done += 1
    return failures


def test_criterion_10_property_suites():
    t0 = time.monotonic()
    rng = np.random.default_rng(10)
    failures = {
        "quotient_invariance": _suite_quotient_invariance(rng),
        "triangle": _suite_triangle(rng),
        "single_vs_double": _suite_single_vs_double(rng),
        "orbit_stabilizer": _suite_orbit_stabilizer(rng),
        "sine_bound": _suite_sine_bound(rng),
        "half_cone_contained": _suite_half_cone_contained(rng),
        "interior_representative": _suite_interior_representative(rng),
    }
    report(
        10,
        all(v == 0 for v in failures.values()),
        f"failures per 1000-case suite: {failures}",
        t0,
        120,
    )


def test_criterion_11_discrepancy_reports():
    t0 = time.monotonic()
    boundary = stats.boundary_pair_report()
    annulus = fr.quarter_annulus_mean()
    boundary_ok = (
        boundary.get("claimed_strict") is True
        and "comparison" in boundary
        and "strict" in boundary["comparison"]
        and "d_P" in boundary["comparison"]
    )
    annulus_ok = "claimed_radius" in annulus and "computed_radius" in annulus
    report(
        11,
        boundary_ok and annulus_ok,
        "boundary-pair and quarter-annulus reports both carry the claim and "
        f"the computed value (boundary strict={boundary['comparison']['strict']}, "
        f"annulus computed={annulus['computed_radius']:.4f} vs claimed "
        f"{annulus['claimed_radius']})",
        t0,
        30,
    )
