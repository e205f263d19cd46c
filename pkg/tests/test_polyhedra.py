"""Fundamental domains: construction, reduction, membership, rays.

The irredundant counts for the two d=4 showcase vectors are pinned against
two oracles that share no code with the implementation: a scipy-HiGHS LP
redundancy sweep and a brute-force extreme-ray enumeration over facet
subsets.
"""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from netmean import graphspace as gs
from netmean import metric
from netmean import polyhedra as ph
from netmean.errors import ComplexityError, DegenerateDomainError


def reduce_oracle(N, tol=1e-9):
    """Sequential LP redundancy removal with scipy's HiGHS solver."""
    active = list(range(N.shape[0]))
    for i in range(N.shape[0]):
        if i not in active:
            continue
        others = [j for j in active if j != i]
        res = linprog(
            -N[i],
            A_ub=N[others],
            b_ub=np.zeros(len(others)),
            bounds=[(-1, 1)] * N.shape[1],
            method="highs",
        )
        val = -res.fun if res.status == 0 else np.inf
        if val <= tol:
            active.remove(i)
    return [N[i] for i in active]


def rays_oracle(N, tol=1e-9):
    """Extreme rays from scratch: null directions of (D-1)-subsets of rows."""
    D = N.shape[1]
    rays = []
    for subset in itertools.combinations(range(N.shape[0]), D - 1):
        A = N[list(subset)]
        _, s, vt = np.linalg.svd(A)
        null = vt[np.sum(s > 1e-10) :]
        if null.shape[0] != 1:
            continue
        v = null[0]
        for cand in (v, -v):
            vals = N @ cand
            if np.all(vals <= tol):
                tight = N[np.abs(vals) <= tol]
                if np.linalg.matrix_rank(tight, tol=1e-8) == D - 1:
                    nz = np.argmax(np.abs(cand) > 1e-9)
                    r = cand / cand[nz]
                    if not any(np.allclose(r, q, atol=1e-7) for q in rays):
                        rays.append(r)
    return rays


def normal_set(p):
    return sorted(tuple(int(v) for v in h.normal) for h in p.halfspaces)


class TestBuild:
    def test_raw_counts(self):
        assert len(ph.build_fundamental_domain([3, 2, 1]).halfspaces) == 8  # 3!+3-1
        assert len(ph.build_fundamental_domain([1, 2, 3, 4, 5, 6]).halfspaces) == 29  # 4!+6-1

    def test_axis_strictly_satisfies_permutation_constraints(self):
        w = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        p = ph.build_fundamental_domain(w)
        for h in p.halfspaces[:-6]:  # permutation normals come first
            assert h.value(w) < 0

    def test_axis_contained(self):
        w = np.array([3.0, 2.0, 1.0])
        assert ph.contains(ph.build_fundamental_domain(w), w) == "inside"

    def test_non_distinct_rejected(self):
        with pytest.raises(DegenerateDomainError):
            ph.build_fundamental_domain([1.0, 1.0, 1.0])


class TestReduce:
    def test_d3_sorted_region(self):
        p = ph.reduce(ph.build_fundamental_domain([3, 2, 1]))
        assert normal_set(p) == [(-1, 1, 0), (0, -1, 1), (0, 0, -1)]

    def test_d4_seven(self):
        p = ph.reduce(ph.build_fundamental_domain([1, 2, 3, 4, 5, 6]))
        assert len(p.halfspaces) == 7

    def test_d4_perturbed_matches_lp_oracle(self):
        raw = ph.build_fundamental_domain([1, 2, 3, 4, 5, 6.1])
        reduced = ph.reduce(raw)
        oracle = reduce_oracle(raw.normal_matrix())
        assert len(reduced.halfspaces) == len(oracle) == 14

    def test_idempotent_and_membership_preserving(self):
        rng = np.random.default_rng(0)
        raw = ph.build_fundamental_domain([1, 2, 3, 4, 5, 6])
        red = ph.reduce(raw)
        red2 = ph.reduce(red)
        assert normal_set(red) == normal_set(red2)
        for _ in range(1000):
            z = rng.uniform(-1, 8, 6)
            assert ph.contains(raw, z) == ph.contains(red, z)

    def test_feasible_set_unchanged_on_random_probes(self):
        rng = np.random.default_rng(1)
        raw = ph.build_fundamental_domain([1, 2, 3, 4, 5, 6.1])
        red = ph.reduce(raw)
        for _ in range(300):
            z = rng.uniform(-1, 8, 6)
            assert ph.contains(raw, z) == ph.contains(red, z)


@pytest.fixture(scope="module")
def f321():
    return ph.reduce(ph.build_fundamental_domain([3, 2, 1]))


@pytest.fixture(scope="module", params=[(3, 2, 1), (1, 2, 3, 4, 5, 6)])
def domain(request):
    w = np.array(request.param, dtype=float)
    return w, ph.reduce(ph.build_fundamental_domain(w))


class TestContains:

    def test_axis_inside(self, f321):
        assert ph.contains(f321, np.array([3.0, 2.0, 1.0])) == "inside"

    def test_all_ones_boundary(self, f321):
        assert ph.contains(f321, np.array([1.0, 1.0, 1.0])) == "boundary"

    def test_ascending_outside(self, f321):
        assert ph.contains(f321, np.array([1.0, 2.0, 3.0])) == "outside"

    def test_dimension_mismatch(self, f321):
        with pytest.raises(Exception):
            ph.contains(f321, np.ones(6))

    def test_membership_iff_metric_equality(self, f321):
        w = np.array([3.0, 2.0, 1.0])
        rng = np.random.default_rng(2)
        for _ in range(150):
            z = rng.uniform(0, 5, 3)
            inside = ph.contains(f321, z) in ("inside", "boundary")
            d_e = metric.euclidean_distance(w, z)
            d_p = metric.procrustean_distance(w, z).value
            assert inside == (d_e <= d_p + 1e-9)


class TestRays:
    def test_d3_rays(self):
        p = ph.reduce(ph.build_fundamental_domain([3, 2, 1]))
        rays = ph.rays(p)
        expected = {(1, 0, 0), (1, 1, 0), (1, 1, 1)}
        assert {tuple(int(v) for v in r) for r in rays} == expected

    def test_d4_seven_rays(self):
        p = ph.reduce(ph.build_fundamental_domain([1, 2, 3, 4, 5, 6]))
        assert len(ph.rays(p)) == 7

    def test_d4_perturbed_matches_bruteforce_oracle(self):
        raw = ph.build_fundamental_domain([1, 2, 3, 4, 5, 6.1])
        red = ph.reduce(raw)
        rays = ph.rays(red)
        oracle = rays_oracle(raw.normal_matrix())
        assert len(rays) == len(oracle) == 16

    def test_rays_satisfy_all_constraints(self):
        raw = ph.build_fundamental_domain([1, 2, 3, 4, 5, 6.1])
        red = ph.reduce(raw)
        N = raw.normal_matrix()
        for r in ph.rays(red):
            rv = np.array([float(v) for v in r])
            assert np.all(N @ rv <= 1e-12)

    def test_first_nonzero_is_one(self):
        red = ph.reduce(ph.build_fundamental_domain([1, 2, 3, 4, 5, 6]))
        for r in ph.rays(red):
            first = next(v for v in r if v != 0)
            assert first == 1

    def test_each_facet_tight_on_rank_Dminus1_rays(self):
        red = ph.reduce(ph.build_fundamental_domain([1, 2, 3, 4, 5, 6]))
        rays = [np.array([float(v) for v in r]) for r in ph.rays(red)]
        for h in red.halfspaces:
            n = h.floats()
            tight = [r for r in rays if abs(n @ r) <= 1e-12]
            assert np.linalg.matrix_rank(np.vstack(tight), tol=1e-9) == red.dim - 1

    def test_dimension_guard(self):
        w = np.arange(1.0, 11.0)  # d=5, D=10
        p = ph.build_fundamental_domain(w)
        with pytest.raises(ComplexityError):
            ph.rays(p)


class TestFundamentalDomainProperties:
    def test_tiling(self, domain):
        w, p = domain
        rng = np.random.default_rng(3)
        for _ in range(1000):
            z = rng.uniform(0, 10, w.shape[0])
            rep, _ = metric.align_many(w, z[None, :])
            assert ph.contains(p, rep[0]) in ("inside", "boundary")

    def test_interior_uniqueness(self, domain):
        w, p = domain
        rng = np.random.default_rng(4)
        checked = 0
        for _ in range(300):
            z = rng.uniform(0, 10, w.shape[0])
            rep, _ = metric.align_many(w, z[None, :])
            rep = rep[0]
            if ph.contains(p, rep) != "inside":
                continue
            orbit = metric.orbit_representatives(rep)
            inside = sum(ph.contains(p, q) == "inside" for q in orbit)
            assert inside == 1
            checked += 1
        assert checked > 100

    def test_half_cone_contained(self, domain):
        # the solid cone of half the minimal orbit angle sits inside F
        w, p = domain
        a = metric.cone_angle(w)
        unit = w / np.linalg.norm(w)
        rng = np.random.default_rng(5)
        tested = 0
        for _ in range(500):
            direction = rng.standard_normal(w.shape[0])
            direction -= (direction @ unit) * unit
            direction /= np.linalg.norm(direction)
            phi = rng.uniform(0, a / 2 * 0.999)
            pt = rng.uniform(0.1, 4.0) * (math.cos(phi) * unit + math.sin(phi) * direction)
            if np.any(pt < 0):
                continue
            assert ph.contains(p, pt) in ("inside", "boundary")
            tested += 1
        assert tested > 200

    def test_distinct_vectors_have_interior_representative(self, domain):
        w, p = domain
        rng = np.random.default_rng(6)
        for _ in range(150):
            z = rng.uniform(0, 10, w.shape[0])
            if not gs.is_distinct(z):
                continue
            orbit = metric.orbit_representatives(z)
            assert any(ph.contains(p, q) == "inside" for q in orbit)


class TestFloatFallback:
    def test_high_dimensional_reduction_uses_float_path(self):
        # D = 12 > exact limit: a redundant box-like homogeneous system
        D = 12
        halfspaces = []
        for j in range(D):
            e = [0.0] * D
            e[j] = -1.0
            halfspaces.append(ph.HalfSpace.from_values(e))
        # duplicate of the first constraint, scaled: must merge away
        e = [0.0] * D
        e[0] = -2.0
        halfspaces.append(ph.HalfSpace.from_values(e))
        # a constraint implied by the octant: -sum z_j <= 0 is redundant
        halfspaces.append(ph.HalfSpace.from_values([-1.0] * D))
        p = ph.Polyhedron(dim=D, halfspaces=halfspaces)
        reduced = ph.reduce(p)
        assert len(reduced.halfspaces) == D


class TestSerialization:
    def test_json_shape(self):
        p = ph.reduce(ph.build_fundamental_domain([3, 2, 1]))
        p.rays = ph.rays(p)
        obj = p.to_json()
        assert set(obj) == {"dim", "halfspaces", "axis", "rays"}
        assert sorted(obj["halfspaces"]) == [[-1, 1, 0], [0, -1, 1], [0, 0, -1]]
        assert obj["rays"] == [[1, 0, 0], [1, 1, 0], [1, 1, 1]]

    def test_decimal_rationalization(self):
        h = ph.HalfSpace.from_values([0.1, -0.2, 0.0])
        assert h.normal == (Fraction(1), Fraction(-2), Fraction(0))
