"""Dirichlet fundamental domains as half-space intersections.

For a distinct axis vector ``w`` the set of weight vectors at least as close
to ``w`` as to any of its orbit images is a solid polyhedral cone on the
origin.  Its raw H-representation has one homogeneous constraint per
nonidentity induced permutation, with normal components ``w[sigma(j)] - w[j]``,
plus the coordinate half-spaces of the octant.  This module builds that
representation, prunes it to an irredundant one with an exact rational
simplex, classifies membership, and enumerates extreme rays with the double
description method.

Exact geometry interprets float weights at their printed decimal precision
(``Fraction(repr(x))``), so an input like 6.1 means exactly 61/10.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import graphspace as gs
from ._lp import OPTIMAL, max_over_cone_box
from .errors import ComplexityError, DegenerateDomainError, ValidationError

RAY_DIMENSION_GUARD = 6
EXACT_DIMENSION_LIMIT = 10
BOUNDARY_TOL = 1e-9


def _rationalize(values) -> tuple[Fraction, ...]:
    out = []
    for v in values:
        if isinstance(v, (Fraction, int)):
            out.append(Fraction(v))
        else:
            out.append(Fraction(repr(float(v))))
    return tuple(out)


def _primitive(vec: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    """Scale a rational vector to a primitive integer vector (same sign)."""
    denoms = [f.denominator for f in vec]
    lcm = 1
    for q in denoms:
        lcm = lcm * q // gcd(lcm, q)
    ints = [int(f * lcm) for f in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints)


@dataclass(frozen=True)
class HalfSpace:
    """Homogeneous constraint ``normal . z <= 0`` with a nonzero normal."""

    normal: tuple[Fraction, ...]

    def __post_init__(self):
        if not any(self.normal):
            raise ValidationError("half-space normal must be nonzero")

    @classmethod
    def from_values(cls, values) -> "HalfSpace":
        return cls(_primitive(_rationalize(values)))

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.normal])

    def value(self, z: np.ndarray) -> float:
        return float(self.floats() @ z)


@dataclass
class Polyhedron:
    """H-representation of a cone on the origin, optionally with rays."""

    dim: int
    halfspaces: list[HalfSpace]
    axis: np.ndarray | None = None
    rays: list[tuple[Fraction, ...]] | None = None

    def normal_matrix(self) -> np.ndarray:
        return np.array([h.floats() for h in self.halfspaces])

    def to_json(self) -> dict:
        out = {
            "dim": self.dim,
            "halfspaces": [[_frac_json(v) for v in h.normal] for h in self.halfspaces],
        }
        if self.axis is not None:
            out["axis"] = [float(v) for v in self.axis]
        if self.rays is not None:
            out["rays"] = [[_frac_json(v) for v in r] for r in self.rays]
        return out


def _frac_json(v: Fraction):
    return int(v) if v.denominator == 1 else float(v)


def build_fundamental_domain(w, d: int | None = None) -> Polyhedron:
    """Raw H-representation of the Dirichlet domain centered at ``w``.

    One half-space per nonidentity induced permutation (``d! - 1`` of them,
    normals ``w[sigma(j)] - w[j]``) plus the ``D`` coordinate half-spaces.
    Requires ``w`` distinct, which guarantees every permutation normal is
    nonzero and that ``w`` strictly satisfies each of them.
    """
    arr = gs.as_weight_vector(w, d)
    d = gs.node_count(arr.shape[0])
    gs.check_cap(d)
    if not gs.is_distinct(arr):
        raise DegenerateDomainError(
            "fundamental domain requires a distinct axis vector; "
            "a nontrivial stabilizer makes some half-space normals vanish"
        )
    D = arr.shape[0]
    w_exact = _rationalize(arr)
    table = gs._action_table(d)
    edge = table["edge"]
    halfspaces = []
    identity = np.arange(D)
    for g in range(edge.shape[0]):
        if np.array_equal(edge[g], identity):
            continue
        normal = tuple(w_exact[edge[g][j]] - w_exact[j] for j in range(D))
        halfspaces.append(HalfSpace(_primitive(normal)))
    for j in range(D):
        e = [Fraction(0)] * D
        e[j] = Fraction(-1)
        halfspaces.append(HalfSpace(tuple(e)))
    return Polyhedron(dim=D, halfspaces=halfspaces, axis=arr.copy())


def reduce(p: Polyhedron) -> Polyhedron:
    """Irredundant H-representation of ``p`` (same feasible set).

    Exact duplicates are merged first; then each remaining half-space is
    dropped iff maximizing its normal over the others (inside the unit box,
    which keeps the homogeneous program bounded) cannot reach a positive
    value.  Exact rational pivoting for dim <= 10, float with tolerance
    above.
    """
    merged: dict[tuple[Fraction, ...], HalfSpace] = {}
    for h in p.halfspaces:
        key = _primitive(h.normal)
        if key not in merged:
            merged[key] = HalfSpace(key)
    normals = list(merged)
    exact = p.dim <= EXACT_DIMENSION_LIMIT
    active = [True] * len(normals)
    for i in range(len(normals)):
        others = [normals[j] for j in range(len(normals)) if active[j] and j != i]
        status, value = max_over_cone_box(
            normals[i], others, exact=exact, tol=BOUNDARY_TOL, stop_when_positive=True
        )
        cuts = status != OPTIMAL or value > (0 if exact else BOUNDARY_TOL)
        if not cuts:
            active[i] = False
    kept = [HalfSpace(normals[i]) for i in range(len(normals)) if active[i]]
    return Polyhedron(dim=p.dim, halfspaces=kept, axis=p.axis)


def contains(p: Polyhedron, z, tol: float = BOUNDARY_TOL) -> str:
    """Classify ``z`` against ``p``: ``"inside"``, ``"boundary"``, ``"outside"``.

    The classification is by the largest constraint value: strictly below
    ``-tol`` everywhere is inside, above ``+tol`` anywhere is outside,
    otherwise boundary.
    """
    za = np.asarray(z, dtype=float)
    if za.shape != (p.dim,):
        raise ValidationError(f"point has shape {za.shape}, expected ({p.dim},)")
    worst = max(h.value(za) for h in p.halfspaces)
    if worst > tol:
        return "outside"
    if worst < -tol:
        return "inside"
    return "boundary"


def rays(p: Polyhedron) -> list[tuple[Fraction, ...]]:
    """Extreme rays of ``p`` by double description, seeded from the octant.

    Valid for cones contained in the nonnegative orthant (every fundamental
    domain is).  Rays are normalized so the first nonzero coordinate is 1 and
    returned in ascending lexicographic order.  Guarded to dim <= 6: the
    output size can grow combinatorially with dimension.
    """
    D = p.dim
    if D > RAY_DIMENSION_GUARD:
        raise ComplexityError(
            f"ray enumeration is guarded to dim <= {RAY_DIMENSION_GUARD}, got {D}"
        )
    coord_ids = {}
    for j in range(D):
        e = [Fraction(0)] * D
        e[j] = Fraction(-1)
        coord_ids[tuple(e)] = j
    listed = []
    seen = set(coord_ids)
    for h in p.halfspaces:
        key = _primitive(h.normal)
        if key in seen:
            continue
        seen.add(key)
        listed.append(key)
    result = _double_description(listed, D)
    normalized = []
    for v in result:
        first = next(x for x in v if x != 0)
        normalized.append(tuple(x / first for x in v))
    return sorted(normalized)


def _double_description(constraints: list[tuple[Fraction, ...]], D: int):
    """Motzkin double description over the octant seed cone.

    State: extreme rays as primitive integer vectors plus the set of
    processed constraints each ray is tight on.  Constraint ids 0..D-1 are
    the octant coordinate planes; listed constraints follow.
    """
    rays_v: list[tuple[int, ...]] = []
    rays_z: list[frozenset[int]] = []
    for j in range(D):
        v = [0] * D
        v[j] = 1
        rays_v.append(tuple(v))
        rays_z.append(frozenset(k for k in range(D) if k != j))

    for t, a in enumerate(constraints):
        cid = D + t
        a_int = [int(x) for x in _primitive(a)]
        vals = [sum(ai * vi for ai, vi in zip(a_int, v)) for v in rays_v]
        plus = [i for i, val in enumerate(vals) if val > 0]
        minus = [i for i, val in enumerate(vals) if val < 0]
        zero = [i for i, val in enumerate(vals) if val == 0]
        if not plus:
            rays_v = [rays_v[i] for i in minus + zero]
            rays_z = [
                rays_z[i] if i in minus else rays_z[i] | {cid} for i in minus + zero
            ]
            continue
        new_v: list[tuple[int, ...]] = [rays_v[i] for i in minus]
        new_z: list[frozenset[int]] = [rays_z[i] for i in minus]
        for i in zero:
            new_v.append(rays_v[i])
            new_z.append(rays_z[i] | {cid})
        for ip in plus:
            for im in minus:
                common = rays_z[ip] & rays_z[im]
                adjacent = True
                for k in range(len(rays_v)):
                    if k in (ip, im):
                        continue
                    if common <= rays_z[k]:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                comb = tuple(
                    vals[ip] * rays_v[im][j] - vals[im] * rays_v[ip][j]
                    for j in range(D)
                )
                comb = tuple(int(x) for x in _primitive(tuple(Fraction(c) for c in comb)))
                new_v.append(comb)
                new_z.append(common | {cid})
        rays_v = new_v
        rays_z = new_z

    return [tuple(Fraction(x) for x in v) for v in rays_v]
