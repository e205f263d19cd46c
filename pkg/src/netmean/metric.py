"""Distances and angles on the space of unlabeled networks.

The Procrustean distance between two networks is the smallest Euclidean
distance between representatives of their orbits.  Because the induced action
permutes coordinates it is a Euclidean isometry, so the double minimum over
two permutations collapses to a single minimum over one; that identity is
exercised by the property tests against a full double enumeration.

The cone angle of a distinct axis vector drives every uniqueness statement:
inside the cone of a quarter of that angle the quotient map is an isometry,
so Euclidean averaging is exact there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import graphspace as gs
from .errors import DegenerateAxisError, ValidationError


@dataclass(frozen=True)
class Cone:
    """Solid cone with vertex at the origin: axis vector and half-angle."""

    axis: np.ndarray
    half_angle: float

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        object.__setattr__(self, "axis", axis)
        if np.linalg.norm(axis) <= 0:
            raise ValidationError("cone axis must have positive norm")
        if not 0 < self.half_angle <= np.pi / 2:
            raise ValidationError(
                f"cone half-angle must lie in (0, pi/2], got {self.half_angle}"
            )


@dataclass(frozen=True)
class DistanceResult:
    """Minimal distance plus the edge permutation achieving it.

    ``value == d_E(x, act(aligner, y))`` for the pair the result came from.
    """

    value: float
    aligner: gs.EdgePermutation

    def to_json(self) -> dict:
        return {"value": self.value, "aligner": list(self.aligner.mapping)}


def euclidean_distance(u, v) -> float:
    """Plain Euclidean distance between two weight vectors of equal length."""
    ua = gs.as_weight_vector(u)
    va = gs.as_weight_vector(v)
    if ua.shape != va.shape:
        raise ValidationError(f"dimension mismatch: {ua.shape[0]} vs {va.shape[0]}")
    return float(np.linalg.norm(ua - va))


def angle(u, v) -> float:
    """Angle in [0, pi] between two nonzero vectors.

    The cosine is clamped to [-1, 1] before arccos for robustness at
    near-parallel vectors.
    """
    ua = np.asarray(u, dtype=float)
    va = np.asarray(v, dtype=float)
    if ua.shape != va.shape:
        raise ValidationError(f"dimension mismatch: {ua.shape} vs {va.shape}")
    nu = np.linalg.norm(ua)
    nv = np.linalg.norm(va)
    if nu == 0 or nv == 0:
        raise ValidationError("angle is undefined for the zero vector")
    c = float(np.dot(ua, va) / (nu * nv))
    return float(np.arccos(min(1.0, max(-1.0, c))))


def in_cone(u, cone: Cone) -> bool:
    """Membership in the solid cone; the vertex (zero vector) belongs."""
    ua = np.asarray(u, dtype=float)
    if ua.shape != np.shape(cone.axis):
        raise ValidationError(
            f"dimension mismatch: {ua.shape} vs cone axis {np.shape(cone.axis)}"
        )
    if np.linalg.norm(ua) == 0:
        return True
    return angle(ua, cone.axis) <= cone.half_angle


def cone_angle(w, d: int | None = None) -> float:
    """Smallest angle between ``w`` and any nontrivial orbit image of it.

    Requires a distinct ``w`` (otherwise the minimum would be zero).
    """
    arr = gs.as_weight_vector(w, d)
    d = gs.node_count(arr.shape[0])
    if not gs.is_distinct(arr):
        raise DegenerateAxisError(
            "cone angle requires a distinct weight vector (trivial stabilizer)"
        )
    images = gs.orbit_images(arr)
    nontrivial = images[np.any(images != arr, axis=1)]
    norms = np.linalg.norm(arr) * np.linalg.norm(nontrivial, axis=1)
    cos = np.clip(nontrivial @ arr / norms, -1.0, 1.0)
    return float(np.arccos(np.max(cos)))


def _unique_action(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deduplicated induced action (edge rows ascending-lex, identity first).

    Returns (vertex image rows, edge image rows, inverse edge rows).
    """
    table = gs._action_table(d)
    edge = table["edge"]
    _, first = np.unique(edge, axis=0, return_index=True)
    keep = np.sort(first)
    return table["vertex"][keep], edge[keep], table["inv_edge"][keep]


def orbit_representatives(w) -> np.ndarray:
    """All distinct-action images of ``w``, ordered by aligner lex order."""
    arr = gs.as_weight_vector(w)
    d = gs.node_count(arr.shape[0])
    gs.check_cap(d)
    _, _, inv_edge = _unique_action(d)
    return arr[inv_edge]


def procrustean_distance(x, y, method: str = "exact") -> DistanceResult:
    """Minimal Euclidean distance between the orbits of ``x`` and ``y``.

    Returns the distance together with the aligner: the edge permutation to
    apply to ``y`` so that ``d_E(x, act(aligner, y))`` attains the minimum.
    Ties are broken toward the smallest aligner in lexicographic image order,
    so the identity wins whenever it is among the minimizers.

    ``method="exact"`` enumerates the induced action (cap-guarded);
    ``method="branch_and_bound"`` prunes a vertex-assignment search tree with
    a sorted-entries lower bound and is exact as well.
    """
    xa = gs.as_weight_vector(x)
    ya = gs.as_weight_vector(y)
    if xa.shape != ya.shape:
        raise ValidationError(f"dimension mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    d = gs.node_count(xa.shape[0])
    if method == "exact":
        gs.check_cap(d)
        return _procrustean_exact(xa, ya, d)
    if method == "branch_and_bound":
        return _procrustean_bnb(xa, ya, d)
    raise ValidationError(f"unknown method {method!r}; use 'exact' or 'branch_and_bound'")


def _procrustean_exact(x: np.ndarray, y: np.ndarray, d: int) -> DistanceResult:
    vertex, edge, inv_edge = _unique_action(d)
    images = y[inv_edge]
    sq = np.sum((images - x) ** 2, axis=1)
    g = int(np.argmin(sq))  # first minimum = lex-smallest aligner
    aligner = gs.EdgePermutation(
        tuple(int(v) for v in edge[g]),
        gs.VertexPermutation(tuple(int(v) for v in vertex[g])),
    )
    # Recompute along the 1-D path so the value is bit-identical to
    # euclidean_distance(x, act(aligner, y)).
    return DistanceResult(float(np.linalg.norm(x - images[g])), aligner)


def _procrustean_bnb(x: np.ndarray, y: np.ndarray, d: int) -> DistanceResult:
    """Exact branch and bound over vertex assignments.

    Builds the map ``p`` with ``p[i]`` = the y-vertex matched to x-vertex
    ``i``, one vertex at a time; the fixed part contributes its exact cost
    and the open part is bounded below by the squared distance between the
    sorted multisets of the remaining entries (rearrangement inequality).

    The returned value always equals the exact enumeration.  The incumbent
    starts at the identity and is replaced only on strict improvement, so the
    identity aligner is preferred whenever it attains the minimum; other
    exact ties may resolve to a different (equally optimal) aligner than the
    enumeration's lexicographic tie-break.
    """
    pairs = gs.edge_order(d)
    slot = {pair: k for k, pair in enumerate(pairs)}

    best_cost = float(np.sum((x - y) ** 2))
    best_p = list(range(d))

    assignment: list[int] = []
    used = [False] * d
    used_y_slots: set[int] = set()

    def remaining_bound() -> float:
        depth = len(assignment)
        open_x = [x[k] for k, (i, j) in enumerate(pairs) if j >= depth]
        if not open_x:
            return 0.0
        open_y = [y[k] for k in range(len(y)) if k not in used_y_slots]
        ox = np.sort(np.asarray(open_x))
        oy = np.sort(np.asarray(open_y))
        return float(np.sum((ox - oy) ** 2))

    def dfs(cost: float):
        nonlocal best_cost, best_p
        depth = len(assignment)
        if depth == d:
            if cost < best_cost:
                best_cost = cost
                best_p = assignment.copy()
            return
        if cost + remaining_bound() >= best_cost:
            return
        for cand in range(d):
            if used[cand]:
                continue
            add = 0.0
            new_slots = []
            for j in range(depth):
                a, b = sorted((assignment[j], cand))
                k_y = slot[(a, b)]
                add += (x[slot[(j, depth)]] - y[k_y]) ** 2
                new_slots.append(k_y)
            if cost + add >= best_cost:
                continue
            assignment.append(cand)
            used[cand] = True
            used_y_slots.update(new_slots)
            dfs(cost + add)
            used_y_slots.difference_update(new_slots)
            used[cand] = False
            assignment.pop()

    if best_cost > 0:
        dfs(0.0)

    # p maps x-vertex -> y-vertex, i.e. p = sigma^{-1}; the aligner acts on y.
    sigma = tuple(int(v) for v in np.argsort(np.asarray(best_p)))
    aligner = gs.induce(sigma, d)
    return DistanceResult(float(np.sqrt(best_cost)), aligner)


def align_many(ref, X, chunk: int = 4096) -> tuple[np.ndarray, np.ndarray]:
    """Nearest orbit representative of every row of ``X`` relative to ``ref``.

    Returns ``(reps, aligner_rows)``: ``reps[i]`` is the orbit image of
    ``X[i]`` closest to ``ref`` (the fundamental-domain representative for
    the domain centered at ``ref``) and ``aligner_rows[i]`` indexes the row
    of the deduplicated action table that produced it.
    """
    ref = gs.as_weight_vector(ref)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != ref.shape[0]:
        raise ValidationError(
            f"sample array has shape {X.shape}, expected (n, {ref.shape[0]})"
        )
    d = gs.node_count(ref.shape[0])
    gs.check_cap(d)
    _, _, inv_edge = _unique_action(d)
    reps = np.empty_like(X)
    rows = np.empty(X.shape[0], dtype=np.int64)
    for start in range(0, X.shape[0], chunk):
        block = X[start : start + chunk]
        images = block[:, inv_edge]  # (b, m, D)
        sq = np.sum((images - ref) ** 2, axis=2)
        g = np.argmin(sq, axis=1)
        reps[start : start + chunk] = images[np.arange(block.shape[0]), g]
        rows[start : start + chunk] = g
    return reps, rows


def procrustean_distance_many(p, X) -> np.ndarray:
    """Exact d_P between ``p`` and every row of ``X`` (vectorized)."""
    reps, _ = align_many(p, np.asarray(X, dtype=float))
    return np.linalg.norm(reps - gs.as_weight_vector(p), axis=1)
