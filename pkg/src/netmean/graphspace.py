"""Weight vectors, the vertex-permutation action on edge slots, and orbits.

A labeled graph on ``d`` nodes with nonnegative edge weights is encoded as a
weight vector of length ``D = d*(d-1)/2`` holding the weights of the edges in
lexicographic order of the vertex pairs ``(i, j)``, ``i < j`` (0-based).  A
vertex permutation induces a permutation of the ``D`` edge slots; the orbit of
a weight vector under all induced permutations is the unlabeled network.

Edge indexing is 0-based internally and in all serialized formats; the order
of the weights themselves (the wire format) is the lexicographic edge order
and does not depend on the label base.

Orbit enumeration materializes up to ``d!`` images, so every enumerating
operation is guarded by a node-count cap (default 8, override with the
``NETMEAN_MAX_D`` environment variable).
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ComplexityError, ValidationError

DEFAULT_MAX_D = 8
_CAP_ENV = "NETMEAN_MAX_D"


def enumeration_cap() -> int:
    """Largest node count for which orbit enumeration is allowed."""
    raw = os.environ.get(_CAP_ENV)
    if raw is None:
        return DEFAULT_MAX_D
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap < 2:
        raise ValidationError(f"{_CAP_ENV} must be >= 2, got {cap}")
    return cap


def check_cap(d: int) -> None:
    cap = enumeration_cap()
    if d > cap:
        raise ComplexityError(
            f"node count d={d} exceeds the enumeration cap {cap} "
            f"(d! = {math.factorial(d)} permutations would be materialized); "
            f"raise {_CAP_ENV} to override"
        )


def num_edges(d: int) -> int:
    """Number of edge slots ``D = d*(d-1)/2``."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValidationError(f"node count must be an integer >= 2, got {d!r}")
    return d * (d - 1) // 2


def node_count(D: int) -> int:
    """Inverse of :func:`num_edges`: the ``d`` with ``d*(d-1)/2 == D``."""
    d = int((1 + np.sqrt(1 + 8 * D)) / 2 + 0.5)
    if D < 1 or d * (d - 1) // 2 != D:
        raise ValidationError(f"{D} is not a triangular number d*(d-1)/2 for any d >= 2")
    return d


def edge_order(d: int) -> list[tuple[int, int]]:
    """Vertex pairs ``(i, j)``, ``i < j``, in lexicographic order (0-based).

    The position of a pair in this list is its edge slot index.
    """
    num_edges(d)  # validates d
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def as_weight_vector(w, d: int | None = None) -> np.ndarray:
    """Validate and return ``w`` as a float64 weight vector.

    Checks: one-dimensional, finite, entrywise nonnegative (membership in the
    octant), and of length ``d*(d-1)/2`` for the given or inferred ``d``.
    """
    arr = np.asarray(w, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"weight vector must be 1-dimensional, got shape {arr.shape}")
    if d is None:
        d = node_count(arr.shape[0])
    elif arr.shape[0] != num_edges(d):
        raise ValidationError(
            f"weight vector has length {arr.shape[0]}, expected {num_edges(d)} for d={d}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError("weight vector entries must be finite")
    if np.any(arr < 0):
        k = int(np.argmax(arr < 0))
        raise ValidationError(f"weight vector entry {k} is negative ({arr[k]})")
    return arr


def vectorize(adjacency, tol: float = 1e-12) -> np.ndarray:
    """Read the weight vector off a symmetric nonnegative adjacency matrix.

    The matrix must be symmetric within ``tol``, have a zero diagonal and
    nonnegative entries; violations name the offending cell.
    """
    a = np.asarray(adjacency, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"adjacency must be a square matrix, got shape {a.shape}")
    d = a.shape[0]
    num_edges(d)
    if not np.all(np.isfinite(a)):
        i, j = np.argwhere(~np.isfinite(a))[0]
        raise ValidationError(f"adjacency cell ({i},{j}) is not finite")
    asym = np.abs(a - a.T)
    if np.max(asym) > tol:
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        raise ValidationError(
            f"adjacency is asymmetric at cell ({i},{j}): {a[i, j]} vs {a[j, i]}"
        )
    diag = np.abs(np.diagonal(a))
    if np.max(diag) > 0:
        i = int(np.argmax(diag > 0))
        raise ValidationError(f"adjacency diagonal cell ({i},{i}) is nonzero ({a[i, i]})")
    if np.any(a < 0):
        i, j = np.argwhere(a < 0)[0]
        raise ValidationError(f"adjacency cell ({i},{j}) is negative ({a[i, j]})")
    iu, ju = np.triu_indices(d, k=1)
    return a[iu, ju].copy()


def to_adjacency(w, d: int | None = None) -> np.ndarray:
    """Expand a weight vector back into a symmetric adjacency matrix."""
    arr = as_weight_vector(w, d)
    d = node_count(arr.shape[0])
    a = np.zeros((d, d))
    iu, ju = np.triu_indices(d, k=1)
    a[iu, ju] = arr
    a[ju, iu] = arr
    return a


@dataclass(frozen=True)
class VertexPermutation:
    """A bijection on ``{0, ..., d-1}`` stored as an image array."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValidationError(f"{self.mapping} is not a permutation image array")

    @property
    def d(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]


@dataclass(frozen=True)
class EdgePermutation:
    """The permutation of edge slots induced by a vertex permutation.

    ``mapping[k]`` is the slot that slot ``k`` is sent to.  ``source`` records
    the vertex permutation it was induced from, when known.
    """

    mapping: tuple[int, ...]
    source: VertexPermutation | None = None

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValidationError(f"{self.mapping} is not a permutation image array")

    @property
    def D(self) -> int:
        return len(self.mapping)

    def inverse_array(self) -> np.ndarray:
        return np.argsort(np.asarray(self.mapping))


def identity_edge_permutation(d: int) -> EdgePermutation:
    D = num_edges(d)
    return EdgePermutation(tuple(range(D)), VertexPermutation(tuple(range(d))))


def induce(sigma, d: int) -> EdgePermutation:
    """Edge-slot permutation induced by the vertex permutation ``sigma``.

    Slot ``k`` holding the pair ``(i, j)`` is sent to the slot of the sorted
    pair ``(sigma(i), sigma(j))``.  Composition is covariant:
    ``induce(sigma o tau) == induce(sigma) o induce(tau)``.
    """
    if isinstance(sigma, VertexPermutation):
        images = sigma.mapping
    else:
        images = tuple(int(v) for v in sigma)
    vp = VertexPermutation(images)
    if vp.d != d:
        raise ValidationError(f"permutation acts on {vp.d} vertices, expected {d}")
    pairs = edge_order(d)
    index = {pair: k for k, pair in enumerate(pairs)}
    mapping = []
    for (i, j) in pairs:
        a, b = images[i], images[j]
        if a > b:
            a, b = b, a
        mapping.append(index[(a, b)])
    return EdgePermutation(tuple(mapping), vp)


def compose(p: EdgePermutation, q: EdgePermutation) -> EdgePermutation:
    """``(p o q)(k) = p(q(k))``."""
    if p.D != q.D:
        raise ValidationError("cannot compose edge permutations of different sizes")
    mapping = tuple(p.mapping[k] for k in q.mapping)
    source = None
    if p.source is not None and q.source is not None:
        source = VertexPermutation(tuple(p.source.mapping[v] for v in q.source.mapping))
    return EdgePermutation(mapping, source)


def invert(p: EdgePermutation) -> EdgePermutation:
    inv = tuple(int(v) for v in np.argsort(np.asarray(p.mapping)))
    source = None
    if p.source is not None:
        source = VertexPermutation(tuple(int(v) for v in np.argsort(np.asarray(p.source.mapping))))
    return EdgePermutation(inv, source)


def act(pi: EdgePermutation, w) -> np.ndarray:
    """Apply an edge permutation to a weight vector: result slot ``pi(k)``
    receives entry ``k``, i.e. ``result[k] = w[pi^{-1}(k)]``."""
    arr = as_weight_vector(w)
    if pi.D != arr.shape[0]:
        raise ValidationError(f"edge permutation size {pi.D} does not match D={arr.shape[0]}")
    out = np.empty_like(arr)
    out[np.asarray(pi.mapping)] = arr
    return out


@lru_cache(maxsize=8)
def _action_table(d: int) -> dict:
    """All d! vertex permutations and their induced edge-slot action.

    Returns read-only arrays:
      ``vertex``    (d!, d)  vertex image arrays, rows sorted so that the
                             induced edge image arrays are in ascending
                             lexicographic order (identity row first);
      ``edge``      (d!, D)  induced edge image arrays, same row order;
      ``inv_edge``  (d!, D)  row-wise inverses: ``act(g, w) == w[inv_edge[g]]``.
    """
    D = num_edges(d)
    perms = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
    pairs = np.array(edge_order(d), dtype=np.int64)
    lookup = np.full((d, d), -1, dtype=np.int64)
    for k, (i, j) in enumerate(pairs):
        lookup[i, j] = k
    edge = np.empty((perms.shape[0], D), dtype=np.int64)
    for k, (i, j) in enumerate(pairs):
        a = perms[:, i]
        b = perms[:, j]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        edge[:, k] = lookup[lo, hi]
    order = np.lexsort(edge.T[::-1])
    perms = perms[order]
    edge = edge[order]
    inv_edge = np.argsort(edge, axis=1)
    for arr in (perms, edge, inv_edge):
        arr.setflags(write=False)
    return {"vertex": perms, "edge": edge, "inv_edge": inv_edge}


def vertex_permutations(d: int) -> np.ndarray:
    """All ``d!`` vertex permutations (image arrays), cap-guarded."""
    check_cap(d)
    return _action_table(d)["vertex"]


def induced_permutations(d: int, unique: bool = True) -> np.ndarray:
    """Induced edge-slot image arrays for all vertex permutations.

    With ``unique=True`` duplicate rows are collapsed (the vertex action on
    edge slots is faithful only for d >= 3; for d = 2 both vertex
    permutations induce the identity on the single slot).
    """
    check_cap(d)
    edge = _action_table(d)["edge"]
    if unique:
        _, idx = np.unique(edge, axis=0, return_index=True)
        return edge[np.sort(idx)]
    return edge


def orbit_images(w, d: int | None = None) -> np.ndarray:
    """All images ``sigma . w`` over vertex permutations, one row per row of
    :func:`vertex_permutations` (duplicates retained)."""
    arr = as_weight_vector(w, d)
    d = node_count(arr.shape[0])
    check_cap(d)
    return arr[_action_table(d)["inv_edge"]]


def orbit(w, d: int | None = None) -> np.ndarray:
    """Deduplicated orbit of ``w`` as an array of rows in ascending
    lexicographic order.  Its size divides ``d!`` and equals ``d!`` exactly
    when ``w`` is distinct."""
    return np.unique(orbit_images(w, d), axis=0)


def stabilizer(w, d: int | None = None) -> np.ndarray:
    """Vertex permutations fixing ``w`` exactly (one row per permutation)."""
    arr = as_weight_vector(w, d)
    images = orbit_images(arr)
    fixed = np.all(images == arr, axis=1)
    return _action_table(node_count(arr.shape[0]))["vertex"][fixed]


def is_distinct(w, d: int | None = None) -> bool:
    """True iff no nonidentity vertex permutation fixes ``w``.

    Comparison is exact on the stored float values; tolerance-based
    stabilizers would make distinctness non-transitive.
    """
    return stabilizer(w, d).shape[0] == 1


def canonicalize(w, d: int | None = None) -> np.ndarray:
    """Canonical orbit representative: the lexicographically greatest image.

    Idempotent and constant on orbits, so it provides stable equality and
    hashing for unlabeled networks.
    """
    images = orbit(w, d)
    return images[-1].copy()


@dataclass(frozen=True)
class UnlabeledNetwork:
    """An equivalence class of weight vectors under vertex relabeling.

    Two instances compare equal iff their canonical representatives agree
    entrywise.
    """

    representative: tuple[float, ...]
    canonical: tuple[float, ...]

    @classmethod
    def from_weights(cls, w, d: int | None = None) -> "UnlabeledNetwork":
        arr = as_weight_vector(w, d)
        return cls(tuple(arr.tolist()), tuple(canonicalize(arr).tolist()))

    @property
    def d(self) -> int:
        return node_count(len(self.representative))

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnlabeledNetwork):
            return NotImplemented
        return self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash(self.canonical)
