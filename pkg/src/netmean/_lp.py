"""Small dense simplex solver used for half-space redundancy tests.

Maximizes ``c . x`` subject to ``A x <= b``, ``x >= 0`` with ``b >= 0``, so
the slack basis is feasible and no phase-1 is needed.  Bland's rule keeps the
iteration finite under the heavy degeneracy of homogeneous cones.  Entries
may be ``fractions.Fraction`` (exact pivoting) or floats with a tolerance.
"""

from __future__ import annotations

from fractions import Fraction

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
POSITIVE = "positive"


def simplex_max(c, A, b, tol=0, stop_when_positive=False, max_iter=20000):
    """Return ``(status, value)`` for max ``c.x`` s.t. ``A x <= b, x >= 0``.

    ``tol`` is the pivot/optimality tolerance (0 for exact Fraction input).
    With ``stop_when_positive`` the solve stops as soon as the current basic
    feasible solution has objective value > tol (status ``"positive"``),
    which is all a redundancy test needs.
    """
    m = len(A)
    n = len(c)
    # Tableau rows: [A | I | b]; objective row holds reduced costs and -value.
    zero = Fraction(0) if isinstance(c[0], Fraction) else 0.0
    one = Fraction(1) if isinstance(c[0], Fraction) else 1.0
    rows = [list(A[i]) + [zero] * m + [b[i]] for i in range(m)]
    for i in range(m):
        rows[i][n + i] = one
    obj = list(c) + [zero] * (m + 1)
    basis = [n + i for i in range(m)]

    for _ in range(max_iter):
        value = -obj[-1]
        if stop_when_positive and value > tol:
            return POSITIVE, value
        # Bland: entering = smallest index with positive reduced cost.
        enter = -1
        for j in range(n + m):
            if obj[j] > tol:
                enter = j
                break
        if enter < 0:
            return OPTIMAL, value
        # Ratio test; Bland tie-break on smallest basis variable.
        leave = -1
        best = None
        for i in range(m):
            a = rows[i][enter]
            if a > tol:
                ratio = rows[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED, value
        _pivot(rows, obj, leave, enter)
        basis[leave] = enter
    raise RuntimeError("simplex iteration limit reached")


def _pivot(rows, obj, leave, enter):
    piv = rows[leave][enter]
    rows[leave] = [v / piv for v in rows[leave]]
    prow = rows[leave]
    for i in range(len(rows)):
        if i == leave:
            continue
        f = rows[i][enter]
        if f:
            rows[i] = [v - f * p for v, p in zip(rows[i], prow)]
    f = obj[enter]
    if f:
        for j in range(len(obj)):
            obj[j] = obj[j] - f * prow[j]


def max_over_cone_box(objective, normals, exact=True, tol=1e-9, stop_when_positive=True):
    """Maximize ``objective . z`` over ``{z: n . z <= 0 for n in normals}``
    intersected with the box ``|z_j| <= 1``.

    ``z`` is free, so it is split as ``z = u - v`` with ``u, v >= 0``.  The
    box keeps the homogeneous program bounded; by scaling, the maximum over
    the box is positive iff the supremum over the cone is.
    Returns ``(status, value)``.
    """
    D = len(objective)
    if exact:
        conv = Fraction
        eps = 0
    else:
        conv = float
        eps = tol
    c = [conv(v) for v in objective] + [-conv(v) for v in objective]
    A = []
    b = []
    for nrm in normals:
        A.append([conv(v) for v in nrm] + [-conv(v) for v in nrm])
        b.append(conv(0))
    for j in range(D):
        row = [conv(0)] * (2 * D)
        row[j] = conv(1)
        row[D + j] = conv(-1)
        A.append(row)
        b.append(conv(1))
        A.append([-v for v in row])
        b.append(conv(1))
    return simplex_max(c, A, b, tol=eps, stop_when_positive=stop_when_positive)
