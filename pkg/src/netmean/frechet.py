"""Frechet function evaluation and mean estimation on unlabeled networks.

The empirical Frechet function of a sample is the average squared
Procrustean distance.  Three estimators are provided:

``mean_cone``
    Closed form with a uniqueness certificate: when every sample's
    fundamental-domain representative lies within a quarter of the axis cone
    angle, the quotient map is an isometry there and the Euclidean average of
    the representatives is the unique global Frechet mean.

``mean_iterative``
    Align-and-average: alternately align every sample to the current
    estimate and replace the estimate by the Euclidean mean of the aligned
    samples.  The empirical Frechet value is non-increasing; the certificate
    is upgraded post hoc when the quarter-cone check passes at the fixed
    point.

``mean_exact_small``
    Global oracle by brute force over all representative assignments,
    guarded since the work grows like (d!)^(n-1).

The module also carries the d=3 stratified quadratic minimizer and the two
planar worked examples (squeezed radial law on R^2/Z_4 and the uniform
quarter annulus) used to demonstrate non-unique means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from . import graphspace as gs
from . import metric
from .errors import CertificateError, ComplexityError, ValidationError

EXACT_ENUMERATION_GUARD = 10**6
_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-12, limit=200)


@dataclass
class SampleSet:
    """A batch of weight vectors drawn from one distribution.

    ``d`` is None for planar (non-network) draws such as the R^2/Z_4
    example.  ``aligned`` records that the rows are already stored as
    fundamental-domain representatives of a common axis.
    """

    d: int | None
    samples: np.ndarray
    seed: int | None = None
    aligned: bool = False

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[0] < 1:
            raise ValidationError(
                f"samples must be a nonempty 2-D array, got shape {self.samples.shape}"
            )
        if self.d is not None and self.samples.shape[1] != gs.num_edges(self.d):
            raise ValidationError(
                f"samples have {self.samples.shape[1]} columns, expected "
                f"{gs.num_edges(self.d)} for d={self.d}"
            )

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def D(self) -> int:
        return self.samples.shape[1]


@dataclass
class MeanResult:
    """A Frechet mean estimate with its uniqueness certificate.

    certificate is one of ``"none"`` (no cone certificate applies),
    ``"cone_unique"`` (quarter-cone containment held, the mean is the unique
    global minimizer) or ``"local_only"``.  ``frechet_value`` is the exact
    empirical Frechet function at ``mean``; ``history`` records it per
    iteration for the iterative estimator.
    """

    mean: np.ndarray
    frechet_value: float
    certificate: str = "none"
    cone: metric.Cone | None = None
    iterations: int = 0
    history: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "mean": [float(v) for v in self.mean],
            "frechet_value": float(self.frechet_value),
            "certificate": self.certificate,
            "iterations": int(self.iterations),
            "history": [float(v) for v in self.history],
        }
        if self.cone is not None:
            out["cone"] = {
                "axis": [float(v) for v in self.cone.axis],
                "half_angle": float(self.cone.half_angle),
            }
        return out


def frechet_value(p, s: SampleSet) -> float:
    """Empirical Frechet function: mean squared Procrustean distance."""
    if s.d is None:
        raise ValidationError("Frechet evaluation needs network samples (d set)")
    pa = gs.as_weight_vector(p, s.d)
    dists = metric.procrustean_distance_many(pa, s.samples)
    return float(np.mean(dists**2))


def _cone_representatives(s: SampleSet, axis: np.ndarray) -> np.ndarray:
    if s.aligned:
        return s.samples
    reps, _ = metric.align_many(axis, s.samples)
    return reps


def mean_cone(s: SampleSet, axis) -> MeanResult:
    """Certified closed-form mean for quarter-cone supported samples.

    Every sample's fundamental-domain representative (nearest orbit element
    to ``axis``) must lie in the cone of half the half-angle bound, i.e.
    within ``cone_angle(axis)/4`` of the axis; offenders are reported.  For
    an empirical measure the Euclidean mean of cone points stays in the
    convex cone, which is what the uniqueness argument needs (an
    empirical-measure certificate: convexity of the support itself is not
    checked).
    """
    axis = gs.as_weight_vector(axis, s.d)
    a = metric.cone_angle(axis)
    cone = metric.Cone(axis, a / 4.0)
    reps = _cone_representatives(s, axis)
    offenders = [
        i
        for i in range(reps.shape[0])
        if not (np.linalg.norm(reps[i]) == 0 or metric.angle(reps[i], axis) <= cone.half_angle + 1e-12)
    ]
    if offenders:
        shown = ", ".join(map(str, offenders[:10]))
        more = "..." if len(offenders) > 10 else ""
        raise CertificateError(
            f"{len(offenders)} sample(s) fall outside the quarter cone about the axis "
            f"(indices {shown}{more}); fall back to mean_iterative",
            offenders=offenders,
        )
    mean = reps.mean(axis=0)
    value = frechet_value(mean, s)
    return MeanResult(mean=mean, frechet_value=value, certificate="cone_unique", cone=cone)


def medoid(s: SampleSet) -> np.ndarray:
    """The sample with the smallest empirical Frechet value."""
    best_val = np.inf
    best = s.samples[0]
    for i in range(s.n):
        v = frechet_value(s.samples[i], s)
        if v < best_val - 1e-15:
            best_val = v
            best = s.samples[i]
    return best.copy()


def mean_iterative(
    s: SampleSet,
    init=None,
    max_iter: int = 100,
    tol: float = 1e-12,
) -> MeanResult:
    """Align-and-average estimator.

    Starts from ``init`` (default: the sample medoid, which is
    permutation-equivariant), aligns every sample to the current estimate,
    averages, and repeats until the estimate moves less than ``tol`` or
    ``max_iter`` is hit (non-convergence is visible as
    ``iterations == max_iter``).  The recorded Frechet values are exact and
    non-increasing.  If the fixed point is distinct and all aligned samples
    lie in its quarter cone, the certificate is upgraded to ``cone_unique``.
    """
    if s.d is None:
        raise ValidationError("mean estimation needs network samples (d set)")
    est = gs.as_weight_vector(init, s.d) if init is not None else medoid(s)
    history: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        reps, _ = metric.align_many(est, s.samples)
        history.append(float(np.mean(np.sum((reps - est) ** 2, axis=1))))
        new = reps.mean(axis=0)
        moved = float(np.linalg.norm(new - est))
        est = new
        if moved < tol:
            break
    value = frechet_value(est, s)
    history.append(value)
    certificate = "local_only"
    cone = None
    if gs.is_distinct(est):
        a = metric.cone_angle(est)
        cone = metric.Cone(est, a / 4.0)
        reps, _ = metric.align_many(est, s.samples)
        if all(
            np.linalg.norm(r) == 0 or metric.angle(r, est) <= cone.half_angle + 1e-12
            for r in reps
        ):
            certificate = "cone_unique"
        else:
            cone = None
    return MeanResult(
        mean=est,
        frechet_value=value,
        certificate=certificate,
        cone=cone,
        iterations=iterations,
        history=history,
    )


def mean_exact_small(s: SampleSet) -> MeanResult:
    """Global Frechet mean by brute force over representative assignments.

    Fixes the first sample's representative, enumerates every assignment of
    orbit representatives to the remaining samples, averages each, and
    evaluates the exact empirical Frechet value; the work grows like
    (d!)^(n-1) and is guarded.  Value ties are broken toward the candidate
    with the lexicographically smallest canonical form.
    """
    if s.d is None:
        raise ValidationError("mean estimation needs network samples (d set)")
    d = s.d
    gs.check_cap(d)
    _, _, inv_edge = metric._unique_action(d)
    m = inv_edge.shape[0]
    total = m ** (s.n - 1)
    if total > EXACT_ENUMERATION_GUARD:
        raise ComplexityError(
            f"exact enumeration needs {total} assignments "
            f"(> {EXACT_ENUMERATION_GUARD}); use mean_iterative instead"
        )
    images = [s.samples[i][inv_edge] for i in range(s.n)]  # each (m, D)

    # Candidate means for all assignments (first sample's representative fixed).
    if s.n == 1:
        candidates = s.samples[0][None, :].copy()
    else:
        acc = np.asarray(s.samples[0], dtype=float)[None, :]
        for i in range(1, s.n):
            acc = (acc[:, None, :] + images[i][None, :, :]).reshape(-1, s.D)
        candidates = acc / s.n

    # Exact Frechet value of every candidate, chunked.
    values = np.zeros(candidates.shape[0])
    chunk = 1 << 14
    for start in range(0, candidates.shape[0], chunk):
        block = candidates[start : start + chunk]
        tot = np.zeros(block.shape[0])
        for i in range(s.n):
            diff = block[:, None, :] - images[i][None, :, :]
            tot += np.min(np.sum(diff**2, axis=2), axis=1)
        values[start : start + chunk] = tot / s.n

    best_value = values.min()
    ties = np.flatnonzero(values == best_value)
    if ties.shape[0] > 1:
        keys = [tuple(gs.canonicalize(candidates[i], d)) for i in ties]
        best_idx = ties[min(range(len(keys)), key=keys.__getitem__)]
    else:
        best_idx = ties[0]
    return MeanResult(
        mean=candidates[best_idx].copy(),
        frechet_value=float(best_value),
        certificate="none",
    )


# ---------------------------------------------------------------------------
# d = 3: the Frechet function is a quadratic on the order region and its
# minimizer is found among eight stratum-wise projections.
# ---------------------------------------------------------------------------

#: (stratum id, dimension, description, projector C -> candidate)
_D3_STRATA = (
    (1, 3, "interior 0<x1<x2<x3", lambda C: (C[0], C[1], C[2])),
    (2, 2, "face x1=0", lambda C: (0.0, C[1], C[2])),
    (3, 2, "face x1=x2", lambda C: ((C[0] + C[1]) / 2, (C[0] + C[1]) / 2, C[2])),
    (4, 2, "face x2=x3", lambda C: (C[0], (C[1] + C[2]) / 2, (C[1] + C[2]) / 2)),
    (5, 1, "edge x1=x2=0", lambda C: (0.0, 0.0, C[2])),
    (6, 1, "edge x1=0, x2=x3", lambda C: (0.0, (C[1] + C[2]) / 2, (C[1] + C[2]) / 2)),
    (7, 1, "diagonal x1=x2=x3", lambda C: ((C[0] + C[1] + C[2]) / 3,) * 3),
    (8, 0, "origin", lambda C: (0.0, 0.0, 0.0)),
)


def d3_moments(s: SampleSet) -> tuple[np.ndarray, float]:
    """Ascending-order moments (C, B) of a d=3 sample.

    For d=3 every entry permutation is induced, so sorting ascending puts
    each sample into the order region; C[i] is the mean of the i-th sorted
    coordinate and B the mean squared norm.
    """
    if s.d != 3:
        raise ValidationError("d3_moments is only defined for d=3 samples")
    reps = np.sort(s.samples, axis=1)
    return reps.mean(axis=0), float(np.mean(np.sum(s.samples**2, axis=1)))


def mean_d3_strata(C, B: float) -> tuple[MeanResult, list[dict]]:
    """Minimize ``f(x) = |x|^2 - 2 C.x + B`` over ``{0 <= x1 <= x2 <= x3}``.

    Evaluates the eight stratum candidates (projections of C onto each
    stratum's affine hull), discards the infeasible ones, and returns the
    feasible candidate of least value together with the full per-stratum
    table.  Value ties resolve to the lowest stratum id.
    """
    C = np.asarray(C, dtype=float)
    if C.shape != (3,):
        raise ValidationError(f"moment vector must have shape (3,), got {C.shape}")

    def f(x):
        x = np.asarray(x)
        return float(x @ x - 2 * C @ x + B)

    table = []
    best = None
    for sid, dim, label, proj in _D3_STRATA:
        x = np.asarray(proj(C), dtype=float)
        feasible = bool(x[0] >= 0 and x[0] <= x[1] <= x[2])
        row = {
            "stratum": sid,
            "dim": dim,
            "region": label,
            "candidate": [float(v) for v in x],
            "feasible": feasible,
            "value": f(x),
        }
        table.append(row)
        if feasible and (best is None or row["value"] < best["value"]):
            best = row
    result = MeanResult(
        mean=np.asarray(best["candidate"]),
        frechet_value=best["value"],
        certificate="none",
    )
    return result, table


# ---------------------------------------------------------------------------
# Worked planar examples on the cone R^2 / Z_4 (quarter-plane wedge).
# ---------------------------------------------------------------------------


@dataclass
class ConeExampleSpec:
    """Ingredients of the radial-Gaussian law on the planar quotient cone.

    Density proportional to exp(-(r - alpha)^2) in the fundamental wedge
    theta in [-pi/4, pi/4); Z is the normalizer, c1..c3 the radial moments
    and chi1, chi2 the angular integrals (constant in theta for the flat
    angular profile).
    """

    alpha: float
    Z: float
    c1: float
    c2: float
    c3: float
    chi1: float
    chi2: float

    def frechet_polar(self, r: float, theta: float = 0.0) -> float:
        """Frechet function at polar point (r, theta) for this law."""
        chi1, chi2 = _chi_integrals(theta)
        return (self.c1 * chi1 * r**2 - 2 * self.c2 * chi2 * r + self.c3 * chi1) / self.Z

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "Z": self.Z,
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "chi1": self.chi1,
            "chi2": self.chi2,
        }


def _chi_integrals(theta: float) -> tuple[float, float]:
    chi1, _ = quad(lambda t: 1.0, theta - np.pi / 4, theta + np.pi / 4, **_QUAD_OPTS)
    chi2, _ = quad(lambda t: math.cos(theta - t), theta - np.pi / 4, theta + np.pi / 4, **_QUAD_OPTS)
    return chi1, chi2


def cone_example_r0(alpha: float) -> float:
    """Closed-form minimizing radius of the radial-Gaussian cone example.

    Algebraically equal to
    sqrt(2) (2a + sqrt(pi) e^{a^2} (2a^2+1)(erf(a)+1)) /
    (pi^{3/2} e^{a^2} a (erf(a)+1) + pi)
    but evaluated in an overflow-safe form (divide through by
    sqrt(pi) e^{a^2} (erf(a)+1)) so large alpha does not overflow e^{a^2}.
    """
    if alpha < 0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    t = math.exp(-(alpha**2)) / (math.sqrt(math.pi) * (1.0 + math.erf(alpha)))
    return math.sqrt(2) * (2 * alpha * t + 2 * alpha**2 + 1) / (math.pi * (alpha + t))


def cone_example(alpha: float) -> tuple[ConeExampleSpec, dict]:
    """Quantify the circle of Frechet means of the radial-Gaussian law.

    Computes the normalizer in closed form, the radial moments by adaptive
    quadrature on the (negligibly) truncated support, the angular integrals
    by quadrature, the closed-form minimizing radius, a numerically
    minimized radius from the Frechet function, and the spread of the
    Frechet value over a 16-point theta grid (a circle of minimizers: every
    theta attains the same minimum).
    """
    if alpha < 0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    Z = (math.pi**1.5 / 4.0) * (1.0 + math.erf(alpha))
    lo, hi = max(0.0, alpha - 12.0), alpha + 12.0
    c = {}
    for k in (1, 2, 3):
        val, err = quad(lambda r, k=k: r**k * math.exp(-((r - alpha) ** 2)), lo, hi, **_QUAD_OPTS)
        if not np.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
            raise ArithmeticError(f"radial moment quadrature did not converge (k={k})")
        c[k] = val
    chi1, chi2 = _chi_integrals(0.0)
    spec = ConeExampleSpec(alpha=alpha, Z=Z, c1=c[1], c2=c[2], c3=c[3], chi1=chi1, chi2=chi2)

    r0_closed = cone_example_r0(alpha)
    r0_quadrature = c[2] * chi2 / (c[1] * chi1)
    res = minimize_scalar(
        lambda r: spec.frechet_polar(r, 0.0),
        bounds=(0.0, hi),
        method="bounded",
        options={"xatol": 1e-10},
    )
    r0_minimized = float(res.x)
    thetas = np.linspace(-np.pi / 4, np.pi / 4, 16, endpoint=False)
    values = [spec.frechet_polar(r0_closed, float(t)) for t in thetas]
    report = {
        "alpha": alpha,
        "r0_closed_form": r0_closed,
        "r0_quadrature": r0_quadrature,
        "r0_minimized": r0_minimized,
        "frechet_min": float(min(values)),
        "theta_grid": [float(t) for t in thetas],
        "theta_value_spread": float(max(values) - min(values)),
        "large_alpha_approximation": 2 * math.sqrt(2) * alpha / math.pi,
    }
    return spec, report


def _wedge_angle_distance(theta: float, theta0: float) -> float:
    """Quotient angular distance on R^2/Z_4 (rotations by pi/2)."""
    dd = (theta - theta0) % (np.pi / 2)
    return min(dd, np.pi / 2 - dd)


def quarter_annulus_mean() -> dict:
    """Frechet mean radius of the uniform quarter annulus on the cone.

    The law is the uniform (area) probability measure on the polar rectangle
    [1,2] x [0, pi/2], density (4/(3 pi)) r dr dtheta.  By rotational
    symmetry of the quotient the minimizing radius is the same for every
    axis angle; it equals E[r cos(angular distance)] and is computed by
    quadrature at several axis angles, alongside the claimed reference value
    3/2 (the two are reported side by side, not reconciled).
    """
    norm = 4.0 / (3.0 * math.pi)
    radial2, _ = quad(lambda r: r**2, 1.0, 2.0, **_QUAD_OPTS)
    radial3, _ = quad(lambda r: r**3, 1.0, 2.0, **_QUAD_OPTS)

    def r0_at(theta0: float) -> float:
        ang, _ = quad(
            lambda t: math.cos(_wedge_angle_distance(t, theta0)), 0.0, np.pi / 2, **_QUAD_OPTS
        )
        return norm * radial2 * ang

    angles = {str(t): r0_at(v) for t, v in [("0", 0.0), ("pi/8", np.pi / 8), ("pi/4", np.pi / 4)]}
    computed = angles["pi/4"]
    second_moment = norm * (np.pi / 2) * radial3
    grid = np.linspace(0.0, 3.0, 121)
    curve = [[float(r), float(r**2 - 2 * computed * r + second_moment)] for r in grid]
    return {
        "computed_radius": float(computed),
        "closed_form_radius": float(28 * math.sqrt(2) / (9 * math.pi)),
        "claimed_radius": 1.5,
        "radius_by_axis_angle": {k: float(v) for k, v in angles.items()},
        "second_moment": float(second_moment),
        "frechet_curve": curve,
    }
