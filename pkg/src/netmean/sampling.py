"""Seeded, reproducible samplers for the simulation experiments.

All samplers are rejection-based so that every emitted point satisfies its
support constraints exactly (cone membership, nonnegativity, truncation
range).  Randomness comes from counter-based Philox streams: the triple
(seed, stream_id, index) fully determines each variate, replications can
draw from disjoint substreams, and results do not depend on thread count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import graphspace as gs
from .errors import SamplingError, ValidationError
from .frechet import SampleSet
from .metric import Cone, angle, in_cone

KINDS = ("uniform_ball_in_cone", "truncated_gaussian_cone", "cone_example")
MIN_ACCEPTANCE = 1e-4
_GAUSS_TRUNCATION = 8.0  # radial tail cut for the planar cone example


def rng_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent deterministic substream (64-bit counter-based Philox)."""
    key = np.array([np.uint64(seed % 2**64), np.uint64(stream_id % 2**64)])
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class DistributionSpec:
    """Parameters of one of the supported sampling distributions.

    kind:
      uniform_ball_in_cone    uniform on the Euclidean ball B(center, radius),
                              required to fit inside the cone(axis, half_angle)
                              and inside the octant;
      truncated_gaussian_cone isotropic Gaussian N(center, sigma^2 I)
                              conditioned on the cone and the octant;
      cone_example            planar (r, theta) law with radial density
                              exp(-(r - alpha)^2) on a truncated range and
                              theta uniform on the fundamental wedge
                              [-pi/4, pi/4).
    """

    kind: str
    seed: int
    center: np.ndarray | None = None
    radius: float | None = None
    axis: np.ndarray | None = None
    half_angle: float | None = None
    sigma: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown distribution kind {self.kind!r}; use one of {KINDS}")
        if self.center is not None:
            self.center = np.asarray(self.center, dtype=float)
        if self.axis is not None:
            self.axis = np.asarray(self.axis, dtype=float)
        self.validate()

    def validate(self):
        if self.kind == "cone_example":
            if self.alpha is None or self.alpha < 0:
                raise ValidationError("cone_example needs alpha >= 0")
            return
        if self.center is None or self.axis is None or self.half_angle is None:
            raise ValidationError(f"{self.kind} needs center, axis and half_angle")
        if self.center.shape != self.axis.shape:
            raise ValidationError("center and axis must have the same dimension")
        gs.as_weight_vector(self.center)
        cone = self.cone()
        if self.kind == "uniform_ball_in_cone":
            if self.radius is None or self.radius < 0:
                raise ValidationError("uniform_ball_in_cone needs radius >= 0")
            nc = float(np.linalg.norm(self.center))
            if self.radius > 0:
                if self.radius > nc:
                    raise ValidationError("ball radius exceeds the center norm; cannot fit in a cone")
                reach = angle(self.center, self.axis) + np.arcsin(self.radius / nc)
                if reach > self.half_angle + 1e-12:
                    raise ValidationError(
                        f"ball of radius {self.radius} around the center pokes out of the cone "
                        f"(angular reach {reach:.6f} > half-angle {self.half_angle:.6f})"
                    )
                if np.any(self.center - self.radius < -1e-12):
                    raise ValidationError("ball pokes out of the octant; shrink radius or move center")
            elif not in_cone(self.center, cone):
                raise ValidationError("center lies outside the cone")
        else:
            if self.sigma is None or self.sigma <= 0:
                raise ValidationError("truncated_gaussian_cone needs sigma > 0")

    def cone(self) -> Cone:
        return Cone(self.axis, float(self.half_angle))

    @property
    def d(self) -> int | None:
        if self.kind == "cone_example":
            return None
        return gs.node_count(self.center.shape[0])

    def to_json(self) -> dict:
        out = {"kind": self.kind, "seed": int(self.seed)}
        for name in ("radius", "half_angle", "sigma", "alpha"):
            v = getattr(self, name)
            if v is not None:
                out[name] = float(v)
        for name in ("center", "axis"):
            v = getattr(self, name)
            if v is not None:
                out[name] = [float(x) for x in v]
        return out

    @classmethod
    def from_json(cls, obj) -> "DistributionSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(**obj)


def sample(spec: DistributionSpec, n: int, stream: int = 0) -> SampleSet:
    """Draw ``n`` points; deterministic for fixed (spec.seed, stream, n).

    Rejection proposals are drawn in batches; if the running acceptance rate
    falls below ``MIN_ACCEPTANCE`` the sampler aborts with diagnostics
    instead of hanging on a skinny cone.
    """
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    rng = rng_stream(spec.seed, stream)
    if spec.kind == "uniform_ball_in_cone":
        draws = _sample_uniform_ball(spec, n, rng)
    elif spec.kind == "truncated_gaussian_cone":
        draws = _sample_truncated_gaussian(spec, n, rng)
    else:
        draws = _sample_cone_example(spec, n, rng)
    d = spec.d
    return SampleSet(d=d, samples=draws, seed=int(spec.seed), aligned=False)


def _rejection_loop(n, rng, propose, accept_mask, what):
    out = []
    got = 0
    proposed = 0
    accepted = 0
    batch = max(4 * n, 1024)
    while got < n:
        cand = propose(rng, batch)
        keep = accept_mask(cand)
        proposed += cand.shape[0]
        accepted += int(np.count_nonzero(keep))
        kept = cand[keep]
        out.append(kept[: n - got])
        got += min(kept.shape[0], n - got)
        if proposed >= 10 * batch and accepted / proposed < MIN_ACCEPTANCE:
            raise SamplingError(
                f"{what}: acceptance rate {accepted / proposed:.2e} below "
                f"{MIN_ACCEPTANCE:.0e} after {proposed} proposals"
            )
    return np.vstack(out)


def _sample_uniform_ball(spec, n, rng):
    center = spec.center
    r = float(spec.radius)
    if r == 0:
        return np.tile(center, (n, 1))
    D = center.shape[0]

    def propose(rng, batch):
        return center + rng.uniform(-r, r, size=(batch, D))

    def accept(cand):
        return np.sum((cand - center) ** 2, axis=1) <= r * r

    return _rejection_loop(n, rng, propose, accept, "uniform ball in cone")


def _sample_truncated_gaussian(spec, n, rng):
    center = spec.center
    sigma = float(spec.sigma)
    D = center.shape[0]
    axis = spec.axis
    cos_half = np.cos(spec.half_angle)
    axis_unit = axis / np.linalg.norm(axis)

    def propose(rng, batch):
        return center + sigma * rng.standard_normal(size=(batch, D))

    def accept(cand):
        nonneg = np.all(cand >= 0, axis=1)
        norms = np.linalg.norm(cand, axis=1)
        proj = cand @ axis_unit
        with np.errstate(invalid="ignore", divide="ignore"):
            in_c = np.where(norms == 0, True, proj >= cos_half * norms - 0.0)
        return nonneg & in_c

    return _rejection_loop(n, rng, propose, accept, "truncated Gaussian in cone")


def _sample_cone_example(spec, n, rng):
    alpha = float(spec.alpha)
    lo = max(0.0, alpha - _GAUSS_TRUNCATION)
    hi = alpha + _GAUSS_TRUNCATION

    def propose(rng, batch):
        r = rng.uniform(lo, hi, size=batch)
        u = rng.uniform(0.0, 1.0, size=batch)
        theta = rng.uniform(-np.pi / 4, np.pi / 4, size=batch)
        return np.column_stack([r, theta, u])

    def accept(cand):
        r = cand[:, 0]
        return cand[:, 2] <= np.exp(-((r - alpha) ** 2))

    draws = _rejection_loop(n, rng, propose, accept, "planar cone example")
    return draws[:, :2].copy()
