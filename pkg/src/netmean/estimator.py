"""Scikit-learn style estimator facade for Frechet mean computation.

``FrechetMean`` follows the fit/transform contract: ``fit`` ingests a batch
of networks (weight-vector rows or a stack of adjacency matrices) and
estimates their Frechet mean; ``transform`` maps networks to their orbit
representatives aligned to the fitted mean, a canonical Euclidean embedding
that downstream vector methods can consume in a Pipeline.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from . import graphspace as gs
from . import metric
from .errors import CertificateError, ValidationError
from .frechet import SampleSet, frechet_value, mean_cone, mean_exact_small, mean_iterative, medoid


def check_network_array(X) -> np.ndarray:
    """Validate a batch of networks and return weight-vector rows.

    Accepts an (n, D) array of weight vectors (D triangular) or an
    (n, d, d) stack of symmetric nonnegative adjacency matrices.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 3:
        if arr.shape[1] != arr.shape[2]:
            raise ValidationError(f"adjacency stack must be (n, d, d), got {arr.shape}")
        return np.vstack([gs.vectorize(a)[None, :] for a in arr])
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise ValidationError(f"expected an (n, D) array of weight vectors, got shape {arr.shape}")
    gs.node_count(arr.shape[1])
    for i, row in enumerate(arr):
        if np.any(row < 0) or not np.all(np.isfinite(row)):
            raise ValidationError(f"row {i} is not a valid nonnegative finite weight vector")
    return arr


class FrechetMean(BaseEstimator, TransformerMixin):
    """Frechet (Procrustean) mean of a sample of unlabeled networks.

    Parameters
    ----------
    method : {"auto", "cone", "iterative", "exact"}
        "cone" uses the certified closed form about ``cone_axis`` (error if
        the quarter-cone check fails), "iterative" the align-and-average
        scheme, "exact" the guarded brute-force oracle.  "auto" tries the
        cone estimator (axis defaulting to the sample medoid) and falls back
        to iterative when the certificate fails.
    cone_axis : array-like or None
        Distinct axis for the cone certificate; defaults to the medoid.
    max_iter, tol : iterative stopping controls.

    Attributes
    ----------
    mean_ : (D,) weight vector of the estimated mean.
    frechet_value_ : empirical Frechet function at ``mean_``.
    certificate_ : "cone_unique", "local_only" or "none".
    cone_ : the certifying cone when available, else None.
    n_iter_ : iterations used (0 for closed forms).
    d_ : node count; n_features_in_ : D.
    """

    def __init__(self, method="auto", cone_axis=None, max_iter=100, tol=1e-12):
        self.method = method
        self.cone_axis = cone_axis
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y=None):
        W = check_network_array(X)
        s = SampleSet(d=gs.node_count(W.shape[1]), samples=W)
        if self.method not in ("auto", "cone", "iterative", "exact"):
            raise ValidationError(f"unknown method {self.method!r}")
        axis = None
        if self.method in ("auto", "cone"):
            axis = self.cone_axis if self.cone_axis is not None else medoid(s)
        if self.method == "cone":
            result = mean_cone(s, axis)
        elif self.method == "iterative":
            result = mean_iterative(s, max_iter=self.max_iter, tol=self.tol)
        elif self.method == "exact":
            result = mean_exact_small(s)
        else:
            try:
                result = mean_cone(s, axis)
            except (CertificateError, ValidationError):
                result = mean_iterative(s, max_iter=self.max_iter, tol=self.tol)
        self.mean_ = result.mean
        self.frechet_value_ = result.frechet_value
        self.certificate_ = result.certificate
        self.cone_ = result.cone
        self.n_iter_ = result.iterations
        self.d_ = s.d
        self.n_features_in_ = W.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "mean_"):
            raise NotFittedError("this FrechetMean instance is not fitted yet; call fit first")

    def transform(self, X) -> np.ndarray:
        """Orbit representatives of ``X`` aligned to the fitted mean."""
        self._check_fitted()
        W = check_network_array(X)
        if W.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"X has {W.shape[1]} features, expected {self.n_features_in_}"
            )
        reps, _ = metric.align_many(self.mean_, W)
        return reps

    def score(self, X, y=None) -> float:
        """Negative empirical Frechet value of the fitted mean on ``X``."""
        self._check_fitted()
        W = check_network_array(X)
        s = SampleSet(d=self.d_, samples=W)
        return -frechet_value(self.mean_, s)
