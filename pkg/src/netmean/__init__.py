"""Averages of unlabeled, undirected, edge-weighted networks.

The package encodes labeled graphs as weight vectors, models the quotient by
vertex relabeling through the induced permutation action, and provides the
Procrustean metric, Dirichlet fundamental domains, Frechet mean estimators
with uniqueness certificates, seeded samplers, and asymptotic diagnostics
(law of large numbers, central limit behavior, k-sample testing).
"""

__version__ = "0.1.0"

from .errors import (
    CertificateError,
    ComplexityError,
    DegenerateAxisError,
    DegenerateDomainError,
    NetmeanError,
    SamplingError,
    ValidationError,
)

from .estimator import FrechetMean
from .frechet import MeanResult, SampleSet
from .metric import Cone, DistanceResult, procrustean_distance
from .sampling import DistributionSpec

__all__ = [
    "CertificateError",
    "ComplexityError",
    "Cone",
    "DegenerateAxisError",
    "DegenerateDomainError",
    "DistanceResult",
    "DistributionSpec",
    "FrechetMean",
    "MeanResult",
    "NetmeanError",
    "SampleSet",
    "SamplingError",
    "ValidationError",
    "procrustean_distance",
    "__version__",
]
