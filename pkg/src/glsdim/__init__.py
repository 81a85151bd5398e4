"""Generalized Luroth series expansions and fractal dimensions.

Build a scheme from a weight family and a placement, encode/decode reals to
digit strings, compute the Hausdorff dimension of digit-restricted sets by
certified root finding, and cross-check empirically by seeded sampling and
box counting.
"""

from .dimension import (DEFAULT_BUDGETS, DimensionResult, SeriesBound,
                        dim_hausdorff, dim_limit, dim_root, dim_sup,
                        moran_root_finite, power_sum_bounds, truncation_roots)
from .errors import (ConfigError, DegenerateFitError, DeltaInfinityError,
                     FamilyParameterError, GlsdimError, IndecisiveBoundError,
                     NoRootError, NormalizationError, RouteDisagreementError,
                     UnsupportedSchemeError)
from .families import (ExplicitWeights, GeometricWeights, GoldenWeights,
                       LogLogWeights, LurothWeights, WeightFamily, make_family)
from .sampling import (BoxCountResult, DigitDistribution, SpectrumSample,
                       box_count, empirical_cdf, sample_point, sample_points,
                       spectrum_dimension)
from .scheme import (Cylinder, GLSScheme, Placement, ValidationReport,
                     load_scheme, scheme_from_config, validate_scheme)
from .support import SupportSet

__version__ = "0.1.0"

__all__ = [
    "BoxCountResult", "ConfigError", "Cylinder", "DEFAULT_BUDGETS",
    "DegenerateFitError", "DeltaInfinityError", "DigitDistribution",
    "DimensionResult", "ExplicitWeights", "FamilyParameterError", "GLSScheme",
    "GeometricWeights", "GlsdimError", "GoldenWeights", "IndecisiveBoundError",
    "LogLogWeights", "LurothWeights", "NoRootError", "NormalizationError",
    "Placement", "RouteDisagreementError", "SeriesBound", "SpectrumSample",
    "SupportSet", "UnsupportedSchemeError", "ValidationReport", "WeightFamily",
    "box_count", "dim_hausdorff", "dim_limit", "dim_root", "dim_sup",
    "empirical_cdf", "load_scheme", "make_family", "moran_root_finite",
    "power_sum_bounds", "sample_point", "sample_points", "scheme_from_config",
    "spectrum_dimension", "truncation_roots", "validate_scheme",
]
