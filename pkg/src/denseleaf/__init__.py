"""denseleaf: exact first integrals and dense-leaf synthesis for polynomial
distributions with separated variables.

The package splits into an exact layer (rational arithmetic, sparse
polynomials, differential forms, the distribution analysis and the vector
field synthesis with its certificates) and a numeric layer (loop lifting,
holonomy, return accumulation and density measurement).  The `denseleaf`
command drives both from JSON files; see the `cli` module.
"""

from .distribution import (
    SeparatedDistribution,
    bracket_span,
    coefficient_table,
    first_integral,
    span_and_codim,
)
from .dynamics import (
    SimConfig,
    accumulate_returns,
    contraction_check,
    default_generators,
    density_report,
    holonomy_multipliers,
    holonomy_numeric,
    subgroup_density_probe,
)
from .exact import GaussianRational, SparsePoly
from .forms import OneForm, PolyVectorField, contract, exterior_derivative
from .lifting import (
    contact_distribution,
    legendrian_product,
    lift_loop,
    lift_vector_field,
)
from .returns import ElementaryVector, return_series
from .synthesis import SynthesisError, synthesize_Z

__version__ = "0.1.0"

__all__ = [
    "ElementaryVector",
    "GaussianRational",
    "OneForm",
    "PolyVectorField",
    "SeparatedDistribution",
    "SimConfig",
    "SparsePoly",
    "SynthesisError",
    "accumulate_returns",
    "bracket_span",
    "coefficient_table",
    "contact_distribution",
    "contract",
    "contraction_check",
    "default_generators",
    "density_report",
    "exterior_derivative",
    "first_integral",
    "holonomy_multipliers",
    "holonomy_numeric",
    "legendrian_product",
    "lift_loop",
    "lift_vector_field",
    "return_series",
    "span_and_codim",
    "subgroup_density_probe",
    "synthesize_Z",
    "__version__",
]
