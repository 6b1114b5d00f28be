"""Multivariate Gegenbauer expansions on l^q ball index sets, with explicit
a-priori coefficient and error bounds and independent numerical oracles."""

from .polycore import (DomainError, FamilyParam, QuadratureRule, eval_all, eval_at_one, eval_poly,
                       gauss_rule, norm_constant)
from .indexsets import (IndexSet, MultiIndex, ResourceCapError, aleph, ball_volume,
                        cardinality_estimate, efficiency_ratio, enumerate_set, lq_norm)
from .functions import TargetFunction, builtin_function
from .transform import (CoefficientTable, GridSpec, compute_coefficients, evaluate_projection,
                        sup_error)
from .bounds import AnalyticityContext, polyellipse_context, region_context

__version__ = "0.1.0"
