"""Extended thermonuclear reaction-rate integrals by quadrature, Mellin-Barnes
contours and Meijer-G residue series, with checks of their G-function forms,
differential equations and pathway limits."""
from .errors import (CoincidentPoleError, ContourError, ConvergenceError, DivergenceError,
                     DomainError, InvalidInput, MethodDisagreement, NonIntegerRatio,
                     NumericalFailure, PoleError, RatekitError, StepTooSmall, StripViolation,
                     TruncationError, UnsupportedShape, UnsupportedVariant)
from .gamma import asymptotic_gamma_ratio, gauss_multiplication_residual, log_gamma
from .integrals import (EvalResult, IntegralSpec, Method, Variant, integrand, quad_eval,
                        tsallis_derivative_residual)
from .limits import LimitStudy, gamma_ratio_limit_check, limit_study, pathway_gap
from .mellin import (ContourConfig, MeijerGParams, MellinIntegrand, auto_contour, contour_eval,
                     integral_to_mellin, residue_series_eval)
from .ode import (GOperator, OdeProbe, fd_refinement, fd_residual, mellin_operator_identity,
                  operator_from_meijer, operator_from_theorem)
from .representations import EvalMethod, ReducedForm, evaluate, mellin_moment, reduce

__version__ = "0.1.0"
