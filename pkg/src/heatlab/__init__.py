"""heatlab: a numerical laboratory for local solvability of semilinear heat
equations with possibly singular initial data.

The package computes the nonlinearity calculus (F, F^-1, the conjugate
exponents q and p), classifies (nonlinearity, data-class) pairs into
existence / nonexistence regimes, constructs the explicit singular initial
data families behind the nonexistence results, and runs desk-scale heat
semigroup experiments: monotone Picard iteration, supersolution
verification and blow-up functional integration.
"""

from .errors import (DivergentTailError, HeatLabError,
                     NonMonotoneIterationError, ParameterError,
                     QuadratureError, RangeError, UnsupportedOperationError)
from .quadrature import QuadratureConfig, DEFAULT_CONFIG
from .nonlinearity import (CriticalCompositeThreshold, ExpLogPowerLaw,
                           ExpPowerLaw, ExponentProfile, IteratedExp,
                           LogDampedPower, LogPowerLaw, Nonlinearity,
                           PowerLaw, TabulatedNonlinearity, check_fF_bound,
                           eval_F, eval_F_inverse, eval_f, eval_fprime,
                           eval_log_F, exponent_profile, F_at_zero,
                           fF_product, karamata_profile, spec_from_dict)
from .monitors import (CallableMonitor, Identity, LogTailGauge, LogWeight,
                       Monitor, PowerMonitor, TailGauge)
from .classifier import (ClassificationOutcome, KappaConstant, RegimeQuery,
                         check_growth_corollaries, check_refined_critical_bound,
                         check_sourcewise_solvability, check_tail_condition,
                         check_transplant_hypotheses, classify_f_beta,
                         classify_qr_regime, solve_kappa)
from .initial_data import (RadialProfile, ULNormEstimate,
                           build_counterexample, build_F_inverse_power,
                           closure_membership_heuristic, constant_profile,
                           gaussian_profile, model_singular_integral,
                           singular_integrability, truncate_profile, ul_norm)
from .heat_solver import (BlowupFunctional, GridFunction, IterationTrace,
                          RadialGrid, apply_semigroup, contradiction_sides,
                          integrate_H, picard_iterate,
                          smoothing_exponent_probe, verify_supersolution)

__version__ = "0.1.0"
