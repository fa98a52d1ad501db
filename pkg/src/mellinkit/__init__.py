"""Mellin-transform calculus for nonnegative laws.

Size biasing, the continuous-time stationary-excess operator, t-monotone
densities and the log-normal limits of normalized biased/excess families,
each with numeric checks of the identities that govern them.
"""

from .checks import CheckResult
from .dist import (Beta, BetaT, DistributionSpec, Exponential, Excess, Gamma,
                   GridSurvival, LevyLog, LogNormal, MellinDomain, PerturbedLogNormal,
                   ProductIndep, SampleBatch, Scaled, SizeBiased, Uniform, density,
                   mellin_domain, point_mass, sample, scale, survival)
from .errors import (DensityUnavailable, InvalidSpec, MellinKitError, OutOfDomain,
                     QuadratureFailure, SamplerUnavailable)
from .excess import check_iteration, check_semigroup, excess, excess_mellin, iterate_discrete
from .levy import (CompoundPoisson, FiniteAtoms, LevySpec, delta_formula, dist_from_levy,
                   levy_exponent)
from .limit import (CEstimate, ConvergenceReport, LimitLaw, NormalizationCurve,
                    check_fixed_point, convergence_report, estimate_c, fit_c,
                    indeterminacy_demo, limit_law, normalized_family, rho_curve)
from .mellin import (DEFAULT_LAMBDAS, LogMellinProfile, MellinValue, check_log_convexity,
                     check_lyapunov, check_ratio_monotone, log_mellin_profile,
                     log_mellin_values, mellin, mellin_distance, mellin_monte_carlo,
                     mellin_values)
from .size_bias import biased_survival, check_dominance, check_properties, size_bias
from .tmonotone import (beta_mix, check_cm_limit, check_downward_closure,
                        check_k_monotone, recover_mixing_mellin)
