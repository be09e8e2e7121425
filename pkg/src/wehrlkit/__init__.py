"""Phase-space analysis toolkit for states in a truncated Fock basis.

Computes Husimi densities, Wehrl-type entropies of convex symbols,
level-set profiles of the density, trace-norm deficits to the coherent
family, and the log-Sobolev functional on the associated space of entire
functions, together with verification sweeps for the inequalities tying
them together.
"""

from .deficit import (DeficitMin, DeficitReport, build_deficit_report,
                      deficit_D, deficit_Df, trace_distance)
from .entropy import (ConvexSymbol, c_phi_constant, coherent_reference,
                      custom_symbol, hinge_functional, hinge_symbol,
                      parse_phi, phi_entropy, phi_entropy_eps_floor,
                      power_symbol, superposition_check, wehrl_symbol)
from .errors import (AssertionFailure, BoundaryMaximum, ConfigurationError,
                     ConsistencyError, DimensionMismatch, EmptyLevelSet,
                     NoCrossing, NonIntegrable, NotPSD,
                     QuadratureDisagreement, RadiusTooSmall, TailTooLarge,
                     ToolkitError, ValueTooSmall)
from .fock_core import (DensityMatrix, FockVector, PhasePoint,
                        SpectralDecomposition, coherent_fock_vector,
                        load_state, random_density_matrix, random_fock_vector,
                        safe_coherent_radius, save_state, spectral_decompose)
from .harness import (FaberKrahnReport, LaplacianSweepReport, RunSpec,
                      StabTauReport, StateRecord, VerificationRun,
                      default_families, full_inequality_suite, laplacian_sweep,
                      make_family, sweep_constants, verify_faber_krahn,
                      verify_generalized, verify_stabtau, verify_wehrl)
from .husimi import (HusimiEvaluator, MaxReport, husimi_eval, husimi_max,
                     log_laplacian_check, stft_quadrature)
from .levelsets import (LevelProfile, RayLevelSolver, build_profile,
                        check_HT_bound, check_improved_mu_bound,
                        check_mu_differential, mu_of_t)
from .logsob import (FockFunction, LogSobReport, bargmann_bridge,
                     dirichlet_form, dirichlet_form_quadrature, entropy_term,
                     logsob_deficit)
from .polarquad import PolarQuadrature, choose_radial_cutoff

__version__ = "0.1.0"
