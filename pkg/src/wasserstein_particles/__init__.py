"""Interacting Bessel-type particle systems on [0,1].

Sampling of the stationary configuration law, two dynamics schemes (a
Metropolis ball walk and a regularized reflected Euler scheme), the
quantile/measure calculus connecting configurations to measure-valued
states, and statistical verification of the martingale, quadratic-variation
and Dirichlet-form identities the scaling limit rests on.
"""

from .config import ParticleConfig, parse_config, serialize_config
from .cylinder import (CylinderFunctional, PiecewiseLinearQuantile,
                       VectorFieldSpec, condexp_quantile, hat_coefficients,
                       hat_gradient, inner_product)
from .diagnostics import (GeneratorValue, KSRow, MarginalKSReport, QVResult,
                          drift_functional, gap_clump_probability,
                          gap_statistics, generator_apply,
                          generator_apply_batch, generator_bound,
                          marginal_test, martingale_series, qv_check)
from .divergence import (divergence_continuum, divergence_discrete,
                         grid_marginals, v_beta_continuum, v_beta_discrete)
from .dynamics import (SimulationPath, ball_walk_step, exact_ball_step,
                       run_replicas, sde_step, simulate_path,
                       stationary_chain_endpoints, stationary_start)
from .errors import (InfiniteEnergyError, SamplerDegenerateError,
                     StepSizeError, WassersteinParticlesError,
                     ZeroSpacingError)
from .forms import (MCEstimate, convergence_sweep, divergence_error,
                    form_estimate_continuum, form_estimate_discrete,
                    ibp_residual_discrete, pairing_error, projection_norm,
                    projection_sweep, tnorm_error)
from .interface import (InterfaceState, fluctuation_field, from_interface,
                        gibbs_consistency, hamiltonian, to_interface)
from .kernels import BACKEND as KERNEL_BACKEND
from .params import Scheme, SimParams, replica_rng
from .quantiles import (EmpiricalMeasure, Interval, QuantileStep,
                        embed_quantile, empirical_measure, gaps,
                        measure_of_quantile, quantile_of_measure,
                        wasserstein2)
from .sampling import (SpacingSample, log_density_qn, sample_config,
                       sample_spacing_batch)
from .testfunctions import TestFunction, from_name as make_test_function

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
