"""Numerical certification of uniform strong persistence for maps and ODEs."""

from .boundary import (BoundarySubsystem, CompactBox, Equilibrium, OmegaLimitEstimate,
                       PeriodicOrbit, classify_tail, estimate_omega_limit, find_equilibria,
                       restrict_to_extinction_set)
from .dynsys import (CONTINUOUS, DISCRETE, FocalDecomposition, ModelSpec, Trajectory,
                     integrate_step, semiflow, simulate, step_discrete,
                     validate_decomposition)
from .linearize import (CocycleProduct, LyapunovEstimate, OrbitGrowth, cocycle_matrix,
                        fundamental_solution, lyapunov_exponent, operator_norm,
                        spectral_abscissa, spectral_radius, spectral_radius_at_orbit)
from .models import (AcklehParams, DinParams, FoodChainParams, REGISTRY, ackleh_composite,
                     ackleh_growth_rates, din_model, din_thresholds, food_chain,
                     food_chain_boundary_equilibria, food_chain_invasion_conditions,
                     get_family)
from .persist import (CERTIFIED, EXTINCTION, INCOMPLETE, CertifyConfig, PersistenceCertificate,
                      PersistenceFunction, RepellerEvidence, VarySpec, certify,
                      certify_family, empirical_liminf, parameter_sweep, sum_abs)

__version__ = "0.1.0"
