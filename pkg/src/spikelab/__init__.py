"""Interior spikes of  -ε² div(J ∇u) + V u = u^p  in Ω with Neumann data,
solved directly by Newton and through a discrete Lyapunov-Schmidt reduction."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .ground_state import (Moments, RadialProfile, profile_moments, radial_symmetry_moment,
                           solve_ground_state)
from .problem import (Ball, Box, CallableField, Constant, GaussianBumps, Polynomial,
                      ProblemData, QuadraticWell, make_domain, make_field)
from .gamma import CriticalPoint, find_critical_points, gamma, grad_gamma, hess_gamma
from .discretization import OperatorMatrix, DomainGrid, assemble, build_grid
from .profiles import SpikeProfile, evaluate_ansatz, scaled_profile, tangent_basis
from .solver import SolveParams, SpikeSolution, continuation, newton_solve
from .reduction import (CorrectionResult, ReducedSample, ansatz_residual_norm,
                        coercivity_estimate, expansion_report, reduced_energy,
                        solve_correction)
