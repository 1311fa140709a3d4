"""Source identification for a two-parameter fractional sub-diffusion problem.

The time-dependent source w(t) is recovered from an integral measurement by
solving a weakly singular Volterra equation with discontinuous piecewise
linear collocation on graded meshes; the field u(x, t) is then rebuilt from
its bi-orthogonal series.
"""

from .benchmark import BenchmarkCase, exact_u, exact_u_coeffs, exact_w, make_problem
from .collocation import PiecewiseLinear, eval_w, limit_at_origin, residual, solve_vie
from .exceptions import AccuracyError, DomainError, SingularSystemError, ZeroCoefficientError
from .mesh import CollocationGrid, GradedMesh, build_graded, collocation_points, fine_grid, lagrange
from .mlf import ml, ml_prabhakar, omega, theta
from .problem import FourierMode, ProblemSpec, a_coeff, g_eval, h_eval, kernel_eval, psi, psi_increment
from .reconstruct import CoefficientTable, coeff_u1, coeff_u10, coeff_u2, coefficient_table, eval_u

__version__ = "0.1.0"
