"""Numerical laboratory for mean values of general Dirichlet series."""

from .numerics import QuadratureSpec, QuadResult, bisect_monotone, integrate_adaptive
from .series import (ContinuationDomainError, CountingSnapshot, EvalResult, PoleError, RangeExceededError,
                     TermSequence, counting, evaluate, partial_sum, sinc, tail_continuation)
from .models import (alternating_beta, clustered_sequence, eta_modulated, eta_sequence, integers, power_law,
                     random_discretize, sum_two_squares, zeta_derivative)
from .bohr import BohrModel, bohr_Ac, bohr_build, bohr_fc
from .moments import (MVReport, MomentEstimate, fejer_mean_square, growth_fit, limit_series,
                      mean_square_quadrature, mv_check, polynomial_mean_square_exact)
from .zeros import Rectangle, ZeroCountReport, count_zeros, zero_density_scan

__version__ = "0.1.0"
