"""Exact solutions of the Liouville equation from Cauchy data.

    (d_t^2 - d_x^2) F + (m^2/2) exp(F) = 0,   F(0, .) = f1,  d_t F(0, .) = f2

Typical use::

    from liouville import InitialData, solve
    F = solve(InitialData("sin(x)", "cos(2*x)", 1.0), alpha=2)
    F(0.5, 0.25), F.partial(0.5, 0.25, (1, 2)), F.residual(0.5, 0.25)
"""

from .faa_di_bruno import (
    composition_coefficient,
    enumerate_compositions,
    exp_derivative,
    log_derivative_1d,
    log_derivative_mixed,
    log_derivative_mixed_complete,
    verify_formulas,
)
from .fd_oracle import GridField, compare_and_order, fd_solve, fd_solve_both
from .ode import FundamentalSolution, IntegrationError, integrate_fundamental, wronskian_defect
from .scaled import ScaledReal
from .seminorms import GridSpec, SeminormIndex, convergence_study, seminorm_1d, seminorm_2d, seminorm_vector
from .smooth import Expr, differentiate, evaluate, jet, parse_expression, to_string
from .solution import (
    InitialData,
    SolutionField,
    build_quartet,
    compute_potentials,
    diagnostics,
    residual,
    restrict_initial,
    solve,
)

__version__ = "0.1.0"
