# encoding: utf-8
"""
Solver package.

Contains the exact training-time oracle (an active-set QP solver wrapped by
branch-and-bound) and the KKT based online decoder.

"""

from __future__ import absolute_import, division, print_function

# solver statuses
OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
ITERATION_LIMIT = 'iteration_limit'
UNBOUNDED = 'unbounded'
NODE_LIMIT = 'node_limit'


class SolverWarning(UserWarning):
    """
    Warning issued for recoverable solver problems.

    """
    pass


class SolverError(Exception):
    """
    Base class for all solver related errors.

    """
    def __init__(self, value):
        super(SolverError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


class InfeasibleError(SolverError):
    """Problem has no feasible point."""
    pass


class IterationLimitError(SolverError):
    """Pivot limit of the active-set method reached."""
    pass


class UnboundedError(SolverError):
    """Cost function is unbounded below on the feasible set."""
    pass


class NodeLimitError(SolverError):
    """Branch-and-bound node limit reached, the oracle is exhausted."""
    pass


class CombinatorialLimitError(SolverError):
    """Too many integer combinations for exhaustive enumeration."""
    pass


class DegenerateStrategyError(SolverError):
    """Decoding a strategy failed."""
    pass


class NoFeasibleStrategyError(SolverError):
    """
    None of the candidate strategies could be decoded to a feasible point.

    The `value` holds the ranked candidate list (best violation first).

    """
    pass


# import the submodules
from . import qp, bnb, kkt
from .qp import QPResult, solve_qp
from .bnb import MIQOResult, solve_miqo, enumerate_oracle
