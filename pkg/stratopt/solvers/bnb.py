# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
"""
This file contains the exact mixed-integer oracle: a best-first
branch-and-bound over the integer variables with the active-set QP solver as
relaxation engine, and an exhaustive enumerator over binary assignments used
to verify it.

"""

from __future__ import absolute_import, division, print_function

import heapq
import itertools
import time

import numpy as np

from . import (OPTIMAL, INFEASIBLE, ITERATION_LIMIT, UNBOUNDED, NODE_LIMIT,
               InfeasibleError, IterationLimitError, UnboundedError,
               NodeLimitError, CombinatorialLimitError)
from .qp import solve_qp

MAX_NODES = 10 ** 6
GAP = 1e-6
INT_TOL = 1e-6
MAX_COMBINATIONS = 4096


class MIQOResult(object):
    """
    Result of a mixed-integer solve.

    :param x:         optimal solution (integer components exactly integral)
    :param objective: optimal cost
    :param nodes:     number of solved relaxations
    :param status:    OPTIMAL or NODE_LIMIT (incumbent returned)
    :param time:      wall time [seconds]

    Note: Iterating over the result yields (x, objective, nodes).

    """

    def __init__(self, x, objective, nodes, status=OPTIMAL, time=None):
        # pylint: disable=redefined-outer-name
        self.x = x
        self.objective = objective
        self.nodes = nodes
        self.status = status
        self.time = time

    def __iter__(self):
        return iter((self.x, self.objective, self.nodes))

    def __repr__(self):
        return 'MIQOResult(status=%s, objective=%r, nodes=%d)' % \
               (self.status, self.objective, self.nodes)


class BnBNode(object):
    """
    Branch-and-bound node.

    :param lower: lower bounds of the integer variables
    :param upper: upper bounds of the integer variables
    :param bound: relaxation lower bound
    :param depth: depth in the tree
    :param order: creation counter, used to break ties
    :param x:     relaxation solution (warm start for the children)

    """
    __slots__ = ['lower', 'upper', 'bound', 'depth', 'order', 'x']

    def __init__(self, lower, upper, bound, depth, order, x=None):
        self.lower = lower
        self.upper = upper
        self.bound = bound
        self.depth = depth
        self.order = order
        self.x = x

    @property
    def fixed(self):
        """Dictionary {position: value} of the fixed integer variables."""
        return dict((k, self.lower[k]) for k in
                    np.nonzero(self.lower == self.upper)[0])

    def __lt__(self, other):
        return (self.bound, self.order) < (other.bound, other.order)


def _check(result):
    """Raise on non-recoverable relaxation results."""
    if result.status == ITERATION_LIMIT:
        raise IterationLimitError('pivot limit reached after %d pivots' %
                                  result.iterations)
    if result.status == UNBOUNDED:
        raise UnboundedError('relaxation is unbounded')
    return result.status == OPTIMAL


def _full_bounds(n, integer_indices, lower, upper):
    lo = np.full(n, -np.inf)
    up = np.full(n, np.inf)
    lo[integer_indices] = lower
    up[integer_indices] = upper
    return lo, up


def solve_miqo(instance, integer_indices=None, max_nodes=MAX_NODES, gap=GAP,
               incumbent_on_limit=False):
    """
    Solve a mixed-integer QP to global optimality by branch-and-bound.

    :param instance:           InstanceData
    :param integer_indices:    indices of the integer variables
                               [default: those of the instance]
    :param max_nodes:          maximum number of solved relaxations
    :param gap:                absolute optimality gap
    :param incumbent_on_limit: return the incumbent (instead of raising)
                               when the node limit is reached
    :return:                   MIQOResult

    Note: Nodes are explored best-first (lowest relaxation bound, ties by
          creation order); branching is on the most fractional variable,
          ties broken by the lowest index.

    """
    start = time.perf_counter()
    if integer_indices is None:
        integer_indices = instance.integer_indices
    idx = np.asarray(integer_indices, dtype=int)
    n = instance.n
    if not len(idx):
        result = solve_qp(instance)
        if not _check(result):
            raise InfeasibleError('problem is infeasible')
        return MIQOResult(result.x, result.objective, 1, OPTIMAL,
                          time.perf_counter() - start)

    heap = []
    counter = itertools.count()
    incumbent = [None, np.inf]
    nodes = [0]

    def relax(lower, upper, depth, parent):
        """Solve a relaxation and queue, prune or accept it."""
        if nodes[0] >= max_nodes:
            if incumbent_on_limit and incumbent[0] is not None:
                return False
            raise NodeLimitError('node limit of %d reached' % max_nodes)
        nodes[0] += 1
        lo, up = _full_bounds(n, idx, lower, upper)
        x0 = None if parent is None else parent.x
        result = solve_qp(instance, lower=lo, upper=up, x0=x0)
        if not _check(result):
            return True
        bound = result.objective
        if parent is not None:
            bound = max(bound, parent.bound)
        if bound >= incumbent[1] - gap:
            return True
        x_int = result.x[idx]
        if np.max(np.abs(x_int - np.round(x_int))) <= INT_TOL:
            # polish by fixing the integer variables exactly
            fixed = dict(zip(idx, np.round(x_int)))
            polished = solve_qp(instance, fixed=fixed, x0=result.x)
            if _check(polished) and polished.objective < incumbent[1]:
                incumbent[:] = [polished.x, polished.objective]
            return True
        heapq.heappush(heap, BnBNode(lower, upper, bound, depth,
                                     next(counter), result.x))
        return True

    relax(np.full(len(idx), -np.inf), np.full(len(idx), np.inf), 0, None)
    status = OPTIMAL
    while heap:
        node = heapq.heappop(heap)
        if node.bound >= incumbent[1] - gap:
            break
        x_int = node.x[idx]
        k = int(np.argmax(np.abs(x_int - np.round(x_int))))
        value = x_int[k]
        children = []
        upper = node.upper.copy()
        upper[k] = np.floor(value)
        children.append((node.lower, upper))
        lower = node.lower.copy()
        lower[k] = np.ceil(value)
        children.append((lower, node.upper))
        for child_lower, child_upper in children:
            if child_lower[k] > child_upper[k]:
                continue
            if not relax(child_lower, child_upper, node.depth + 1, node):
                status = NODE_LIMIT
                break
        if status == NODE_LIMIT:
            break
    if incumbent[0] is None:
        raise InfeasibleError('problem is infeasible')
    return MIQOResult(incumbent[0], incumbent[1], nodes[0], status,
                      time.perf_counter() - start)


def enumerate_oracle(instance, integer_indices=None,
                     max_combinations=MAX_COMBINATIONS):
    """
    Solve a mixed-binary QP by enumerating all binary assignments.

    :param instance:         InstanceData
    :param integer_indices:  indices of the binary variables
                             [default: those of the instance]
    :param max_combinations: maximum number of assignments
    :return:                 MIQOResult

    """
    start = time.perf_counter()
    if integer_indices is None:
        integer_indices = instance.integer_indices
    idx = np.asarray(integer_indices, dtype=int)
    if 2 ** len(idx) > max_combinations:
        raise CombinatorialLimitError('2^%d assignments exceed the limit of '
                                      '%d' % (len(idx), max_combinations))
    best_x, best_f = None, np.inf
    count = 0
    for values in itertools.product((0., 1.), repeat=len(idx)):
        count += 1
        result = solve_qp(instance, fixed=dict(zip(idx, values)))
        if result.status == INFEASIBLE:
            continue
        _check(result)
        if result.objective < best_f:
            best_x, best_f = result.x, result.objective
    if best_x is None:
        raise InfeasibleError('problem is infeasible')
    return MIQOResult(best_x, best_f, count, OPTIMAL,
                      time.perf_counter() - start)
