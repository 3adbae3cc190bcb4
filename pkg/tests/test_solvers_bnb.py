# encoding: utf-8
# pylint: skip-file
"""
This file contains tests for the stratopt.solvers.bnb module.

"""

from __future__ import absolute_import, division, print_function

import unittest

from stratopt.problems import InstanceData, violation
from stratopt.solvers import (OPTIMAL, NODE_LIMIT, InfeasibleError,
                              NodeLimitError, CombinatorialLimitError)
from stratopt.solvers.bnb import *

from . import toy_problem


def random_instance(seed, n_cont=2, n_bin=3, rank=None):
    """
    Random convex mixed-binary QP with box constraints and a knapsack; with
    a rank the cost is only positive semidefinite.

    """
    rng = np.random.RandomState(seed)
    n = n_cont + n_bin
    M = rng.randn(n, n if rank is None else rank)
    P = M.dot(M.T)
    if rank is None:
        P += np.eye(n)
    q = 3 * rng.randn(n)
    rows, b = [], []
    for j in range(n):
        row = np.zeros(n)
        row[j] = 1.
        rows.extend([row, -row])
        if j < n_cont:
            b.extend([5., 5.])
        else:
            b.extend([1., 0.])
    # at most two binaries set
    row = np.zeros(n)
    row[n_cont:] = 1.
    rows.append(row)
    b.append(2.)
    return InstanceData(P, q, 0., np.array(rows), np.array(b),
                        np.arange(n_cont, n))


class TestSolveMIQOFunction(unittest.TestCase):

    def test_types(self):
        result = solve_miqo(toy_problem().instantiate([1.]))
        self.assertIsInstance(result, MIQOResult)
        self.assertEqual(result.status, OPTIMAL)
        self.assertIsInstance(result.nodes, int)
        self.assertTrue(result.time >= 0)
        x, objective, nodes = result
        self.assertTrue(np.allclose(x, result.x))

    def test_toy(self):
        problem = toy_problem()
        for theta, x, objective in (([1.], [1, 1], -.5),
                                    ([2.], [1, 1], -2.5),
                                    ([.8], [.8, 1], -.14),
                                    ([.5], [0, 0], 0.),
                                    ([-1.], [0, 0], 0.)):
            result = solve_miqo(problem.instantiate(theta))
            self.assertTrue(np.allclose(result.x, x, atol=1e-7))
            self.assertTrue(np.allclose(result.objective, objective))

    def test_integral_solution(self):
        result = solve_miqo(toy_problem().instantiate([.8]))
        # integer components are exactly integral
        self.assertEqual(result.x[1], np.round(result.x[1]))

    def test_general_integer(self):
        # minimize (x - 2.6)^2 with integer 0 <= x <= 5
        instance = InstanceData([[2.]], [-5.2], 0., [[1.], [-1.]], [5., 0.],
                                [0])
        result = solve_miqo(instance)
        self.assertTrue(np.allclose(result.x, [3]))
        self.assertTrue(np.allclose(result.objective, -6.6))

    def test_enumeration(self):
        for seed in range(5):
            instance = random_instance(seed)
            result = solve_miqo(instance)
            reference = enumerate_oracle(instance)
            self.assertTrue(np.allclose(result.objective,
                                        reference.objective, atol=1e-6))

    def test_matches_enumeration(self):
        # at most 7 variables and 6 binaries, every other cost has rank one
        sizes = [(1, 6), (2, 5), (2, 4), (3, 3)]
        for seed in range(50):
            n_cont, n_bin = sizes[seed % len(sizes)]
            rank = 1 if seed % 2 else None
            instance = random_instance(100 + seed, n_cont, n_bin, rank)
            self.assertTrue(instance.n <= 8 and instance.m <= 16)
            result = solve_miqo(instance)
            reference = enumerate_oracle(instance)
            self.assertTrue(abs(result.objective - reference.objective) <=
                            1e-6, seed)
            self.assertTrue(violation(instance, result.x) <= 1e-6, seed)
            self.assertTrue(violation(instance, reference.x) <= 1e-6, seed)

    def test_continuous(self):
        instance = InstanceData(np.eye(2), [-1, -1], 0, [[1., 0.]], [.5])
        result = solve_miqo(instance)
        self.assertTrue(np.allclose(result.x, [.5, 1]))
        self.assertEqual(result.nodes, 1)

    def test_node_limit(self):
        # the root relaxation of the toy problem is fractional
        instance = toy_problem().instantiate([1.])
        with self.assertRaises(NodeLimitError):
            solve_miqo(instance, max_nodes=1)
        # the first child (x1 <= 0) yields an incumbent
        result = solve_miqo(instance, max_nodes=2, incumbent_on_limit=True)
        self.assertEqual(result.status, NODE_LIMIT)
        self.assertTrue(np.allclose(result.objective, 0))

    def test_infeasible(self):
        # binary x with 0.3 <= x <= 0.7
        instance = InstanceData([[1.]], [0.], 0., [[1.], [-1.]], [.7, -.3],
                                [0])
        with self.assertRaises(InfeasibleError):
            solve_miqo(instance)


class TestEnumerateOracleFunction(unittest.TestCase):

    def test_values(self):
        result = enumerate_oracle(toy_problem().instantiate([1.]))
        self.assertTrue(np.allclose(result.x, [1, 1]))
        self.assertTrue(np.allclose(result.objective, -.5))
        self.assertEqual(result.nodes, 2)

    def test_errors(self):
        instance = random_instance(0)
        with self.assertRaises(CombinatorialLimitError):
            enumerate_oracle(instance, max_combinations=4)
        instance = InstanceData([[1.]], [0.], 0., [[1.], [-1.]], [.7, -.3],
                                [0])
        with self.assertRaises(InfeasibleError):
            enumerate_oracle(instance)
