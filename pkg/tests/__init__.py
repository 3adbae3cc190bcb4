# encoding: utf-8
# pylint: skip-file
"""
This module contains tests.

"""

from __future__ import absolute_import, division, print_function

import os
import unittest

import numpy as np

DATA_PATH = os.path.dirname(os.path.realpath(__file__)) + '/data/'


def toy_problem():
    """
    Small parametric problem with one continuous and one binary variable:

        minimize    x0^2 - 2 theta x0 + 0.5 x1
        subject to  x0 <= x1, x0 >= 0, 0 <= x1 <= 1, x1 binary

    For theta >= 1 the optimum is (1, 1), for sqrt(0.5) < theta < 1 it is
    (theta, 1), otherwise (0, 0).

    """
    from stratopt.problems import ParametricMIQO
    P = np.diag([2., 0.])
    q = np.array([0., .5])
    A = np.array([[1., -1.], [-1., 0.], [0., 1.], [0., -1.]])
    b = np.array([0., 0., 1., 0.])
    q_map = np.array([[-2.], [0.]])
    return ParametricMIQO(P, q, 0., A, b, integer_indices=[1], p_dim=1,
                          q_map=q_map, name='toy')


# the desk-scale runs take minutes, they are enabled by setting the
# environment variable STRATOPT_DESK_TESTS
DESK_TESTS = bool(os.environ.get('STRATOPT_DESK_TESTS'))
desk_scale = unittest.skipUnless(DESK_TESTS, 'set STRATOPT_DESK_TESTS to '
                                             'run the desk-scale tests')


def toy_offset_problem(offset=5.):
    """
    Toy problem with the constant cost `offset`, which keeps the optimal
    costs of parameters in [-1, 2] positive.

    """
    problem = toy_problem()
    from stratopt.problems import ParametricMIQO
    return ParametricMIQO(problem.P, problem.q, offset, problem.A, problem.b,
                          integer_indices=[1], p_dim=1, q_map=problem.q_map,
                          name='toy_offset')
