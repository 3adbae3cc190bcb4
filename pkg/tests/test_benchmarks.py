# encoding: utf-8
# pylint: skip-file
"""
This file contains tests for the stratopt.benchmarks package.

"""

from __future__ import absolute_import, division, print_function

import os
import unittest
import tempfile

from stratopt.problems import (ParameterInstance, ParametricMIQO,
                               extract_strategy, violation)
from stratopt.solvers import SolverError
from stratopt.solvers.kkt import decode
from stratopt.solvers.bnb import solve_miqo
from stratopt.benchmarks import *
from stratopt.benchmarks import fuel_cell, portfolio, motion

from . import desk_scale

FUEL_CELL = {'T': 3, 'n_sw': 2}
PORTFOLIO = {'n_assets': 3, 'n_factors': 2, 'c': 2, 'window': 20,
             'rebalance': 5}
MOTION = {'T': 3, 'n_obs': 1, 'obstacles': [[[2., 2.], [4., 4.]]]}


def check_dimensions(test, module, config):
    cfg = module.Config.from_dict(config)
    problem = module.build(cfg)
    dims = module.dimensions(cfg)
    test.assertEqual(dims, {'n_var': problem.n, 'n_constr': problem.m,
                            'n_int': problem.d, 'p_dim': problem.p_dim})
    return problem


def round_trips(problem, thetas):
    """
    Solve the instances, decode them from the extracted strategies and
    return the number of solved instances and the worst relative cost
    difference and violation of the decoded solutions.

    """
    solved, cost, infeas = 0, 0., 0.
    for theta in thetas:
        instance = problem.instantiate(theta)
        try:
            result = solve_miqo(instance)
        except SolverError:
            continue
        solved += 1
        strategy = extract_strategy(instance, result.x)
        x, _, _ = decode(instance, strategy)
        cost = max(cost, abs(instance.objective(x) - result.objective) /
                   max(1., abs(result.objective)))
        infeas = max(infeas, violation(instance, x))
    return solved, cost, infeas


class TestStrategyRoundTrip(unittest.TestCase):

    def check(self, module, config, **kwargs):
        cfg = module.Config.from_dict(config)
        problem = module.build(cfg)
        thetas = module.sampler(cfg, **kwargs).sample(100)
        solved, cost, infeas = round_trips(problem, thetas)
        self.assertTrue(solved >= 95)
        self.assertTrue(cost <= 1e-6)
        self.assertTrue(infeas <= 1e-6)

    def test_fuel_cell(self):
        self.check(fuel_cell, FUEL_CELL, steps=2, seed=1)

    def test_portfolio(self):
        self.check(portfolio, PORTFOLIO, steps=2, seed=0)

    def test_motion(self):
        self.check(motion, MOTION, seed=0)

    @desk_scale
    def test_default_configs(self):
        self.check(fuel_cell, {'T': 10})
        self.check(portfolio, {'n_assets': 20})
        self.check(motion, {'T': 10, 'n_obs': 2}, seed=0)


class TestBenchmarkConfigClass(unittest.TestCase):

    def test_values(self):
        cfg = fuel_cell.Config(T=4)
        self.assertEqual(cfg.T, 4)
        self.assertEqual(cfg.n_sw, fuel_cell.Config.n_sw)
        self.assertEqual(cfg.to_dict()['T'], 4)
        other = fuel_cell.Config.from_dict(cfg.to_dict())
        self.assertEqual(other.to_dict(), cfg.to_dict())
        self.assertEqual(motion.Config().to_dict()['p_des'], [-10.5, -10.])

    def test_errors(self):
        with self.assertRaises(ValueError):
            fuel_cell.Config(horizon=3)
        with self.assertRaises(ValueError):
            fuel_cell.Config(T=0).check()
        with self.assertRaises(ValueError):
            portfolio.Config(c=0).check()
        with self.assertRaises(ValueError):
            motion.Config(p_des=(1., 2., 3.)).check()

    def test_default_sizes(self):
        # the defaults stay within reach of the branch-and-bound oracle
        for module in (fuel_cell, portfolio, motion):
            dims = module.dimensions(module.Config.from_dict({}))
            self.assertTrue(dims['n_int'] <= 100, module.__name__)
        self.assertEqual((portfolio.Config.n_assets,
                          portfolio.Config.n_factors, portfolio.Config.c),
                         (20, 5, 5))
        self.assertEqual((motion.Config.T, motion.Config.n_obs), (10, 2))
        # larger markets are configured explicitly
        cfg = portfolio.Config.from_dict({'n_assets': 100, 'n_factors': 15,
                                          'c': 10})
        self.assertEqual(portfolio.dimensions(cfg)['n_int'], 101)


class TestRowBuilderClass(unittest.TestCase):

    def test_values(self):
        rows = RowBuilder(3, 2)
        self.assertEqual(rows.add([(0, 1.), (2, -1.)], 4., [(1, 2.)]), 0)
        self.assertEqual(rows.add_equality([(1, 1.)], 1., [(0, 1.)],
                                           [(1, 2, 3.)]), 1)
        rows.add_bounds([0, 1], 0., np.inf)
        data = rows.build()
        self.assertEqual(data['A'].shape, (5, 3))
        self.assertTrue(np.allclose(data['A'].toarray(),
                                    [[1, 0, -1], [0, 1, 0], [0, -1, 0],
                                     [-1, 0, 0], [0, -1, 0]]))
        self.assertTrue(np.allclose(data['b'], [4, 1, -1, 0, 0]))
        self.assertTrue(np.allclose(data['b_map'].toarray(),
                                    [[0, 2], [1, 0], [-1, 0], [0, 0],
                                     [0, 0]]))
        self.assertEqual(len(data['A_maps']), 1)
        k, A_k = data['A_maps'][0]
        self.assertEqual(k, 1)
        self.assertTrue(np.allclose(A_k.toarray()[1:3, 2], [3, -3]))


class TestSamplers(unittest.TestCase):

    def test_ball_point(self):
        rng = np.random.RandomState(0)
        for _ in range(10):
            self.assertTrue(np.linalg.norm(ball_point(rng, 3, 2.)) <= 2.)
        self.assertTrue(np.allclose(ball_point(rng, 3, 0.), 0))

    def test_box_sampler(self):
        sampler = BoxSampler([-1., 0.], [1., 2.], seed=3, prefix='box')
        theta = sampler(4)
        self.assertIsInstance(theta, ParameterInstance)
        self.assertEqual(theta.id, 'box-3-4')
        self.assertTrue(np.all(theta.theta >= [-1, 0]))
        self.assertTrue(np.all(theta.theta <= [1, 2]))
        # samples do not depend on the drawing order
        other = BoxSampler([-1., 0.], [1., 2.], seed=3, prefix='box')
        samples = other.sample(3, start=2)
        self.assertTrue(np.allclose(samples[2].theta, theta.theta))
        self.assertFalse(np.allclose(BoxSampler([-1., 0.], [1., 2.],
                                                seed=4)(4).theta,
                                     theta.theta))
        with self.assertRaises(ValueError):
            BoxSampler([1.], [0.])

    def test_ball_sampler(self):
        centers = [[0., 0.], [10., 10.]]
        sampler = BallSampler(centers, 0.)
        self.assertTrue(np.allclose(sampler(0).theta, [0, 0]))
        self.assertTrue(np.allclose(sampler(3).theta, [10, 10]))
        sampler = BallSampler(centers, .5, relative=True)
        self.assertTrue(np.linalg.norm(sampler(1).theta - 10) <=
                        .5 * np.linalg.norm([10, 10]))
        with self.assertRaises(ValueError):
            BallSampler(centers, -1.)

    def test_rejection(self):
        sampler = BoxSampler([0.], [1.], accept=lambda theta: theta[0] > .5)
        for theta in sampler.sample(5):
            self.assertTrue(theta.theta[0] > .5)
        sampler = BoxSampler([0.], [1.], accept=lambda theta: False,
                             max_retries=5)
        with self.assertRaises(SamplingError):
            sampler(0)

    def test_projection(self):
        sampler = BoxSampler([0.], [2.], project=lambda t: np.minimum(t, 1.))
        self.assertTrue(all(t.theta[0] <= 1 for t in sampler.sample(10)))


class TestFamilyRegistry(unittest.TestCase):

    def test_values(self):
        self.assertIs(family_module('motion'), motion)
        cfg = make_config('fuel_cell', {'T': 2})
        self.assertEqual(cfg.T, 2)
        self.assertIsInstance(make_problem('motion', MOTION), ParametricMIQO)
        with self.assertRaises(ValueError):
            family_module('unknown')

    def test_sampler_spec(self):
        spec = SamplerSpec('motion', MOTION, seed=2)
        f, filename = tempfile.mkstemp()
        os.close(f)
        try:
            spec.save(filename)
            loaded = SamplerSpec.load(filename)
        finally:
            os.unlink(filename)
        self.assertEqual(loaded.to_dict(), spec.to_dict())
        sampler = loaded.sampler()
        self.assertEqual(sampler(0).id, 'motion-2-0')
        self.assertEqual(loaded.sampler(seed=5)(0).id, 'motion-5-0')
        self.assertEqual(loaded.problem().name, 'motion_obs1')
        with self.assertRaises(ValueError):
            SamplerSpec.from_dict({'family': 'motion', 'size': 3})
        with self.assertRaises(ValueError):
            SamplerSpec('unknown')

    def test_functions(self):
        problem = build_motion(MOTION)
        self.assertEqual(problem.name, 'motion_obs1')
        self.assertEqual(build_fuel_cell({'T': 2}).name, 'fuel_cell_T2')
        self.assertTrue(build_portfolio(PORTFOLIO).matrices_parametric)
        thetas = sample_parameters('motion', 3, MOTION, seed=4, start=2)
        self.assertEqual([t.id for t in thetas],
                         ['motion-4-2', 'motion-4-3', 'motion-4-4'])
        sampler = motion.sampler(motion.Config.from_dict(MOTION), seed=4)
        self.assertTrue(np.allclose(thetas[0].theta, sampler(2).theta))
        # radius 0 reproduces the trajectory points
        cfg = portfolio.Config.from_dict(PORTFOLIO)
        thetas = sample_parameters('portfolio', 2, PORTFOLIO, radius=0.,
                                   steps=2)
        centers = portfolio.rollout(cfg, 2, seed=0)
        self.assertTrue(np.allclose([t.theta for t in thetas], centers))


class TestFuelCellBenchmark(unittest.TestCase):

    def setUp(self):
        self.cfg = fuel_cell.Config.from_dict(FUEL_CELL)

    def test_dimensions(self):
        problem = check_dimensions(self, fuel_cell, FUEL_CELL)
        self.assertEqual(problem.name, 'fuel_cell_T3')
        self.assertFalse(problem.matrices_parametric)
        check_dimensions(self, fuel_cell, {'T': 7})

    def test_parameter(self):
        theta = fuel_cell.parameter(self.cfg, 8000., 1, [0, 1, 1],
                                    [100., 200., 300.])
        self.assertTrue(np.allclose(theta, [8000, 1, 2, 0, 1, 1, 100, 200,
                                            300]))

    def test_project(self):
        theta = np.array([20000., .7, 0., 1., .9, 1., -5., 200., 5000.])
        projected = fuel_cell.project(self.cfg, theta)
        # energy clipped, on/off rounded, oldest switching dropped
        self.assertTrue(np.allclose(projected, [self.cfg.E_max, 1, 2, 0, 1,
                                                1, 0, 200, self.cfg.P_max]))

    def test_solve(self):
        problem = fuel_cell.build(self.cfg)
        theta = fuel_cell.parameter(self.cfg, 7700., 0, [0, 0, 0],
                                    [500., 500., 500.])
        result = solve_miqo(problem.instantiate(theta))
        x = fuel_cell.Layout(3)
        self.assertTrue(np.allclose(result.x[x.E(0)], 7700))
        self.assertTrue(np.all(result.x[x.integer_indices] ==
                               np.round(result.x[x.integer_indices])))
        # energy balance
        E, P = result.x[x.E(1)], result.x[x.P(0)]
        self.assertTrue(np.allclose(E, 7700 + P - 500, atol=1e-6))

    def test_sampler(self):
        sampler = fuel_cell.sampler(self.cfg, steps=2, seed=1)
        theta = sampler(0)
        self.assertEqual(theta.id, 'fuel_cell-1-0')
        self.assertEqual(len(theta), 9)
        self.assertTrue(self.cfg.E_min <= theta.theta[0] <= self.cfg.E_max)
        self.assertEqual(theta.theta[2], theta.theta[3:6].sum())
        other = fuel_cell.sampler(self.cfg, steps=2, seed=1)
        self.assertTrue(np.allclose(other(0).theta, theta.theta))

    def test_rollout(self):
        trajectory = fuel_cell.rollout(self.cfg, 3, seed=0)
        self.assertEqual(trajectory.shape, (3, 9))
        self.assertTrue(np.allclose(trajectory[0, :3],
                                    [self.cfg.E_init, 0, 0]))


class TestPortfolioBenchmark(unittest.TestCase):

    def setUp(self):
        self.cfg = portfolio.Config.from_dict(PORTFOLIO)

    def test_dimensions(self):
        problem = check_dimensions(self, portfolio, PORTFOLIO)
        self.assertTrue(problem.matrices_parametric)
        self.assertEqual(problem.name, 'portfolio_c2')

    def test_project(self):
        x = portfolio.Layout(3, 2)
        theta = np.zeros(x.p_dim)
        theta[x.D(0)] = -1.
        # indefinite factor covariance [[1, 2], [2, 1]]
        theta[x.sigma_f(0)], theta[x.sigma_f(1)], theta[x.sigma_f(2)] = \
            1., 2., 1.
        projected = portfolio.project(self.cfg, theta)
        self.assertEqual(projected[x.D(0)], 0)
        sigma_f = np.array([[projected[x.sigma_f(0)],
                             projected[x.sigma_f(1)]],
                            [projected[x.sigma_f(1)],
                             projected[x.sigma_f(2)]]])
        self.assertTrue(np.allclose(sigma_f, 1.5))

    def test_solve(self):
        problem = portfolio.build(self.cfg)
        trajectory = portfolio.rollout(self.cfg, 2, seed=0, problem=problem)
        self.assertEqual(trajectory.shape, (2, problem.p_dim))
        result = solve_miqo(problem.instantiate(trajectory[1]))
        x = portfolio.Layout(3, 2)
        w = result.x[:x.N]
        self.assertTrue(np.allclose(w.sum(), 1))
        self.assertTrue(np.sum(np.abs(w) > 1e-7) <= self.cfg.c)

    def test_sampler(self):
        sampler = portfolio.sampler(self.cfg, steps=2, seed=0)
        theta = sampler(1)
        self.assertEqual(theta.id, 'portfolio-0-1')
        x = portfolio.Layout(3, 2)
        self.assertTrue(np.all(theta.theta[x.blocks()[2]] >= 0))


class TestMotionBenchmark(unittest.TestCase):

    def setUp(self):
        self.cfg = motion.Config.from_dict(MOTION)

    def test_dimensions(self):
        problem = check_dimensions(self, motion, MOTION)
        self.assertEqual(problem.p_dim, 2)
        check_dimensions(self, motion, {'T': 2, 'n_obs': 3})

    def test_obstacles(self):
        obstacles = motion.random_obstacles(motion.Config(), 5, seed=0)
        self.assertEqual(len(obstacles), 5)
        for lower, upper in obstacles:
            self.assertTrue(np.all(lower < upper))
            self.assertFalse(motion.inside_obstacle(motion.Config.p_des,
                                                    [(lower, upper)]))
        self.assertTrue(motion.inside_obstacle([3., 3.],
                                               self.cfg.obstacle_list()))
        self.assertFalse(motion.inside_obstacle([4., 3.],
                                                self.cfg.obstacle_list()))

    def test_big_m(self):
        self.assertTrue(np.allclose(self.cfg.big_m_vector(), 31))
        with self.assertRaises(ValueError):
            motion.build(motion.Config.from_dict(dict(MOTION, big_m=1.)))

    def test_solve(self):
        problem = motion.build(self.cfg)
        result = solve_miqo(problem.instantiate([0., 0.]))
        x = motion.Layout(3, 2, 1)
        self.assertTrue(np.allclose(result.x[[x.p(0, 0), x.p(0, 1)]], 0))
        # the positions avoid the obstacle
        for t in range(4):
            position = result.x[[x.p(t, 0), x.p(t, 1)]]
            self.assertFalse(motion.inside_obstacle(
                position, self.cfg.obstacle_list()))

    def test_sampler(self):
        sampler = motion.sampler(self.cfg, seed=0)
        for theta in sampler.sample(20):
            self.assertFalse(motion.inside_obstacle(
                theta.theta, self.cfg.obstacle_list()))
            self.assertTrue(np.all(np.abs(theta.theta) <= 15))
