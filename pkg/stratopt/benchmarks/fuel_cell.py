# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
"""
This file contains the fuel cell energy management benchmark.

A fuel cell and a super capacitor supply a demanded load. The fuel cell is
either on or off, every change of its state is counted as a switching and
the number of switchings within the last T time steps is limited.

Energies are given in joule, powers in watt.

"""

from __future__ import absolute_import, division, print_function

import numpy as np
import scipy.sparse as sp

from . import BenchmarkConfig, RowBuilder, BallSampler, SamplingError
from ..problems import ParametricMIQO
from ..solvers import SolverError
from ..solvers.bnb import solve_miqo

SIZE_PARAM = 'T'

# logic rows G (w, z, d) <= h linking switchings and the on/off state
G = np.array([[1, 0, -1],
              [-1, 0, -1],
              [1, 2, 2],
              [-1, -2, 2]], dtype=float)
H = np.array([0, 0, 3, 1], dtype=float)


class Config(BenchmarkConfig):
    """
    Configuration of the fuel cell problem.

    """
    FIELDS = ('T', 'tau', 'alpha', 'beta', 'gamma', 'E_min', 'E_max',
              'P_max', 'n_sw', 'E_init', 'z_init', 's_init', 'load_step')
    T = 10
    tau = 1.
    alpha = 6.7e-4
    beta = 0.2
    gamma = 80.
    E_min = 5200.
    E_max = 10200.
    P_max = 1200.
    n_sw = 3
    E_init = 7700.
    z_init = 0
    s_init = 0
    # standard deviation of the load random walk steps
    load_step = 100.

    def check(self):
        """
        Check the configuration.

        :raises ValueError: for inconsistent values

        """
        if int(self.T) < 1:
            raise ValueError('horizon T must be at least 1')
        if not self.E_min < self.E_max:
            raise ValueError('E_min must be smaller than E_max')
        if self.tau <= 0 or self.P_max <= 0 or self.n_sw < 0:
            raise ValueError('tau and P_max must be positive, n_sw '
                             'nonnegative')
        return self


class Layout(object):
    """
    Positions of the variables and parameters.

    Variables: E_0..E_T, z_0..z_T, s_0..s_T, P_0..P_T-1, w_0..w_T-1,
    d_0..d_T-1. Parameters: E_init, z_init, s_init, d_-T..d_-1,
    P^load_0..P^load_T-1.

    """

    def __init__(self, T):
        self.T = T

    def E(self, t):
        return t

    def z(self, t):
        return self.T + 1 + t

    def s(self, t):
        return 2 * (self.T + 1) + t

    def P(self, t):
        return 3 * (self.T + 1) + t

    def w(self, t):
        return 3 * (self.T + 1) + self.T + t

    def d(self, t):
        return 3 * (self.T + 1) + 2 * self.T + t

    @property
    def n(self):
        return 6 * self.T + 3

    @property
    def p_dim(self):
        return 2 * self.T + 3

    def d_past(self, t):
        return 3 + t

    def load(self, t):
        return 3 + self.T + t

    @property
    def integer_indices(self):
        T = self.T
        return [self.z(t) for t in range(T + 1)] + \
            [self.d(t) for t in range(T)]


def dimensions(cfg):
    """
    Problem dimensions of the fuel cell problem.

    :param cfg: Config
    :return:    dictionary with n_var, n_constr, n_int and p_dim

    """
    T = int(cfg.T)
    return {'n_var': 6 * T + 3, 'n_constr': 21 * T + 11, 'n_int': 2 * T + 1,
            'p_dim': 2 * T + 3}


def build(cfg=None):
    """
    Build the fuel cell problem with the parameter
    theta = (E_init, z_init, s_init, d^past, P^load).

    :param cfg: Config
    :return:    ParametricMIQO

    """
    cfg = (cfg or Config()).check()
    T = int(cfg.T)
    x = Layout(T)
    rows = RowBuilder(x.n, x.p_dim)
    # initial values
    rows.add_equality([(x.E(0), 1.)], rhs_params=[(0, 1.)])
    rows.add_equality([(x.z(0), 1.)], rhs_params=[(1, 1.)])
    rows.add_equality([(x.s(0), 1.)], rhs_params=[(2, 1.)])
    for t in range(T):
        # E_t+1 = E_t + tau (P_t - P^load_t)
        rows.add_equality([(x.E(t + 1), 1.), (x.E(t), -1.),
                           (x.P(t), -cfg.tau)],
                          rhs_params=[(x.load(t), -cfg.tau)])
        # z_t+1 = z_t + w_t
        rows.add_equality([(x.z(t + 1), 1.), (x.z(t), -1.), (x.w(t), -1.)])
        # s_t+1 = s_t + d_t - d_t-T
        rows.add_equality([(x.s(t + 1), 1.), (x.s(t), -1.), (x.d(t), -1.)],
                          rhs_params=[(x.d_past(t), -1.)])
    rows.add_bounds([x.E(t) for t in range(T + 1)], cfg.E_min, cfg.E_max)
    for t in range(T):
        # 0 <= P_t <= P_max z_t
        rows.add([(x.P(t), -1.)])
        rows.add([(x.P(t), 1.), (x.z(t), -cfg.P_max)])
    rows.add_bounds([x.z(t) for t in range(T + 1)], 0., 1.)
    rows.add_bounds([x.d(t) for t in range(T)], 0., 1.)
    rows.add_bounds([x.w(t) for t in range(T)], -1., 1.)
    for t in range(T + 1):
        rows.add([(x.s(t), 1.)], cfg.n_sw)
    for t in range(T):
        for g, h in zip(G, H):
            rows.add([(x.w(t), g[0]), (x.z(t), g[1]), (x.d(t), g[2])], h)
    data = rows.build()
    # stage cost alpha P^2 + beta P + gamma z
    P_idx = [x.P(t) for t in range(T)]
    P = sp.csc_matrix((np.full(T, 2. * cfg.alpha), (P_idx, P_idx)),
                      shape=(x.n, x.n))
    q = np.zeros(x.n)
    q[P_idx] = cfg.beta
    q[[x.z(t) for t in range(T)]] = cfg.gamma
    return ParametricMIQO(P, q, 0., data['A'], data['b'],
                          integer_indices=x.integer_indices, p_dim=x.p_dim,
                          b_map=data['b_map'], name='fuel_cell_T%d' % T)


def parameter(cfg, E_init, z_init, d_past, load):
    """
    Assemble a parameter vector.

    :param cfg:    Config
    :param E_init: initial energy
    :param z_init: initial on/off state
    :param d_past: switchings of the last T time steps (oldest first)
    :param load:   load profile of the next T time steps
    :return:       numpy array

    Note: s_init is the number of past switchings.

    """
    d_past = np.asarray(d_past, dtype=float)
    return np.hstack(([E_init, z_init, np.sum(d_past)], d_past,
                      np.asarray(load, dtype=float)))


def project(cfg, theta):
    """
    Project a parameter onto the valid set: clip the energy and the loads,
    round the binaries and recompute the switching counter.

    :param cfg:   Config
    :param theta: parameter vector
    :return:      projected parameter vector

    """
    T = int(cfg.T)
    x = Layout(T)
    theta = np.array(theta, dtype=float)
    theta[0] = np.clip(theta[0], cfg.E_min, cfg.E_max)
    theta[1] = np.clip(np.round(theta[1]), 0, 1)
    past = slice(x.d_past(0), x.d_past(0) + T)
    d_past = np.clip(np.round(theta[past]), 0, 1)
    # drop the oldest switchings exceeding the limit
    excess = int(d_past.sum() - cfg.n_sw)
    for t in np.nonzero(d_past)[0][:max(excess, 0)]:
        d_past[t] = 0
    theta[past] = d_past
    theta[2] = d_past.sum()
    load = slice(x.load(0), x.load(0) + T)
    theta[load] = np.clip(theta[load], 0, cfg.P_max)
    return theta


def load_profile(cfg, length, seed=None):
    """
    Random walk load profile clipped to [0, P_max].

    :param cfg:    Config
    :param length: number of time steps
    :param seed:   random seed
    :return:       numpy array

    """
    rng = np.random.RandomState(seed)
    steps = rng.normal(0, cfg.load_step, length)
    load = np.empty(length)
    value = cfg.P_max / 2.
    for t in range(length):
        value = np.clip(value + steps[t], 0, cfg.P_max)
        load[t] = value
    return load


def rollout(cfg, steps, seed=None, problem=None):
    """
    Simulate the closed loop, applying the first move of the optimal
    solution at every time step.

    :param cfg:     Config
    :param steps:   number of time steps
    :param seed:    random seed of the load profile
    :param problem: ParametricMIQO [default: build(cfg)]
    :return:        parameter trajectory (steps x p_dim)
    :raises SamplingError: if the oracle fails along the trajectory

    """
    T = int(cfg.T)
    x = Layout(T)
    if problem is None:
        problem = build(cfg)
    load = load_profile(cfg, steps + T, seed)
    E, z = float(cfg.E_init), float(cfg.z_init)
    d_past = np.zeros(T)
    trajectory = []
    for k in range(steps):
        theta = parameter(cfg, E, z, d_past, load[k:k + T])
        trajectory.append(theta)
        try:
            result = solve_miqo(problem.instantiate(theta))
        except SolverError:
            raise SamplingError(k)
        E = float(np.clip(result.x[x.E(1)], cfg.E_min, cfg.E_max))
        z = float(np.round(result.x[x.z(1)]))
        d_past = np.append(d_past[1:], np.round(result.x[x.d(0)]))
    return np.array(trajectory)


class FeasibilityCheck(object):
    """
    Accept parameters whose instance the oracle solves.

    :param problem: ParametricMIQO

    """

    def __init__(self, problem):
        self.problem = problem

    def __call__(self, theta):
        try:
            solve_miqo(self.problem.instantiate(theta))
        except SolverError:
            return False
        return True


class Projection(object):
    """Picklable projection for a configuration."""

    def __init__(self, cfg):
        self.cfg = cfg

    def __call__(self, theta):
        return project(self.cfg, theta)


# perturbations are drawn in kilojoule and kilowatt
SAMPLE_UNIT = 1000.
RADIUS = 0.5
STEPS = 100


def sampler(cfg=None, radius=RADIUS, seed=0, steps=STEPS, problem=None,
            check_feasibility=True):
    """
    Sampler drawing parameters uniformly from balls around a closed-loop
    trajectory.

    :param cfg:               Config
    :param radius:            radius of the balls (in kJ and kW units)
    :param seed:              random seed (trajectory and perturbations)
    :param steps:             length of the trajectory
    :param problem:           ParametricMIQO [default: build(cfg)]
    :param check_feasibility: reject parameters the oracle can not solve
    :return:                  BallSampler

    """
    cfg = (cfg or Config()).check()
    T = int(cfg.T)
    x = Layout(T)
    if problem is None:
        problem = build(cfg)
    centers = rollout(cfg, steps, seed, problem)
    scale = np.ones(x.p_dim)
    scale[0] = SAMPLE_UNIT
    scale[x.load(0):] = SAMPLE_UNIT
    accept = FeasibilityCheck(problem) if check_feasibility else None
    return BallSampler(centers, radius, scale=scale, seed=seed,
                       project=Projection(cfg), accept=accept,
                       prefix='fuel_cell')
