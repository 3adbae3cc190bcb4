# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
"""
This file contains the motion planning benchmark: a double integrator moves
towards a desired position while avoiding rectangular obstacles, modelled
with big-M constraints.

"""

from __future__ import absolute_import, division, print_function

import numpy as np
import scipy.sparse as sp

from . import BenchmarkConfig, RowBuilder, BoxSampler
from ..problems import ParametricMIQO

SIZE_PARAM = 'n_obs'


class Config(BenchmarkConfig):
    """
    Configuration of the motion planning problem.

    Obstacles are given as list of (lower corner, upper corner) pairs; if
    None, `n_obs` random obstacles are generated with `obstacle_seed`.

    """
    FIELDS = ('T', 'dim', 'tau', 'gamma', 'p_des', 'v_init', 'p_lower',
              'p_upper', 'v_max', 'u_max', 'n_obs', 'obstacles',
              'obstacle_seed', 'big_m')
    # horizon and obstacle count sized for the branch-and-bound oracle
    T = 10
    dim = 2
    tau = 0.1
    gamma = 0.01
    p_des = (-10.5, -10.)
    v_init = (0., 0.)
    p_lower = (-15., -15.)
    p_upper = (15., 15.)
    v_max = 5.
    u_max = 10.
    n_obs = 2
    obstacles = None
    obstacle_seed = 0
    # None sets the big-M constant to the box size plus 1
    big_m = None

    def check(self):
        """
        Check the configuration.

        :raises ValueError: for inconsistent values

        """
        if int(self.T) < 1 or int(self.dim) < 1:
            raise ValueError('horizon T and dimension must be positive')
        for name in ('p_des', 'v_init', 'p_lower', 'p_upper'):
            if len(getattr(self, name)) != int(self.dim):
                raise ValueError('%s must have dimension %d' %
                                 (name, int(self.dim)))
        if np.any(np.asarray(self.p_lower) >= np.asarray(self.p_upper)):
            raise ValueError('p_lower must be smaller than p_upper')
        return self

    def obstacle_list(self):
        """
        The obstacles.

        :return: list of (lower, upper) numpy array tuples

        """
        if self.obstacles is None:
            return random_obstacles(self, int(self.n_obs),
                                    self.obstacle_seed)
        return [(np.asarray(lo, dtype=float), np.asarray(up, dtype=float))
                for lo, up in self.obstacles]

    def big_m_vector(self):
        """Big-M constant per dimension."""
        if self.big_m is None:
            return np.asarray(self.p_upper, dtype=float) - \
                np.asarray(self.p_lower, dtype=float) + 1.
        return np.full(int(self.dim), float(self.big_m))


def random_obstacles(cfg, n_obs, seed=None, min_size=2., max_size=6.,
                     max_tries=1000):
    """
    Random rectangular obstacles within the position box, not covering the
    desired position.

    :param cfg:       Config
    :param n_obs:     number of obstacles
    :param seed:      random seed
    :param min_size:  minimum side length
    :param max_size:  maximum side length
    :param max_tries: maximum number of draws
    :return:          list of (lower, upper) tuples

    """
    rng = np.random.RandomState(seed)
    p_lo = np.asarray(cfg.p_lower, dtype=float)
    p_hi = np.asarray(cfg.p_upper, dtype=float)
    p_des = np.asarray(cfg.p_des, dtype=float)
    obstacles = []
    for _ in range(max_tries):
        if len(obstacles) == n_obs:
            break
        size = rng.uniform(min_size, max_size, len(p_lo))
        lower = rng.uniform(p_lo, p_hi - size)
        upper = lower + size
        if np.all(lower <= p_des) and np.all(p_des <= upper):
            continue
        obstacles.append((lower, upper))
    if len(obstacles) < n_obs:
        raise ValueError('could not place %d obstacles' % n_obs)
    return obstacles


class Layout(object):
    """
    Positions of the variables.

    Variables: p_0..p_T, v_0..v_T, u_0..u_T-1 (each of dimension d), then
    per time step and obstacle the binaries of the upper and the lower
    obstacle sides (each of dimension d).

    """

    def __init__(self, T, dim, n_obs):
        self.T, self.dim, self.n_obs = T, dim, n_obs

    def p(self, t, j):
        return t * self.dim + j

    def v(self, t, j):
        return (self.T + 1 + t) * self.dim + j

    def u(self, t, j):
        return (2 * (self.T + 1) + t) * self.dim + j

    def delta_upper(self, t, i, j):
        offset = (2 * (self.T + 1) + self.T) * self.dim
        return offset + 2 * self.dim * (t * self.n_obs + i) + j

    def delta_lower(self, t, i, j):
        return self.delta_upper(t, i, j) + self.dim

    @property
    def n(self):
        return (3 * self.T + 2) * self.dim + \
            2 * self.dim * self.n_obs * (self.T + 1)

    @property
    def integer_indices(self):
        return list(range(self.delta_upper(0, 0, 0), self.n))


def dimensions(cfg):
    """
    Problem dimensions of the motion planning problem.

    :param cfg: Config
    :return:    dictionary with n_var, n_constr, n_int and p_dim

    """
    T, d = int(cfg.T), int(cfg.dim)
    n_obs = len(cfg.obstacle_list())
    n_int = 2 * d * n_obs * (T + 1)
    return {'n_var': (3 * T + 2) * d + n_int,
            'n_constr': 8 * d + 10 * d * T + n_obs * (T + 1) * (6 * d + 1),
            'n_int': n_int, 'p_dim': d}


def build(cfg=None):
    """
    Build the motion planning problem with the initial position as
    parameter.

    :param cfg: Config
    :return:    ParametricMIQO
    :raises ValueError: if obstacles leave the position box or the big-M
                        constant does not deactivate the avoidance rows

    """
    cfg = (cfg or Config()).check()
    T, d = int(cfg.T), int(cfg.dim)
    obstacles = cfg.obstacle_list()
    p_lo = np.asarray(cfg.p_lower, dtype=float)
    p_hi = np.asarray(cfg.p_upper, dtype=float)
    M = cfg.big_m_vector()
    for lower, upper in obstacles:
        if np.any(lower < p_lo) or np.any(upper > p_hi) or \
                np.any(lower >= upper):
            raise ValueError('obstacles must be boxes within the position '
                             'bounds')
        if np.any(M < upper - p_lo) or np.any(M < p_hi - lower):
            raise ValueError('big-M constant too small to deactivate the '
                             'obstacle avoidance')
    x = Layout(T, d, len(obstacles))
    rows = RowBuilder(x.n, d)
    for j in range(d):
        rows.add_equality([(x.p(0, j), 1.)], rhs_params=[(j, 1.)])
        rows.add_equality([(x.v(0, j), 1.)], cfg.v_init[j])
    h2 = cfg.tau ** 2 / 2.
    for t in range(T):
        for j in range(d):
            rows.add_equality([(x.p(t + 1, j), 1.), (x.p(t, j), -1.),
                               (x.v(t, j), -cfg.tau), (x.u(t, j), -h2)])
            rows.add_equality([(x.v(t + 1, j), 1.), (x.v(t, j), -1.),
                               (x.u(t, j), -cfg.tau)])
    for j in range(d):
        rows.add_bounds([x.p(t, j) for t in range(T + 1)], p_lo[j], p_hi[j])
    rows.add_bounds([x.v(t, j) for t in range(T + 1) for j in range(d)],
                    -cfg.v_max, cfg.v_max)
    rows.add_bounds([x.u(t, j) for t in range(T) for j in range(d)],
                    -cfg.u_max, cfg.u_max)
    for t in range(T + 1):
        for i, (lower, upper) in enumerate(obstacles):
            for j in range(d):
                # p >= o_upper unless delta_upper is set
                rows.add([(x.p(t, j), -1.), (x.delta_upper(t, i, j), -M[j])],
                         -upper[j])
                # p <= o_lower unless delta_lower is set
                rows.add([(x.p(t, j), 1.), (x.delta_lower(t, i, j), -M[j])],
                         lower[j])
            deltas = [x.delta_upper(t, i, j) for j in range(d)] + \
                [x.delta_lower(t, i, j) for j in range(d)]
            rows.add([(k, 1.) for k in deltas], 2 * d - 1)
            rows.add_bounds(deltas, 0., 1.)
    data = rows.build()
    # sum_t ||p_t - p_des||^2 + gamma sum_t ||u_t||^2
    p_idx = [x.p(t, j) for t in range(T + 1) for j in range(d)]
    u_idx = [x.u(t, j) for t in range(T) for j in range(d)]
    diag = np.hstack((np.full(len(p_idx), 2.), np.full(len(u_idx),
                                                       2. * cfg.gamma)))
    idx = p_idx + u_idx
    P = sp.csc_matrix((diag, (idx, idx)), shape=(x.n, x.n))
    p_des = np.asarray(cfg.p_des, dtype=float)
    q = np.zeros(x.n)
    q[p_idx] = np.tile(-2. * p_des, T + 1)
    r = (T + 1) * float(np.dot(p_des, p_des))
    return ParametricMIQO(P, q, r, data['A'], data['b'],
                          integer_indices=x.integer_indices, p_dim=d,
                          b_map=data['b_map'],
                          name='motion_obs%d' % len(obstacles))


def inside_obstacle(theta, obstacles):
    """
    Flag whether a position lies strictly inside any obstacle.

    :param theta:     position
    :param obstacles: list of (lower, upper) tuples
    :return:          bool

    """
    theta = np.asarray(theta, dtype=float)
    return any(np.all(lower < theta) and np.all(theta < upper)
               for lower, upper in obstacles)


class OutsideObstacles(object):
    """
    Accept positions outside all obstacles.

    :param obstacles: list of (lower, upper) tuples

    """

    def __init__(self, obstacles):
        self.obstacles = obstacles

    def __call__(self, theta):
        return not inside_obstacle(theta, self.obstacles)


def project(cfg, theta):
    """
    Project a position onto the position box.

    :param cfg:   Config
    :param theta: position
    :return:      clipped position

    """
    return np.clip(theta, cfg.p_lower, cfg.p_upper)


def sampler(cfg=None, seed=0, problem=None, **kwargs):
    """
    Sampler drawing initial positions uniformly from the position box,
    rejecting positions inside obstacles.

    :param cfg:     Config
    :param seed:    random seed
    :param problem: unused, accepted for a uniform family interface
    :return:        BoxSampler

    """
    # pylint: disable=unused-argument
    cfg = (cfg or Config()).check()
    return BoxSampler(cfg.p_lower, cfg.p_upper, seed=seed,
                      accept=OutsideObstacles(cfg.obstacle_list()),
                      prefix='motion')
