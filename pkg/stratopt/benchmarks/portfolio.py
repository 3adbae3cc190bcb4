# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
"""
This file contains the portfolio trading benchmark with a cardinality
constraint on the number of held assets.

The risk model is a factor model Sigma = F Sigma^F F^T + D, updated at the
beginning of every month from a synthetic, seeded factor market. The cash
account is the last asset.

"""

from __future__ import absolute_import, division, print_function

import numpy as np
import scipy.sparse as sp

from . import BenchmarkConfig, RowBuilder, BallSampler, SamplingError
from ..problems import ParametricMIQO
from ..solvers import SolverError
from ..solvers.bnb import solve_miqo

SIZE_PARAM = 'c'


class Config(BenchmarkConfig):
    """
    Configuration of the portfolio problem.

    """
    FIELDS = ('n_assets', 'n_factors', 'c', 'gamma', 'borrow', 'trade',
              'risk_free', 'big_m', 'window', 'rebalance', 'info_ratio')
    # number of non-cash assets; defaults sized for the branch-and-bound
    # oracle, larger markets are configured explicitly
    n_assets = 20
    n_factors = 5
    c = 5
    gamma = 100.
    borrow = 1e-4
    trade = 1e-2
    risk_free = 1e-4
    # weights are normalized, hence |w_i| <= 1 for held assets
    big_m = 1.
    # risk model estimation window and update period (trading days)
    window = 504
    rebalance = 21
    # square root of the forecast scaling
    info_ratio = 0.15

    def check(self):
        """
        Check the configuration.

        :raises ValueError: for inconsistent values

        """
        if int(self.c) < 1:
            raise ValueError('cardinality c must be at least 1')
        if int(self.n_assets) < 1 or int(self.n_factors) < 1:
            raise ValueError('number of assets and factors must be positive')
        if int(self.window) < 2 or int(self.rebalance) < 1:
            raise ValueError('window must be at least 2, rebalance positive')
        if self.big_m <= 0:
            raise ValueError('big_m must be positive')
        return self


class Layout(object):
    """
    Positions of the variables and parameters.

    Variables: w (n+1), y = F^T w (k), (w)_- (n+1), |w - w_prev| (n+1),
    cardinality binaries (n+1). Parameters: w_prev, r_hat, diag(D), upper
    triangle of Sigma^F (row-major), F (row-major).

    """

    def __init__(self, n_assets, n_factors):
        self.N = int(n_assets) + 1
        self.k = int(n_factors)
        self.triu = list(zip(*np.triu_indices(self.k)))

    def w(self, i):
        return i

    def y(self, j):
        return self.N + j

    def w_minus(self, i):
        return self.N + self.k + i

    def trade(self, i):
        return 2 * self.N + self.k + i

    def card(self, i):
        return 3 * self.N + self.k + i

    @property
    def n(self):
        return 4 * self.N + self.k

    def w_prev(self, i):
        return i

    def r_hat(self, i):
        return self.N + i

    def D(self, i):
        return 2 * self.N + i

    def sigma_f(self, pos):
        return 3 * self.N + pos

    def F(self, i, j):
        return 3 * self.N + len(self.triu) + i * self.k + j

    @property
    def p_dim(self):
        return 3 * self.N + len(self.triu) + self.N * self.k

    def blocks(self):
        """Slices of the parameter blocks."""
        N, nt = self.N, len(self.triu)
        bounds = [0, N, 2 * N, 3 * N, 3 * N + nt, self.p_dim]
        return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]


def dimensions(cfg):
    """
    Problem dimensions of the portfolio problem.

    :param cfg: Config
    :return:    dictionary with n_var, n_constr, n_int and p_dim

    """
    N, k = int(cfg.n_assets) + 1, int(cfg.n_factors)
    return {'n_var': 4 * N + k, 'n_constr': 8 * N + 2 * k + 3, 'n_int': N,
            'p_dim': 3 * N + k * (k + 1) // 2 + N * k}


def build(cfg=None):
    """
    Build the portfolio problem with the parameter
    theta = (w_prev, r_hat, D, Sigma^F, F).

    :param cfg: Config
    :return:    ParametricMIQO

    Note: The risk model enters the quadratic cost and the factor exposure
          rows, hence the matrices depend on the parameter.

    """
    cfg = (cfg or Config()).check()
    x = Layout(cfg.n_assets, cfg.n_factors)
    N, k, n = x.N, x.k, x.n
    rows = RowBuilder(n, x.p_dim)
    # factor exposures y = F^T w
    for j in range(k):
        rows.add_equality([(x.y(j), 1.)],
                          matrix_params=[(x.F(i, j), x.w(i), -1.)
                                         for i in range(N)])
    for i in range(N):
        # (w)_- >= -w, (w)_- >= 0
        rows.add([(x.w_minus(i), -1.), (x.w(i), -1.)])
        rows.add([(x.w_minus(i), -1.)])
        # trade >= |w - w_prev|
        rows.add([(x.w(i), 1.), (x.trade(i), -1.)],
                 rhs_params=[(x.w_prev(i), 1.)])
        rows.add([(x.w(i), -1.), (x.trade(i), -1.)],
                 rhs_params=[(x.w_prev(i), -1.)])
        # |w_i| <= M card_i
        rows.add([(x.w(i), 1.), (x.card(i), -cfg.big_m)])
        rows.add([(x.w(i), -1.), (x.card(i), -cfg.big_m)])
    rows.add_bounds([x.card(i) for i in range(N)], 0., 1.)
    rows.add([(x.card(i), 1.) for i in range(N)], cfg.c)
    rows.add_equality([(x.w(i), 1.) for i in range(N)], 1.)
    data = rows.build()
    # risk cost gamma (y^T Sigma^F y + w^T D w)
    P_maps = []
    for i in range(N):
        P_maps.append((x.D(i), sp.csc_matrix(([2. * cfg.gamma],
                                              ([x.w(i)], [x.w(i)])),
                                             shape=(n, n))))
    for pos, (a, b) in enumerate(x.triu):
        if a == b:
            entries = ([2. * cfg.gamma], ([x.y(a)], [x.y(a)]))
        else:
            entries = ([2. * cfg.gamma] * 2, ([x.y(a), x.y(b)],
                                              [x.y(b), x.y(a)]))
        P_maps.append((x.sigma_f(pos), sp.csc_matrix(entries, shape=(n, n))))
    q = np.zeros(n)
    q[[x.w_minus(i) for i in range(N)]] = cfg.borrow
    q[[x.trade(i) for i in range(N)]] = cfg.trade
    q_map = sp.csr_matrix((-np.ones(N), ([x.w(i) for i in range(N)],
                                         [x.r_hat(i) for i in range(N)])),
                          shape=(n, x.p_dim))
    return ParametricMIQO(sp.csc_matrix((n, n)), q, 0., data['A'], data['b'],
                          integer_indices=[x.card(i) for i in range(N)],
                          p_dim=x.p_dim, q_map=q_map, b_map=data['b_map'],
                          P_maps=P_maps, A_maps=data['A_maps'],
                          name='portfolio_c%d' % int(cfg.c))


def parameter(cfg, w_prev, r_hat, D, sigma_f, F):
    """
    Assemble a parameter vector.

    :param cfg:     Config
    :param w_prev:  previous weights (n+1)
    :param r_hat:   return forecasts (n+1)
    :param D:       idiosyncratic variances (n+1)
    :param sigma_f: factor covariance (k x k)
    :param F:       factor loadings ((n+1) x k)
    :return:        numpy array

    """
    k = int(cfg.n_factors)
    sigma_f = np.asarray(sigma_f, dtype=float)
    return np.hstack((w_prev, r_hat, D, sigma_f[np.triu_indices(k)],
                      np.asarray(F, dtype=float).ravel()))


def project(cfg, theta):
    """
    Project a parameter onto the valid set: clip the idiosyncratic variances
    to be nonnegative and the factor covariance to be positive semidefinite.

    :param cfg:   Config
    :param theta: parameter vector
    :return:      projected parameter vector

    """
    x = Layout(cfg.n_assets, cfg.n_factors)
    theta = np.array(theta, dtype=float)
    _, _, D, SF, _ = x.blocks()
    theta[D] = np.maximum(theta[D], 0)
    upper = np.triu_indices(x.k)
    sigma_f = np.zeros((x.k, x.k))
    sigma_f[upper] = theta[SF]
    sigma_f = sigma_f + np.triu(sigma_f, 1).T
    eigval, eigvec = np.linalg.eigh(sigma_f)
    sigma_f = np.dot(eigvec * np.maximum(eigval, 0), eigvec.T)
    theta[SF] = sigma_f[upper]
    return theta


class SyntheticMarket(object):
    """
    Seeded factor market with realized returns, monthly factor risk models
    and noisy return forecasts.

    :param cfg:     Config
    :param periods: number of trading periods after the estimation window
    :param seed:    random seed

    """
    FACTOR_VOL = 0.01
    DRIFT = 5e-4

    def __init__(self, cfg, periods, seed=None):
        self.cfg = cfg
        n, k = int(cfg.n_assets), int(cfg.n_factors)
        self.window = int(cfg.window)
        rng = np.random.RandomState(seed)
        total = self.window + periods
        loadings = rng.normal(0, 1, (n, k))
        factors = rng.normal(0, self.FACTOR_VOL / np.sqrt(k), (total, k))
        idio = rng.uniform(0.005, 0.02, n)
        drift = rng.normal(self.DRIFT, self.DRIFT, n)
        self.returns = drift + np.dot(factors, loadings.T) + \
            rng.normal(0, 1, (total, n)) * idio
        # forecasts a (r + noise) with the MSE optimal scaling a
        a = cfg.info_ratio ** 2
        var = np.var(self.returns)
        noise = rng.normal(0, np.sqrt(var * (1. / a - 1.)), (total, n))
        self.forecasts = a * (self.returns + noise)

    def risk_model(self, t):
        """
        Factor risk model valid at period t (estimated at the beginning of
        the month from the returns of the preceding window).

        :param t: period (counted after the estimation window)
        :return:  tuple (D (n+1), Sigma^F (k x k), F ((n+1) x k))

        """
        k = int(self.cfg.n_factors)
        start = t - t % int(self.cfg.rebalance)
        past = self.returns[start:start + self.window]
        cov = np.atleast_2d(np.cov(past, rowvar=False))
        eigval, eigvec = np.linalg.eigh(cov)
        order = np.argsort(eigval)[::-1][:k]
        F = np.zeros((len(cov) + 1, k))
        F[:-1, :len(order)] = eigvec[:, order]
        sigma_f = np.zeros((k, k))
        sigma_f[np.arange(len(order)), np.arange(len(order))] = \
            np.maximum(eigval[order], 0)
        D = np.zeros(len(cov) + 1)
        explained = np.einsum('ij,jk,ik->i', F[:-1], sigma_f, F[:-1])
        D[:-1] = np.maximum(np.diag(cov) - explained, 0)
        return D, sigma_f, F

    def forecast(self, t):
        """
        Return forecasts of period t, the risk-free rate is known exactly.

        :param t: period (counted after the estimation window)
        :return:  numpy array (n+1)

        """
        return np.append(self.forecasts[self.window + t],
                         self.cfg.risk_free)


def rollout(cfg, steps, seed=None, problem=None):
    """
    Simulate the trading, starting from an all-cash portfolio and applying
    the optimal weights at every period.

    :param cfg:     Config
    :param steps:   number of periods
    :param seed:    random seed of the market
    :param problem: ParametricMIQO [default: build(cfg)]
    :return:        parameter trajectory (steps x p_dim)
    :raises SamplingError: if the oracle fails along the trajectory

    """
    x = Layout(cfg.n_assets, cfg.n_factors)
    if problem is None:
        problem = build(cfg)
    market = SyntheticMarket(cfg, steps, seed)
    w_prev = np.zeros(x.N)
    w_prev[-1] = 1.
    trajectory = []
    for t in range(steps):
        D, sigma_f, F = market.risk_model(t)
        theta = parameter(cfg, w_prev, market.forecast(t), D, sigma_f, F)
        trajectory.append(theta)
        try:
            result = solve_miqo(problem.instantiate(theta))
        except SolverError:
            raise SamplingError(t)
        w_prev = result.x[:x.N].copy()
    return np.array(trajectory)


class Projection(object):
    """Picklable projection for a configuration."""

    def __init__(self, cfg):
        self.cfg = cfg

    def __call__(self, theta):
        return project(self.cfg, theta)


RADIUS = 1e-3
STEPS = 100


def sampler(cfg=None, radius=RADIUS, seed=0, steps=STEPS, problem=None):
    """
    Sampler drawing parameters around a simulated trading trajectory, with a
    radius relative to the magnitude of every parameter block.

    :param cfg:     Config
    :param radius:  relative radius
    :param seed:    random seed (market and perturbations)
    :param steps:   length of the trajectory
    :param problem: ParametricMIQO [default: build(cfg)]
    :return:        BallSampler

    """
    cfg = (cfg or Config()).check()
    x = Layout(cfg.n_assets, cfg.n_factors)
    centers = rollout(cfg, steps, seed, problem)
    return BallSampler(centers, radius, blocks=x.blocks(), relative=True,
                       seed=seed, project=Projection(cfg),
                       prefix='portfolio')
