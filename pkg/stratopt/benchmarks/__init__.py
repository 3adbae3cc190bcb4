# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
"""
This package contains generators for the benchmark problem families (fuel
cell energy management, portfolio trading and motion planning) and the
samplers drawing their parameters.

Every family module exposes:

  - `Config`:                configuration with the default constants
  - `SIZE_PARAM`:            name of the configuration entry used as size
  - `build(cfg)`:            the ParametricMIQO
  - `dimensions(cfg)`:       hand-derived problem dimensions
  - `project(cfg, theta)`:   projection of a parameter onto the valid set
  - `sampler(cfg, ...)`:     parameter sampler (callable by sample index)

"""

from __future__ import absolute_import, division, print_function

import numpy as np
import scipy.sparse as sp

from ..problems import ParameterInstance
from ..utils import read_json, write_json


class SamplingError(Exception):
    """
    Exception raised if no valid parameter is found within the retry budget.

    The `value` holds the sample index.

    """
    def __init__(self, value):
        super(SamplingError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


class BenchmarkConfig(object):
    """
    Base class of the family configurations.

    All configurable values are class attributes listed in `FIELDS`; keyword
    arguments override them per instance.

    """
    FIELDS = ()

    def __init__(self, **kwargs):
        unknown = set(kwargs) - set(self.FIELDS)
        if unknown:
            raise ValueError('unknown configuration entries: %s' %
                             sorted(unknown))
        for key, value in kwargs.items():
            setattr(self, key, value)

    def to_dict(self):
        """Dictionary representation."""
        data = {}
        for key in self.FIELDS:
            value = getattr(self, key)
            if isinstance(value, np.ndarray):
                value = value.tolist()
            elif isinstance(value, tuple):
                value = list(value)
            data[key] = value
        return data

    @classmethod
    def from_dict(cls, data):
        """Create a configuration from its dictionary representation."""
        return cls(**dict(data or {}))

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__, ', '.join(
            '%s=%r' % (k, getattr(self, k)) for k in self.FIELDS))


class RowBuilder(object):
    """
    Incremental builder of the inequality rows A x <= b(theta).

    :param n:     number of variables
    :param p_dim: dimension of the parameter vector

    """

    def __init__(self, n, p_dim):
        self.n = n
        self.p_dim = p_dim
        self.m = 0
        self._a = ([], [], [])
        self._b = []
        self._b_map = ([], [], [])
        self._a_maps = {}

    def add(self, coeffs, rhs=0., rhs_params=(), matrix_params=()):
        """
        Add the row sum(coeffs) <= rhs + sum(rhs_params).

        :param coeffs:        iterable of (variable, value)
        :param rhs:           constant right hand side
        :param rhs_params:    iterable of (parameter, value) of the right
                              hand side
        :param matrix_params: iterable of (parameter, variable, value) of the
                              parametric row coefficients
        :return:              row index

        """
        i = self.m
        for col, val in coeffs:
            self._a[0].append(i)
            self._a[1].append(col)
            self._a[2].append(val)
        self._b.append(rhs)
        for k, val in rhs_params:
            self._b_map[0].append(i)
            self._b_map[1].append(k)
            self._b_map[2].append(val)
        for k, col, val in matrix_params:
            entries = self._a_maps.setdefault(k, ([], [], []))
            entries[0].append(i)
            entries[1].append(col)
            entries[2].append(val)
        self.m += 1
        return i

    def add_equality(self, coeffs, rhs=0., rhs_params=(), matrix_params=()):
        """
        Add the equality as a pair of opposite rows.

        :return: index of the first row

        """
        coeffs = list(coeffs)
        rhs_params = list(rhs_params)
        matrix_params = list(matrix_params)
        i = self.add(coeffs, rhs, rhs_params, matrix_params)
        self.add([(c, -v) for c, v in coeffs], -rhs,
                 [(k, -v) for k, v in rhs_params],
                 [(k, c, -v) for k, c, v in matrix_params])
        return i

    def add_bounds(self, variables, lower, upper):
        """
        Add finite lower and upper bounds on the given variables.

        """
        for var in variables:
            if np.isfinite(upper):
                self.add([(var, 1.)], upper)
            if np.isfinite(lower):
                self.add([(var, -1.)], -lower)

    def build(self):
        """
        The constraint data.

        :return: dictionary with A, b, b_map and A_maps

        """
        shape = (self.m, self.n)
        A_maps = [(k, sp.csr_matrix((v, (r, c)), shape=shape))
                  for k, (r, c, v) in sorted(self._a_maps.items())]
        return {'A': sp.csr_matrix((self._a[2], (self._a[0], self._a[1])),
                                   shape=shape),
                'b': np.array(self._b, dtype=float),
                'b_map': sp.csr_matrix((self._b_map[2], (self._b_map[0],
                                                         self._b_map[1])),
                                       shape=(self.m, self.p_dim)),
                'A_maps': A_maps}


def ball_point(rng, dim, radius):
    """
    Point drawn uniformly from a ball centered at the origin.

    :param rng:    numpy RandomState
    :param dim:    dimension
    :param radius: radius of the ball
    :return:       numpy array

    """
    if radius == 0 or dim == 0:
        return np.zeros(dim)
    direction = rng.randn(dim)
    norm = np.linalg.norm(direction)
    if norm == 0:
        return np.zeros(dim)
    return direction / norm * radius * rng.uniform() ** (1. / dim)


class Sampler(object):
    """
    Base class of the parameter samplers.

    Samplers are called with a sample index and derive the random state from
    the seed and the index, hence samples can be drawn in any order and by
    any number of processes.

    :param seed:        random seed
    :param project:     function projecting a parameter onto the valid set
    :param accept:      function returning False for rejected parameters
    :param prefix:      prefix of the sample identifiers
    :param max_retries: maximum number of draws per sample

    """
    MAX_RETRIES = 100

    def __init__(self, seed=0, project=None, accept=None, prefix='sample',
                 max_retries=MAX_RETRIES):
        self.seed = int(seed)
        self.project = project
        self.accept = accept
        self.prefix = prefix
        self.max_retries = max_retries

    def draw(self, rng, index):
        """Draw an unprojected parameter."""
        raise NotImplementedError('must be implemented by subclass.')

    def __call__(self, index):
        rng = np.random.RandomState([self.seed, index])
        for _ in range(self.max_retries):
            theta = self.draw(rng, index)
            if self.project is not None:
                theta = self.project(theta)
            if self.accept is None or self.accept(theta):
                return ParameterInstance(theta, '%s-%d-%d' %
                                         (self.prefix, self.seed, index))
        raise SamplingError(index)

    def sample(self, count, start=0):
        """
        Draw a list of parameters.

        :param count: number of parameters
        :param start: index of the first parameter
        :return:      list of ParameterInstance

        """
        return [self(i) for i in range(start, start + count)]


class BallSampler(Sampler):
    """
    Sample uniformly from balls centered at the given points.

    Sample i is drawn around center i modulo the number of centers.

    :param centers:  list of center points
    :param radius:   radius of the balls
    :param blocks:   list of slices perturbed independently
                     [default: the whole vector]
    :param relative: scale the radius of every block by its magnitude
    :param scale:    per component scaling of the perturbation

    """

    def __init__(self, centers, radius, blocks=None, relative=False,
                 scale=None, **kwargs):
        super(BallSampler, self).__init__(**kwargs)
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        if not len(self.centers):
            raise ValueError('at least one center must be given')
        if radius < 0:
            raise ValueError('radius must not be negative')
        self.radius = radius
        p = self.centers.shape[1]
        self.blocks = blocks or [slice(0, p)]
        self.relative = relative
        self.scale = np.ones(p) if scale is None else \
            np.asarray(scale, dtype=float)

    def draw(self, rng, index):
        center = self.centers[index % len(self.centers)]
        theta = center.copy()
        for block in self.blocks:
            radius = self.radius
            if self.relative:
                radius *= np.linalg.norm(center[block])
            dim = len(theta[block])
            theta[block] += ball_point(rng, dim, radius) * self.scale[block]
        return theta


class BoxSampler(Sampler):
    """
    Sample uniformly between lower and upper bounds.

    :param lower: lower bounds
    :param upper: upper bounds

    """

    def __init__(self, lower, upper, **kwargs):
        super(BoxSampler, self).__init__(**kwargs)
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        if np.any(self.lower > self.upper):
            raise ValueError('lower bounds must not exceed upper bounds')

    def draw(self, rng, index):
        return rng.uniform(self.lower, self.upper)


# family registry
def family_module(family):
    """
    Module of a benchmark family.

    :param family: family name ('fuel_cell', 'portfolio' or 'motion')
    :return:       module

    """
    try:
        return FAMILIES[family]
    except KeyError:
        raise ValueError('unknown benchmark family %r, choose from %s' %
                         (family, sorted(FAMILIES)))


def make_config(family, config=None):
    """
    Configuration of a benchmark family.

    :param family: family name
    :param config: dictionary overriding the defaults
    :return:       configuration object

    """
    return family_module(family).Config.from_dict(config)


def make_problem(family, config=None):
    """
    Build the problem of a benchmark family.

    :param family: family name
    :param config: dictionary overriding the defaults
    :return:       ParametricMIQO

    """
    module = family_module(family)
    return module.build(module.Config.from_dict(config))


class SamplerSpec(object):
    """
    Specification of a parameter sampler, stored as JSON next to the problem.

    :param family: family name
    :param config: dictionary overriding the family defaults
    :param radius: sampling radius [default: the family default]
    :param seed:   random seed
    :param steps:  length of the base trajectory (if the family uses one)

    """

    def __init__(self, family, config=None, radius=None, seed=0, steps=None):
        family_module(family)
        self.family = family
        self.config = dict(config or {})
        self.radius = radius
        self.seed = int(seed)
        self.steps = steps

    def to_dict(self):
        """Dictionary representation."""
        return {'family': self.family, 'config': self.config,
                'radius': self.radius, 'seed': self.seed,
                'steps': self.steps}

    @classmethod
    def from_dict(cls, data):
        """Create a SamplerSpec from its dictionary representation."""
        unknown = set(data) - {'family', 'config', 'radius', 'seed', 'steps'}
        if unknown:
            raise ValueError('unknown sampler spec entries: %s' %
                             sorted(unknown))
        return cls(data['family'], data.get('config'), data.get('radius'),
                   data.get('seed', 0), data.get('steps'))

    def save(self, filename):
        """Save the sampler description as JSON file."""
        write_json(self.to_dict(), filename)

    @classmethod
    def load(cls, filename):
        """Load a spec from a JSON file."""
        return cls.from_dict(read_json(filename))

    def problem(self):
        """The problem of the family."""
        return make_problem(self.family, self.config)

    def sampler(self, seed=None, problem=None):
        """
        Create the sampler.

        :param seed:    random seed [default: the stored seed]
        :param problem: ParametricMIQO (avoids rebuilding it)
        :return:        Sampler

        """
        module = family_module(self.family)
        kwargs = {}
        if self.radius is not None:
            kwargs['radius'] = self.radius
        if self.steps is not None:
            kwargs['steps'] = self.steps
        return module.sampler(module.Config.from_dict(self.config),
                              seed=self.seed if seed is None else seed,
                              problem=problem, **kwargs)


# import the submodules
from . import fuel_cell, portfolio, motion

FAMILIES = {'fuel_cell': fuel_cell, 'portfolio': portfolio, 'motion': motion}


def _family_config(module, cfg):
    if cfg is None or isinstance(cfg, dict):
        return module.Config.from_dict(cfg)
    return cfg


# functional interface
def build_fuel_cell(cfg=None):
    """
    Fuel cell problem, theta = (E_init, z_init, s_init, d^past, P^load).

    :param cfg: fuel_cell.Config or dictionary overriding the defaults
    :return:    ParametricMIQO

    """
    return fuel_cell.build(_family_config(fuel_cell, cfg))


def build_portfolio(cfg=None):
    """
    Portfolio problem, theta = (w_prev, r_hat, D, Sigma^F, F).

    :param cfg: portfolio.Config or dictionary overriding the defaults
    :return:    ParametricMIQO

    """
    return portfolio.build(_family_config(portfolio, cfg))


def build_motion(cfg=None):
    """
    Motion planning problem, theta = initial position.

    :param cfg: motion.Config or dictionary overriding the defaults
    :return:    ParametricMIQO

    """
    return motion.build(_family_config(motion, cfg))


def sample_parameters(family, count, config=None, radius=None, seed=0,
                      steps=None, start=0, problem=None):
    """
    Draw parameters of a benchmark family.

    :param family:  family name
    :param count:   number of parameters
    :param config:  dictionary overriding the family defaults
    :param radius:  sampling radius [default: the family default]
    :param seed:    random seed
    :param steps:   length of the base trajectory (if the family uses one)
    :param start:   index of the first parameter
    :param problem: ParametricMIQO (avoids rebuilding it)
    :return:        list of ParameterInstance
    :raises SamplingError: if a parameter exhausts the retry budget

    """
    spec = SamplerSpec(family, config, radius=radius, seed=seed, steps=steps)
    return spec.sampler(problem=problem).sample(count, start)
