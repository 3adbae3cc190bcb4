# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
"""
This package contains the strategy bank, i.e. the collection of distinct
strategies observed when solving sampled problem instances, together with
the Good-Turing based exploration which decides when enough samples have
been seen.

"""

from __future__ import absolute_import, division, print_function

import sys
import warnings
from collections import Counter

import numpy as np

from ..problems import (ParameterInstance, Strategy, extract_strategy,
                        NonIntegralSolutionError)
from ..processors import Processor, ParallelProcessor
from ..solvers import SolverError
from ..solvers.bnb import solve_miqo, MAX_NODES
from ..utils import content_hash, read_json, write_json

# constant of the Good-Turing bound
GOOD_TURING_C = 2. * np.sqrt(2.) + np.sqrt(3.)

CONVERGED = 'converged'
MAX_SAMPLES = 'max_samples'
MAX_FAILURES = 'max_failures'


class StrategyWarning(UserWarning):
    """
    Warning issued for skipped samples and strategy related problems.

    """
    pass


class Sample(object):
    """
    Solved parameter sample.

    :param theta:     ParameterInstance
    :param strategy:  optimal Strategy
    :param objective: optimal cost
    :param x:         optimal solution
    :param nodes:     number of branch-and-bound nodes
    :param time:      solve time [seconds]

    """

    def __init__(self, theta, strategy, objective, x=None, nodes=0,
                 time=None):
        # pylint: disable=redefined-outer-name
        if not isinstance(theta, ParameterInstance):
            theta = ParameterInstance(theta)
        self.theta = theta
        self.strategy = strategy
        self.objective = objective
        self.x = x
        self.nodes = nodes
        self.time = time

    @property
    def id(self):
        """Identifier of the sample."""
        return self.theta.id

    def to_dict(self):
        """Dictionary representation (without the solution)."""
        return {'id': self.theta.id, 'theta': self.theta.theta.tolist(),
                'objective': self.objective,
                'strategy': self.strategy.to_dict()}

    @classmethod
    def from_dict(cls, data):
        """Create a Sample from its dictionary representation."""
        return cls(ParameterInstance(data['theta'], data.get('id')),
                   Strategy.from_dict(data['strategy']), data['objective'])


class SampleSolver(Processor):
    """
    Solve a sampled parameter with the exact oracle and extract its strategy.

    :param problem:   ParametricMIQO
    :param max_nodes: node limit of the branch-and-bound oracle

    Note: Failures are returned (not raised) as SolverError instances, so the
          processor can be mapped over many samples.

    """

    def __init__(self, problem, max_nodes=MAX_NODES):
        self.problem = problem
        self.max_nodes = max_nodes

    def process(self, theta):
        """
        Solve the instance of the given parameter.

        :param theta: ParameterInstance
        :return:      Sample or SolverError

        """
        instance = self.problem.instantiate(theta)
        try:
            result = solve_miqo(instance, max_nodes=self.max_nodes)
            strategy = extract_strategy(instance, result.x)
        except NonIntegralSolutionError as e:
            return SolverError(str(e))
        except SolverError as e:
            return e
        return Sample(theta, strategy, result.objective, result.x,
                      result.nodes, result.time)


class StrategyBank(object):
    """
    Bank of distinct strategies with the per-sample strategy labels.

    Labels are the positions of the strategies in the bank, i.e. strategies
    are numbered in the order they were first seen.

    :param strategies:   list of distinct Strategy objects
    :param labels:       per-sample labels
    :param problem_hash: hash of the problem the strategies belong to
    :param trace:        exploration trace, list of (N, N_1, bound)
    :param info:         dictionary with additional information

    """

    def __init__(self, strategies=(), labels=(), problem_hash=None,
                 trace=None, info=None):
        self.strategies = []
        self._index = {}
        for strategy in strategies:
            if strategy in self._index:
                raise ValueError('strategies must be distinct')
            self._index[strategy] = len(self.strategies)
            self.strategies.append(strategy)
        self.labels = [int(l) for l in labels]
        if self.labels and max(self.labels) >= len(self.strategies):
            raise ValueError('labels must be smaller than the number of '
                             'strategies')
        self.problem_hash = problem_hash
        self.trace = list(trace or [])
        self.info = dict(info or {})

    def __len__(self):
        return len(self.strategies)

    def __getitem__(self, label):
        return self.strategies[label]

    def __iter__(self):
        return iter(self.strategies)

    def __contains__(self, strategy):
        return strategy in self._index

    def index(self, strategy):
        """
        Label of the given strategy.

        :param strategy: Strategy
        :return:         label
        :raises KeyError: if the strategy is not in the bank

        """
        return self._index[strategy]

    def add(self, strategy):
        """
        Add a strategy to the bank (if not present yet).

        :param strategy: Strategy
        :return:         label of the strategy

        """
        if strategy not in self._index:
            self._index[strategy] = len(self.strategies)
            self.strategies.append(strategy)
        return self._index[strategy]

    def assign(self, strategy):
        """
        Add a strategy and record it as label of a new sample.

        :param strategy: Strategy
        :return:         label of the strategy

        """
        label = self.add(strategy)
        self.labels.append(label)
        return label

    @property
    def counts(self):
        """Number of samples per strategy."""
        return np.bincount(np.asarray(self.labels, dtype=int),
                           minlength=len(self.strategies))

    @property
    def num_singletons(self):
        """Number of strategies assigned to exactly one sample."""
        return int(np.sum(self.counts == 1))

    def subset(self, selected, labels):
        """
        Create a new bank with the selected strategies only.

        :param selected: labels of the strategies to keep (in this order)
        :param labels:   per-sample labels referring to positions in
                         `selected`
        :return:         StrategyBank

        """
        return StrategyBank([self.strategies[l] for l in selected], labels,
                            self.problem_hash, self.trace, self.info)

    def to_dict(self):
        """Dictionary representation."""
        return {'problem_hash': self.problem_hash,
                'strategies': [s.to_dict() for s in self.strategies],
                'labels': self.labels,
                'trace': [list(t) for t in self.trace],
                'info': self.info}

    @classmethod
    def from_dict(cls, data):
        """Create a StrategyBank from its dictionary representation."""
        return cls([Strategy.from_dict(s) for s in data['strategies']],
                   data.get('labels', []), data.get('problem_hash'),
                   [tuple(t) for t in data.get('trace', [])],
                   data.get('info'))

    def bank_hash(self):
        """
        Content hash of the bank.

        :return: hexadecimal sha256 digest

        """
        return content_hash(self.to_dict())

    def save(self, filename):
        """
        Save the bank as JSON file.

        :param filename: output file name

        """
        write_json(self.to_dict(), filename)

    @classmethod
    def load(cls, filename):
        """
        Load a bank from a JSON file.

        :param filename: input file name
        :return:         StrategyBank

        """
        return cls.from_dict(read_json(filename))


class ExplorationState(object):
    """
    Good-Turing statistics of the strategy exploration.

    :param eps:  target bound on the probability of an unseen strategy
    :param beta: confidence parameter

    """
    C = GOOD_TURING_C

    def __init__(self, eps, beta):
        if not eps > 0:
            raise ValueError('eps must be positive')
        if not 0 < beta < 1:
            raise ValueError('beta must be in (0, 1)')
        self.eps = eps
        self.beta = beta
        self.N = 0
        self.N1 = 0
        self.trace = []

    @property
    def G(self):
        """Good-Turing estimator N_1 / N."""
        return self.N1 / self.N if self.N else 1.

    @property
    def bound(self):
        """Bound G + c sqrt(ln(3 / beta) / N) on the unseen probability."""
        if not self.N:
            return np.inf
        return self.G + self.C * np.sqrt(np.log(3. / self.beta) / self.N)

    @property
    def converged(self):
        """Flag whether the bound is below eps."""
        return self.bound <= self.eps

    def update(self, count):
        """
        Update the statistics with a new sample.

        :param count: number of samples of the sample's strategy, including
                      the new one
        :return:      current bound

        """
        self.N += 1
        if count == 1:
            self.N1 += 1
        elif count == 2:
            self.N1 -= 1
        bound = self.bound
        self.trace.append((self.N, self.N1, bound))
        return bound


def explore(problem, sampler, eps, beta, max_n, solver=None, num_threads=1,
            verbose=False):
    """
    Sample parameters and collect their strategies until the Good-Turing
    bound on the probability of finding a new strategy falls below eps.

    :param problem:     ParametricMIQO
    :param sampler:     callable returning the ParameterInstance for a
                        sample index
    :param eps:         target bound
    :param beta:        confidence parameter
    :param max_n:       maximum number of (successfully solved) samples
    :param solver:      callable mapping a ParameterInstance to a Sample or a
                        SolverError [default: SampleSolver(problem)]
    :param num_threads: number of parallel processes used for solving
    :param verbose:     print progress information
    :return:            tuple (list of Sample, StrategyBank, stop reason)

    Note: Samples are drawn by index and processed in index order, hence
          the result does not depend on the number of threads. Samples the
          oracle fails on are skipped and not counted.

    """
    state = ExplorationState(eps, beta)
    if solver is None:
        solver = SampleSolver(problem)
    mapper = ParallelProcessor(solver, num_threads)
    problem_hash = None if problem is None else problem.problem_hash()
    bank = StrategyBank(problem_hash=problem_hash)
    samples = []
    counts = Counter()
    failures = 0
    index = 0
    batch = max(1, mapper.num_threads) * 4
    reason = None
    while reason is None:
        thetas = [sampler(i) for i in range(index, index + batch)]
        index += batch
        for theta, result in zip(thetas, mapper(thetas)):
            if isinstance(result, Exception):
                failures += 1
                warnings.warn('skipping sample %s: %s' % (theta.id, result),
                              StrategyWarning)
                if failures >= max_n:
                    reason = MAX_FAILURES
                    break
                continue
            label = bank.assign(result.strategy)
            samples.append(result)
            counts[label] += 1
            state.update(counts[label])
            if state.converged:
                reason = CONVERGED
            elif state.N >= max_n:
                reason = MAX_SAMPLES
            if reason is not None:
                break
        if verbose:
            print('explore: N=%d M=%d G=%.4f bound=%.4f' %
                  (state.N, len(bank), state.G, state.bound), file=sys.stderr)
    bank.trace = state.trace
    bank.info['stop_reason'] = reason
    bank.info['failures'] = failures
    return samples, bank, reason


# import the submodules
from . import pruning
from .pruning import select_frequent, prune, prune_exact_milo
