# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
"""
This file contains the strategy pruning functionality, which reduces the
number of strategies (i.e. classes of the classifier) by reassigning samples
of rare strategies to frequent ones, as long as the cost degradation stays
within a relative tolerance.

"""

from __future__ import absolute_import, division, print_function

import sys

import numpy as np

from ..problems import InstanceData, violation
from ..solvers import DegenerateStrategyError, InfeasibleError
from ..solvers.bnb import solve_miqo
from ..solvers.kkt import FactorCache, decode, EPS_INF

ALPHA = 0.05
MAX_IT = 10
MAX_BINARIES = 5000


class PruningError(Exception):
    """
    Exception raised if no feasible pruning exists at the given tolerance.

    The `value` holds the last fraction of discarded samples (alpha).

    """
    def __init__(self, value):
        super(PruningError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


def select_frequent(labels, alpha):
    """
    Select the most frequent strategies assigned to at least a 1 - alpha
    fraction of the samples.

    :param labels: per-sample strategy labels
    :param alpha:  fraction of samples which may be discarded
    :return:       list of selected labels (decreasing occurrence)

    Note: Ties in the occurrence are broken by the label, i.e. the order in
          which the strategies were first seen.

    """
    if not 0 < alpha < 1:
        raise ValueError('alpha must be in (0, 1)')
    labels = np.asarray(labels, dtype=int)
    if not len(labels):
        return []
    counts = np.bincount(labels)
    threshold = np.ceil((1. - alpha) * len(labels))
    selected = []
    covered = 0
    for label in np.argsort(-counts, kind='mergesort'):
        if counts[label] == 0:
            break
        covered += counts[label]
        selected.append(int(label))
        if covered > threshold:
            break
    return selected


def tolerance(f_star, eps):
    """
    Maximum admissible reassigned cost f* + eps |f*|.

    :param f_star: optimal costs
    :param eps:    relative tolerance (inf disables the tolerance)
    :return:       numpy array

    """
    f_star = np.asarray(f_star, dtype=float)
    if np.isinf(eps):
        return np.full_like(f_star, np.inf)
    return f_star + eps * np.abs(f_star)


def reassignment_costs(problem, samples, strategies, cache=None,
                       eps_inf=EPS_INF, num_threads=1):
    """
    Cost of every sample under every strategy.

    :param problem:     ParametricMIQO
    :param samples:     list of Sample
    :param strategies:  list of Strategy
    :param cache:       FactorCache
    :param eps_inf:     feasibility tolerance
    :param num_threads: number of parallel threads
    :return:            cost matrix F (samples x strategies), inf for
                        infeasible or failed decodes

    """
    def costs(sample):
        instance = problem.instantiate(sample.theta)
        row = np.full(len(strategies), np.inf)
        for j, strategy in enumerate(strategies):
            try:
                x, _, _ = decode(instance, strategy, cache)
            except DegenerateStrategyError:
                continue
            if violation(instance, x) <= eps_inf:
                row[j] = instance.objective(x)
        return row

    if num_threads is not None and num_threads > 1 and len(samples) > 1:
        from multiprocessing.pool import ThreadPool
        pool = ThreadPool(num_threads)
        try:
            rows = pool.map(costs, samples)
        finally:
            pool.close()
    else:
        rows = [costs(sample) for sample in samples]
    return np.array(rows).reshape(len(samples), len(strategies))


class PruneState(object):
    """
    State of the strategy pruning.

    :param alpha: fraction of samples which may be discarded
    :param eps:   relative cost tolerance

    """

    def __init__(self, alpha=ALPHA, eps=1e-3):
        self.alpha = alpha
        self.eps = eps
        self.iterations = 0
        self.selected = []
        self.discarded = []
        self.costs = None
        self.reassigned = None

    def to_dict(self):
        """Summary of the pruning."""
        return {'alpha': self.alpha, 'eps': self.eps,
                'iterations': self.iterations,
                'num_selected': len(self.selected),
                'num_discarded': len(self.discarded)}


def prune(problem, samples, bank, eps=1e-3, max_it=MAX_IT, alpha=ALPHA,
          cache=None, eps_inf=EPS_INF, num_threads=1, verbose=False):
    """
    Prune the strategies while keeping feasibility and a low suboptimality.

    :param problem:     ParametricMIQO
    :param samples:     list of Sample (with their optimal cost)
    :param bank:        StrategyBank with the sample labels
    :param eps:         relative cost tolerance (inf disables it)
    :param max_it:      maximum number of iterations
    :param alpha:       initial fraction of discarded samples, halved in
                        every iteration
    :param cache:       FactorCache, extended with the selected strategies
    :param eps_inf:     feasibility tolerance
    :param num_threads: number of parallel threads
    :param verbose:     print progress information
    :return:            tuple (pruned StrategyBank, reassigned labels)
    :raises PruningError: if max_it iterations are exhausted

    Note: Only discarded samples are reassigned, and all of them must satisfy
          the tolerance before the pruning is accepted.

    """
    labels = np.asarray(bank.labels, dtype=int)
    if len(labels) != len(samples):
        raise ValueError('number of samples and labels differ')
    f_star = np.array([s.objective for s in samples], dtype=float)
    if cache is None:
        cache = FactorCache(problem.problem_hash(),
                            problem.matrices_parametric)
    state = PruneState(alpha, eps)
    for it in range(max_it):
        state.iterations = it + 1
        selected = select_frequent(labels, state.alpha)
        position = dict((label, k) for k, label in enumerate(selected))
        discarded = [i for i, l in enumerate(labels) if l not in position]
        strategies = [bank[l] for l in selected]
        cache.extend(problem, strategies)
        F = reassignment_costs(problem, [samples[i] for i in discarded],
                               strategies, cache, eps_inf, num_threads)
        reassigned = F.min(axis=1) if F.size else np.full(len(discarded),
                                                           np.inf)
        state.selected, state.discarded = selected, discarded
        state.costs, state.reassigned = F, reassigned
        if verbose:
            print('prune: alpha=%g selected=%d discarded=%d' %
                  (state.alpha, len(selected), len(discarded)),
                  file=sys.stderr)
        if np.all(reassigned <= tolerance(f_star[discarded], eps)):
            new_labels = np.array([position.get(l, -1) for l in labels])
            if discarded:
                best = np.argmin(F, axis=1) if F.size else \
                    np.zeros(len(discarded), dtype=int)
                new_labels[discarded] = best
            pruned = bank.subset(selected, new_labels.tolist())
            pruned.info['prune'] = state.to_dict()
            pruned.info['num_unpruned'] = len(bank)
            return pruned, new_labels
        state.alpha /= 2.
    raise PruningError(state.alpha)


def prune_exact_milo(F, f_star, eps):
    """
    Select the minimum number of strategies by solving the pruning MILO

        minimize    sum_j p_j
        subject to  sum_j F_ij z_ij <= f*_i + eps |f*_i|
                    sum_j z_ij = 1
                    z_ij <= p_j
                    z_ij, p_j binary

    with the branch-and-bound oracle.

    :param F:      cost matrix (samples x strategies), inf if infeasible
    :param f_star: optimal costs of the samples
    :param eps:    relative cost tolerance
    :return:       tuple (selection flags p, assignment matrix z)
    :raises PruningError: if the MILO is infeasible

    """
    F = np.asarray(F, dtype=float)
    N, M = F.shape
    if N * M > MAX_BINARIES:
        raise ValueError('%d binaries exceed the limit of %d' %
                         (N * M, MAX_BINARIES))
    pairs = np.argwhere(np.isfinite(F))
    finite_rows = set(pairs[:, 0].tolist())
    if len(finite_rows) < N:
        raise PruningError('samples without any feasible strategy')
    nz = len(pairs)
    nv = nz + M
    tol = tolerance(f_star, eps)
    rows, rhs = [], []
    for i in range(N):
        k = np.nonzero(pairs[:, 0] == i)[0]
        if np.isfinite(tol[i]):
            row = np.zeros(nv)
            row[k] = F[i, pairs[k, 1]]
            rows.append(row)
            rhs.append(tol[i])
        row = np.zeros(nv)
        row[k] = 1.
        rows.extend([row, -row])
        rhs.extend([1., -1.])
    for k, (_, j) in enumerate(pairs):
        row = np.zeros(nv)
        row[k] = 1.
        row[nz + j] = -1.
        rows.append(row)
        rhs.append(0.)
    eye = np.eye(nv)
    A = np.vstack(rows + [eye, -eye])
    b = np.hstack(rhs + [np.ones(nv), np.zeros(nv)])
    q = np.hstack((np.zeros(nz), np.ones(M)))
    instance = InstanceData(np.zeros((nv, nv)), q, 0., A, b, np.arange(nv))
    try:
        result = solve_miqo(instance)
    except InfeasibleError:
        raise PruningError('no feasible pruning at tolerance %g' % eps)
    x = np.round(result.x).astype(int)
    z = np.zeros((N, M), dtype=int)
    z[pairs[:, 0], pairs[:, 1]] = x[:nz]
    return x[nz:], z
