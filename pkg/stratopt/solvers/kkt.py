# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
"""
This file contains the online decoder which recovers the optimal solution of
a problem instance from a strategy by solving the KKT system of the reduced,
equality constrained problem

    [ P    A_T^T  I_I^T ] [ x  ]   [ -q    ]
    [ A_T  0      0     ] [ nu ] = [ b_T   ]
    [ I_I  0      0     ] [    ]   [ x_I^* ]

with a permuted and regularized LDL^T factorization. Factors of strategies
can be cached if the problem matrices do not depend on the parameters, in
which case decoding only needs forward/backward substitutions.

"""

from __future__ import absolute_import, division, print_function

import collections
import threading
import warnings

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import reverse_cuthill_mckee

from . import (SolverWarning, DegenerateStrategyError,
               NoFeasibleStrategyError)
from ..problems import violation

DELTA = 1e-8
REFINE_STEPS = 3
RESIDUAL_TOL = 1e-6
RECONSTRUCTION_TOL = 1e-10
EPS_INF = 1e-4

# counts of the linear algebra operations (factorizations, solves), shared by
# the decoding threads
OPERATION_COUNTS = collections.Counter()
_COUNTS_LOCK = threading.Lock()


def _count(operation):
    with _COUNTS_LOCK:
        OPERATION_COUNTS[operation] += 1


class KKTSystem(object):
    """
    KKT system of the reduced problem defined by a strategy.

    :param K:       symmetric KKT matrix (sparse)
    :param rhs:     right hand side (None if only the matrix is needed)
    :param n:       number of variables
    :param n_tight: number of tight constraints
    :param d:       number of integer variables

    """

    def __init__(self, K, rhs, n, n_tight, d):
        self.K = sp.csc_matrix(K)
        self.rhs = rhs
        self.n = n
        self.n_tight = n_tight
        self.d = d

    @property
    def dim(self):
        """Dimension q = n + |T| + d of the system."""
        return self.n + self.n_tight + self.d


def kkt_matrix(P, A, tight_set, integer_indices):
    """
    Build the KKT matrix of the reduced problem.

    :param P:               quadratic cost (n x n)
    :param A:               constraint matrix (m x n)
    :param tight_set:       indices of the tight constraints
    :param integer_indices: indices of the integer variables
    :return:                scipy.sparse.csc_matrix

    """
    P = sp.csc_matrix(P)
    n = P.shape[0]
    tight = np.asarray(tight_set, dtype=int)
    idx = np.asarray(integer_indices, dtype=int)
    if len(tight) and tight.max() >= A.shape[0]:
        raise ValueError('tight set index out of range')
    selector = sp.csr_matrix((np.ones(len(idx)), (np.arange(len(idx)), idx)),
                             shape=(len(idx), n))
    blocks = [block for block in (sp.csr_matrix(A)[tight], selector)
              if block.shape[0]]
    if not blocks:
        return P
    B = sp.vstack(blocks).tocsr()
    zero = sp.csc_matrix((B.shape[0], B.shape[0]))
    return sp.bmat([[P, B.T], [B, zero]], format='csc')


def kkt_rhs(instance, strategy):
    """
    Build the KKT right hand side (-q, b_T, x_I) of an instance.

    :param instance: InstanceData
    :param strategy: Strategy
    :return:         numpy array

    """
    tight = np.asarray(strategy.tight_set, dtype=int)
    return np.hstack((-instance.q, instance.b[tight],
                      np.asarray(strategy.integer_values, dtype=float)))


def assemble(instance, strategy):
    """
    Assemble the KKT system of an instance for the given strategy.

    :param instance: InstanceData
    :param strategy: Strategy
    :return:         KKTSystem

    """
    if len(strategy.integer_values) != len(instance.integer_indices):
        raise ValueError('strategy has %d integer values, problem %d integer '
                         'variables' % (len(strategy.integer_values),
                                        len(instance.integer_indices)))
    K = kkt_matrix(instance.P, instance.A, strategy.tight_set,
                   instance.integer_indices)
    return KKTSystem(K, kkt_rhs(instance, strategy), instance.n,
                     len(strategy.tight_set), len(strategy.integer_values))


class Factors(object):
    """
    Regularized LDL^T factors of a KKT matrix.

    The factorization reads L D L^T = Q^T (K + R) Q with the symmetric
    (bandwidth-reducing and pivoting) permutation Q, a unit lower
    triangular L, a block diagonal D (1x1 and 2x2 blocks) and the
    quasi-definite regularization R.

    :param L:        unit lower triangular factor
    :param D_banded: block diagonal factor in banded storage (3 x q)
    :param pivots:   pivoting permutation of the LDL^T factorization
    :param perm:     reverse Cuthill-McKee permutation
    :param K:        unregularized KKT matrix (used for refinement)
    :param n:        number of variables
    :param reconstruction_error: relative error of the factorization

    """

    def __init__(self, L, D_banded, pivots, perm, K, n,
                 reconstruction_error=0.):
        self.L = L
        self.D_banded = D_banded
        self.pivots = pivots
        self.perm = perm
        self.K = sp.csr_matrix(K)
        self.n = n
        self.reconstruction_error = reconstruction_error

    @property
    def dim(self):
        """Dimension of the factorized system."""
        return len(self.perm)

    def _substitute(self, rhs):
        """Forward/backward substitution with the regularized factors."""
        c = rhs[self.perm][self.pivots]
        y = scipy.linalg.solve_triangular(self.L, c, lower=True,
                                          unit_diagonal=True,
                                          check_finite=False)
        z = scipy.linalg.solve_banded((1, 1), self.D_banded, y,
                                      check_finite=False)
        w = scipy.linalg.solve_triangular(self.L, z, lower=True, trans='T',
                                          unit_diagonal=True,
                                          check_finite=False)
        u = np.empty_like(w)
        u[self.pivots] = w
        x = np.empty_like(u)
        x[self.perm] = u
        return x

    def solve(self, rhs, refine=REFINE_STEPS):
        """
        Solve the (unregularized) KKT system.

        :param rhs:    right hand side
        :param refine: number of iterative refinement steps
        :return:       tuple (solution, relative residual)

        """
        _count('solve')
        rhs = np.asarray(rhs, dtype=float)
        sol = self._substitute(rhs)
        for _ in range(refine):
            sol += self._substitute(rhs - self.K.dot(sol))
        scale = 1. + np.max(np.abs(rhs), initial=0.)
        residual = np.max(np.abs(rhs - self.K.dot(sol)), initial=0.) / scale
        return sol, residual

    def to_arrays(self, prefix=''):
        """Arrays for storing the factors in a .npz file."""
        return {prefix + 'L': self.L,
                prefix + 'D': self.D_banded,
                prefix + 'pivots': self.pivots,
                prefix + 'perm': self.perm,
                prefix + 'K_data': self.K.data,
                prefix + 'K_indices': self.K.indices,
                prefix + 'K_indptr': self.K.indptr,
                prefix + 'meta': np.array([self.n,
                                           self.reconstruction_error])}

    @classmethod
    def from_arrays(cls, data, prefix=''):
        """Create Factors from arrays written by `to_arrays`."""
        q = len(data[prefix + 'perm'])
        K = sp.csr_matrix((data[prefix + 'K_data'], data[prefix + 'K_indices'],
                           data[prefix + 'K_indptr']), shape=(q, q))
        meta = data[prefix + 'meta']
        return cls(data[prefix + 'L'], data[prefix + 'D'],
                   data[prefix + 'pivots'], data[prefix + 'perm'], K,
                   int(meta[0]), float(meta[1]))


def factorize(kkt, delta=DELTA):
    """
    Factorize a KKT system.

    :param kkt:   KKTSystem
    :param delta: quasi-definite regularization (+delta on the variable
                  block, -delta on the multiplier block)
    :return:      Factors
    :raises DegenerateStrategyError: if the regularized matrix is singular

    """
    _count('factorize')
    K = sp.csc_matrix(kkt.K)
    q = K.shape[0]
    reg = np.hstack((np.full(kkt.n, delta), np.full(q - kkt.n, -delta)))
    K_reg = K + sp.diags(reg)
    # bandwidth-reducing symmetric ordering; the factorization is dense and
    # gains no fill reduction from it
    perm = reverse_cuthill_mckee(sp.csr_matrix(K_reg), symmetric_mode=True)
    perm = np.asarray(perm, dtype=int)
    Kp = K_reg.toarray()[np.ix_(perm, perm)]
    lu, D, pivots = scipy.linalg.ldl(Kp, lower=True, hermitian=True)
    L = lu[pivots]
    # check the pivot blocks
    scale = max(1., np.max(np.abs(Kp), initial=0.))
    tiny = np.finfo(float).eps * scale * max(q, 1)
    diag, off = np.diag(D), np.diag(D, -1)
    i = 0
    while i < q:
        if i + 1 < q and off[i] != 0:
            det = diag[i] * diag[i + 1] - off[i] ** 2
            if not abs(det) > tiny * scale:
                raise DegenerateStrategyError('singular 2x2 pivot block')
            i += 2
        else:
            if not abs(diag[i]) > tiny:
                raise DegenerateStrategyError('singular pivot')
            i += 1
    D_banded = np.zeros((3, q))
    D_banded[1] = diag
    if q > 1:
        D_banded[0, 1:] = np.diag(D, 1)
        D_banded[2, :-1] = off
    error = np.linalg.norm(lu.dot(D).dot(lu.T) - Kp) / \
        max(np.linalg.norm(Kp), tiny)
    return Factors(L, D_banded, pivots, perm, K, kkt.n, error)


class FactorCache(object):
    """
    Cache of KKT factorizations, keyed by strategy hash.

    :param problem_hash:        hash of the problem the factors belong to
    :param matrices_parametric: flag whether P or A depend on the
                                parameters; such a cache stays empty

    """

    def __init__(self, problem_hash=None, matrices_parametric=False):
        self.problem_hash = problem_hash
        self.matrices_parametric = matrices_parametric
        self._factors = {}

    def __len__(self):
        return len(self._factors)

    def __contains__(self, strategy):
        return strategy.digest() in self._factors

    def get(self, strategy):
        """
        Cached factors of a strategy.

        :param strategy: Strategy
        :return:         Factors or None

        """
        return self._factors.get(strategy.digest())

    def add(self, strategy, factors):
        """
        Add the factors of a strategy.

        :param strategy: Strategy
        :param factors:  Factors

        """
        if self.matrices_parametric:
            raise ValueError('factors of parametric matrices can not be '
                             'cached')
        self._factors[strategy.digest()] = factors

    def extend(self, problem, strategies,
               reconstruction_tol=RECONSTRUCTION_TOL):
        """
        Factorize and add all strategies not cached yet.

        :param problem:            ParametricMIQO
        :param strategies:         list of Strategy
        :param reconstruction_tol: maximum relative reconstruction error of
                                   a cached factorization
        :return:                   the cache itself

        Note: Strategies which can not be factorized accurately are left out
              (with a SolverWarning) and get factorized when decoded.

        """
        if self.matrices_parametric:
            return self
        for strategy in strategies:
            if strategy in self:
                continue
            K = kkt_matrix(problem.P, problem.A, strategy.tight_set,
                           problem.integer_indices)
            kkt = KKTSystem(K, None, problem.n, len(strategy.tight_set),
                            len(strategy.integer_values))
            try:
                factors = factorize(kkt)
            except DegenerateStrategyError as e:
                warnings.warn('strategy %s not cached: %s' %
                              (strategy.digest()[:12], e), SolverWarning)
                continue
            if not factors.reconstruction_error <= reconstruction_tol:
                warnings.warn('strategy %s not cached: reconstruction error '
                              '%g' % (strategy.digest()[:12],
                                      factors.reconstruction_error),
                              SolverWarning)
                continue
            self.add(strategy, factors)
        return self

    @classmethod
    def build(cls, problem, strategies):
        """
        Build the factor cache for the given strategies.

        :param problem:    ParametricMIQO
        :param strategies: list of Strategy
        :return:           FactorCache

        """
        cache = cls(problem.problem_hash(), problem.matrices_parametric)
        return cache.extend(problem, strategies)

    def save(self, filename):
        """
        Save the cache as .npz file.

        :param filename: output file name

        """
        digests = sorted(self._factors)
        arrays = {'problem_hash': np.array(self.problem_hash or ''),
                  'matrices_parametric': np.array(self.matrices_parametric),
                  'digests': np.array(digests, dtype='U64')}
        for digest in digests:
            arrays.update(self._factors[digest].to_arrays(digest + '_'))
        np.savez(filename, **arrays)

    @classmethod
    def load(cls, filename, problem_hash=None):
        """
        Load a cache from a .npz file.

        :param filename:     input file name
        :param problem_hash: expected problem hash; on mismatch the cache
                             is invalidated and an empty cache returned
        :return:             FactorCache

        """
        with np.load(filename) as data:
            stored_hash = str(data['problem_hash']) or None
            cache = cls(stored_hash, bool(data['matrices_parametric']))
            if problem_hash is not None and stored_hash != problem_hash:
                warnings.warn('factor cache belongs to another problem, '
                              'ignoring it', SolverWarning)
                return cls(problem_hash, cache.matrices_parametric)
            for digest in data['digests']:
                digest = str(digest)
                cache._factors[digest] = Factors.from_arrays(data,
                                                             digest + '_')
        return cache


def decode(instance, strategy, cache=None, residual_tol=RESIDUAL_TOL):
    """
    Decode the solution of an instance from a strategy.

    :param instance:     InstanceData
    :param strategy:     Strategy
    :param cache:        FactorCache (bypassed for parametric matrices)
    :param residual_tol: maximum relative residual of the refined solve
    :return:             tuple (x, nu, used_cache)
    :raises DegenerateStrategyError: if the strategy can not be decoded

    """
    n = instance.n
    factors = None
    if cache is not None and not cache.matrices_parametric:
        factors = cache.get(strategy)
    used_cache = factors is not None
    rhs = kkt_rhs(instance, strategy)
    if factors is None:
        factors = factorize(assemble(instance, strategy))
    if len(rhs) != factors.dim:
        raise ValueError('strategy does not match the cached factors')
    sol, residual = factors.solve(rhs)
    if not np.all(np.isfinite(sol)) or residual > residual_tol:
        raise DegenerateStrategyError('decode failed, relative residual %g'
                                      % residual)
    return sol[:n], sol[n:], used_cache


class Candidate(object):
    """
    Decoded candidate strategy.

    :param strategy:   Strategy
    :param index:      position in the candidate list
    :param x:          decoded solution (None if decoding failed)
    :param objective:  cost (inf if decoding failed)
    :param violation:  normalized violation (inf if decoding failed)
    :param used_cache: flag whether cached factors were used

    """

    def __init__(self, strategy, index, x=None, objective=np.inf,
                 violation=np.inf, used_cache=False):
        # pylint: disable=redefined-outer-name
        self.strategy = strategy
        self.index = index
        self.x = x
        self.objective = objective
        self.violation = violation
        self.used_cache = used_cache

    @property
    def failed(self):
        """Flag whether decoding failed."""
        return self.x is None

    def rank_key(self, eps_inf=EPS_INF):
        """Feasible candidates first (by cost), then by violation."""
        if self.violation <= eps_inf:
            return 0, self.objective, self.index
        return 1, self.violation, self.index

    def __repr__(self):
        return 'Candidate(index=%d, objective=%r, violation=%r)' % \
               (self.index, self.objective, self.violation)


def _evaluate(args):
    """Decode a single candidate (top-level to be usable with map)."""
    instance, strategy, index, cache = args
    try:
        x, _, used_cache = decode(instance, strategy, cache)
    except DegenerateStrategyError:
        return Candidate(strategy, index)
    return Candidate(strategy, index, x, instance.objective(x),
                     violation(instance, x), used_cache)


def evaluate_candidates(instance, candidates, cache=None, eps_inf=EPS_INF,
                        num_threads=1):
    """
    Decode all candidate strategies and rank them.

    :param instance:    InstanceData
    :param candidates:  list of Strategy
    :param cache:       FactorCache
    :param eps_inf:     feasibility tolerance
    :param num_threads: number of parallel threads
    :return:            list of Candidate, best first
    :raises NoFeasibleStrategyError: if no candidate could be decoded

    """
    if not len(candidates):
        raise ValueError('at least one candidate strategy must be given')
    tasks = [(instance, s, i, cache) for i, s in enumerate(candidates)]
    if num_threads is not None and num_threads > 1 and len(tasks) > 1:
        from multiprocessing.pool import ThreadPool
        pool = ThreadPool(num_threads)
        try:
            results = pool.map(_evaluate, tasks)
        finally:
            pool.close()
    else:
        results = [_evaluate(task) for task in tasks]
    ranked = sorted(results, key=lambda c: c.rank_key(eps_inf))
    if all(c.failed for c in ranked):
        raise NoFeasibleStrategyError(ranked)
    return ranked
