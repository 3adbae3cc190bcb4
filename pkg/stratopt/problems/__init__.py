# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
"""
This package contains the parametric mixed-integer quadratic problem
definition shared by all other packages.

A problem is given in the standard form

    minimize    1/2 x^T P x + q^T x + r
    subject to  A x <= b
                x_I integer

where the data (P, q, r, A, b) depends affinely on a parameter vector theta.
Equality constraints are expressed as pairs of opposite inequality rows.

"""

from __future__ import absolute_import, division, print_function

import json

import numpy as np
import scipy.sparse as sp

from ..utils import content_hash, write_json

FORMAT = 'pmiqo-v1'
PSD_TOL = 1e-8


class ProblemFormatError(Exception):
    """
    Exception raised for invalid problem definitions or problem files.

    """
    def __init__(self, value):
        super(ProblemFormatError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


class NonIntegralSolutionError(Exception):
    """
    Exception raised if a solution has integer components which are not
    integral within the tolerance.

    """
    def __init__(self, value):
        super(NonIntegralSolutionError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


# sparse helpers
def triplets_to_sparse(block, shape):
    """
    Create a sparse matrix from a coordinate-triplet dictionary.

    :param block: dictionary with 'rows', 'cols' and 'vals' lists
    :param shape: shape of the matrix
    :return:      scipy.sparse.csr_matrix

    """
    try:
        rows = np.asarray(block.get('rows', []), dtype=int)
        cols = np.asarray(block.get('cols', []), dtype=int)
        vals = np.asarray(block.get('vals', []), dtype=float)
    except (AttributeError, TypeError, ValueError):
        raise ProblemFormatError('sparse blocks must be {rows, cols, vals}')
    if not len(rows) == len(cols) == len(vals):
        raise ProblemFormatError('sparse block lengths differ')
    if len(rows) and (rows.min() < 0 or rows.max() >= shape[0] or
                      cols.min() < 0 or cols.max() >= shape[1]):
        raise ProblemFormatError('sparse block index out of bounds for '
                                 'shape %s' % (shape, ))
    return sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()


def sparse_to_triplets(matrix):
    """
    Convert a (sparse) matrix to a coordinate-triplet dictionary.

    :param matrix: matrix
    :return:       dictionary with 'rows', 'cols' and 'vals' lists

    """
    coo = sp.coo_matrix(matrix)
    coo.sum_duplicates()
    # canonical order
    order = np.lexsort((coo.col, coo.row))
    return {'rows': coo.row[order].tolist(),
            'cols': coo.col[order].tolist(),
            'vals': coo.data[order].tolist()}


def symmetrize_upper(upper):
    """
    Build a full symmetric matrix from its stored upper triangle.

    :param upper: sparse matrix holding (at least) the upper triangle
    :return:      symmetric scipy.sparse.csc_matrix

    """
    upper = sp.triu(upper, format='csc')
    return (upper + upper.T - sp.diags(upper.diagonal())).tocsc()


def _as_sparse(matrix, shape, fmt):
    """
    Convert to the given sparse format, an all-zero matrix if None.

    """
    if matrix is None:
        return fmt(shape)
    matrix = fmt(matrix)
    if matrix.shape != tuple(shape):
        raise ProblemFormatError('matrix has shape %s, expected %s' %
                                 (matrix.shape, tuple(shape)))
    return matrix


def _finite(matrix):
    """Flag whether all stored entries of a (sparse) matrix are finite."""
    data = matrix.data if sp.issparse(matrix) else np.asarray(matrix)
    return bool(np.all(np.isfinite(data)))


class InstanceData(object):
    """
    Concrete problem data for a single parameter value.

    :param P:               quadratic cost (n x n, symmetric PSD)
    :param q:               linear cost (n)
    :param r:               constant cost
    :param A:               constraint matrix (m x n)
    :param b:               right hand side (m)
    :param integer_indices: indices of the integer variables

    """

    def __init__(self, P, q, r, A, b, integer_indices=()):
        self.P = sp.csc_matrix(P)
        self.q = np.asarray(q, dtype=float)
        self.r = float(r)
        self.A = sp.csr_matrix(A)
        self.b = np.asarray(b, dtype=float)
        self.integer_indices = np.asarray(integer_indices, dtype=int)

    @property
    def n(self):
        """Number of variables."""
        return len(self.q)

    @property
    def m(self):
        """Number of inequality constraints."""
        return len(self.b)

    def objective(self, x):
        """
        Evaluate the cost function.

        :param x: variables
        :return:  1/2 x^T P x + q^T x + r

        """
        x = np.asarray(x, dtype=float)
        return float(.5 * x.dot(self.P.dot(x)) + self.q.dot(x) + self.r)


class ParameterInstance(object):
    """
    A parameter vector with an optional identifier.

    :param theta: parameter vector
    :param id:    identifier (e.g. sample index)

    """
    # pylint: disable=redefined-builtin

    def __init__(self, theta, id=None):
        theta = np.array(theta, dtype=float).ravel()
        if not np.all(np.isfinite(theta)):
            raise ValueError('parameter vector must be finite')
        theta.flags.writeable = False
        self.theta = theta
        self.id = id

    def __len__(self):
        return len(self.theta)

    def __repr__(self):
        return 'ParameterInstance(id=%r, theta=%s)' % (self.id, self.theta)


class Strategy(object):
    """
    Strategy, i.e. the set of tight constraints and the integer assignment at
    the optimum.

    :param tight_set:      indices of the tight constraints (any order)
    :param integer_values: values of the integer variables

    """

    def __init__(self, tight_set=(), integer_values=()):
        tight = np.unique(np.asarray(tight_set, dtype=int))
        if len(tight) and tight[0] < 0:
            raise ValueError('tight set indices must be non-negative')
        values = np.asarray(integer_values, dtype=float).ravel()
        if not np.all(values == np.round(values)):
            raise ValueError('integer values must be integral')
        self.tight_set = tuple(int(i) for i in tight)
        self.integer_values = tuple(int(v) for v in values)

    @property
    def key(self):
        """Canonical tuple identifying the strategy."""
        return self.tight_set, self.integer_values

    def digest(self):
        """
        Canonical hash of the strategy.

        :return: hexadecimal sha256 digest over tight set and integer values

        """
        return content_hash([list(self.tight_set), list(self.integer_values)])

    def __eq__(self, other):
        if not isinstance(other, Strategy):
            return NotImplemented
        return self.key == other.key

    def __ne__(self, other):
        result = self.__eq__(other)
        if result is NotImplemented:
            return result
        return not result

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return 'Strategy(tight_set=%s, integer_values=%s)' % \
               (list(self.tight_set), list(self.integer_values))

    def to_dict(self):
        """Dictionary representation."""
        return {'tight_set': list(self.tight_set),
                'integer_values': list(self.integer_values)}

    @classmethod
    def from_dict(cls, data):
        """Create a Strategy from its dictionary representation."""
        return cls(data['tight_set'], data['integer_values'])


class ParametricMIQO(object):
    """
    Parametric mixed-integer quadratic optimization problem.

    :param P:               base quadratic cost (n x n, symmetric)
    :param q:               base linear cost (n)
    :param r:               base constant cost
    :param A:               base constraint matrix (m x n)
    :param b:               base right hand side (m)
    :param integer_indices: indices of the integer variables
    :param p_dim:           dimension of the parameter vector
    :param q_map:           linear cost map (n x p), q(theta) = q + Q theta
    :param b_map:           right hand side map (m x p), b(theta) = b + B theta
    :param r_map:           constant cost map (p), r(theta) = r + c^T theta
    :param P_maps:          list of (k, P_k) tuples, P(theta) = P + sum
                            theta_k P_k (P_k symmetric)
    :param A_maps:          list of (k, A_k) tuples, A(theta) = A + sum
                            theta_k A_k
    :param name:            optional name of the problem

    Note: All parameter maps are affine in theta. The quadratic cost and the
          constraint matrix are called parametric if any P_k or A_k is given;
          in this case factorizations of the KKT matrices can not be cached.

    """

    def __init__(self, P, q, r, A, b, integer_indices=(), p_dim=0,
                 q_map=None, b_map=None, r_map=None, P_maps=None,
                 A_maps=None, name=None):
        self.q = np.asarray(q, dtype=float).ravel()
        n = len(self.q)
        self.b = np.asarray(b, dtype=float).ravel()
        m = len(self.b)
        self.P = _as_sparse(P, (n, n), sp.csc_matrix)
        self.r = float(r)
        self.A = _as_sparse(A, (m, n), sp.csr_matrix)
        self.integer_indices = np.asarray(integer_indices, dtype=int).ravel()
        self.p_dim = int(p_dim)
        p = self.p_dim
        self.q_map = _as_sparse(q_map, (n, p), sp.csr_matrix)
        self.b_map = _as_sparse(b_map, (m, p), sp.csr_matrix)
        self.r_map = np.zeros(p) if r_map is None else \
            np.asarray(r_map, dtype=float).ravel()
        self.P_maps = [(int(k), _as_sparse(Pk, (n, n), sp.csc_matrix))
                       for k, Pk in (P_maps or [])]
        self.A_maps = [(int(k), _as_sparse(Ak, (m, n), sp.csr_matrix))
                       for k, Ak in (A_maps or [])]
        self.name = name
        self.check()

    @property
    def n(self):
        """Number of variables."""
        return len(self.q)

    @property
    def m(self):
        """Number of inequality constraints."""
        return len(self.b)

    @property
    def d(self):
        """Number of integer variables."""
        return len(self.integer_indices)

    @property
    def matrices_parametric(self):
        """Flag whether P or A depend on the parameters."""
        return bool(self.P_maps or self.A_maps)

    def check(self):
        """
        Check the structural invariants of the problem.

        :raises ProblemFormatError: if any invariant is violated

        """
        n, m, p = self.n, self.m, self.p_dim
        idx = self.integer_indices
        if len(idx) and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or
                         idx[-1] >= n):
            raise ProblemFormatError('integer indices must be sorted, unique '
                                     'and within [0, %d)' % n)
        if self.q_map.shape != (n, p) or self.b_map.shape != (m, p):
            raise ProblemFormatError('parameter map dimensions do not match')
        if len(self.r_map) != p:
            raise ProblemFormatError('constant cost map must have length %d'
                                     % p)
        for k, Pk in self.P_maps:
            if not 0 <= k < p:
                raise ProblemFormatError('parameter index %d out of range' % k)
            if Pk.nnz and abs(Pk - Pk.T).max() > 1e-12:
                raise ProblemFormatError('quadratic cost maps must be '
                                         'symmetric')
        for k, _ in self.A_maps:
            if not 0 <= k < p:
                raise ProblemFormatError('parameter index %d out of range' % k)
        if self.P.nnz and abs(self.P - self.P.T).max() > 1e-12:
            raise ProblemFormatError('quadratic cost must be symmetric')

    def validate(self, theta=None):
        """
        Validate the instantiated data for the given parameter.

        :param theta: parameter vector [default: zero vector]
        :return:      instantiated data
        :raises ProblemFormatError: if P is not positive semidefinite

        """
        if theta is None:
            theta = np.zeros(self.p_dim)
        instance = self.instantiate(theta)
        if instance.n:
            min_eig = np.linalg.eigvalsh(instance.P.toarray()).min()
            if min_eig < -PSD_TOL:
                raise ProblemFormatError('quadratic cost not positive '
                                         'semidefinite (min eigenvalue %g)'
                                         % min_eig)
        return instance

    def instantiate(self, theta):
        """
        Instantiate the problem data for a given parameter.

        :param theta: parameter vector or ParameterInstance
        :return:      InstanceData

        """
        if isinstance(theta, ParameterInstance):
            theta = theta.theta
        theta = np.asarray(theta, dtype=float).ravel()
        if len(theta) != self.p_dim:
            raise ValueError('parameter must have length %d, not %d' %
                             (self.p_dim, len(theta)))
        q = self.q + self.q_map.dot(theta)
        b = self.b + self.b_map.dot(theta)
        r = self.r + self.r_map.dot(theta)
        P = self.P
        if self.P_maps:
            P = P + sum(theta[k] * Pk for k, Pk in self.P_maps)
        A = self.A
        if self.A_maps:
            A = A + sum(theta[k] * Ak for k, Ak in self.A_maps)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(b)) and
                np.isfinite(r) and _finite(P) and _finite(A)):
            raise ValueError('instantiated data is not finite')
        return InstanceData(P, q, r, A, b, self.integer_indices)

    def objective(self, instance, x):
        """
        Evaluate the cost of the given instance.

        :param instance: InstanceData
        :param x:        variables
        :return:         cost

        """
        return instance.objective(x)

    # serialisation
    def to_dict(self):
        """
        Dictionary representation following the pmiqo-v1 file format.

        Symmetric matrices store their upper triangle only.

        """
        param_map = {'type': 'affine',
                     'q': sparse_to_triplets(self.q_map),
                     'b': sparse_to_triplets(self.b_map),
                     'r': self.r_map.tolist()}
        if self.P_maps:
            param_map['P'] = [dict(param=k, **sparse_to_triplets(sp.triu(Pk)))
                              for k, Pk in self.P_maps]
        if self.A_maps:
            param_map['A'] = [dict(param=k, **sparse_to_triplets(Ak))
                              for k, Ak in self.A_maps]
        return {'format': FORMAT,
                'name': self.name,
                'n': self.n, 'm': self.m, 'd': self.d, 'p_dim': self.p_dim,
                'P': sparse_to_triplets(sp.triu(self.P)),
                'q': self.q.tolist(),
                'r': self.r,
                'A': sparse_to_triplets(self.A),
                'b': self.b.tolist(),
                'integer_indices': self.integer_indices.tolist(),
                'param_map': param_map}

    @classmethod
    def from_dict(cls, data):
        """
        Create a ParametricMIQO from its pmiqo-v1 dictionary representation.

        :param data: dictionary
        :return:     ParametricMIQO instance
        :raises ProblemFormatError: for invalid or non-affine definitions

        """
        if data.get('format') != FORMAT:
            raise ProblemFormatError('unsupported problem format %r' %
                                     data.get('format'))
        try:
            n, m, p = int(data['n']), int(data['m']), int(data['p_dim'])
            q = np.asarray(data['q'], dtype=float)
            b = np.asarray(data['b'], dtype=float)
        except (KeyError, TypeError, ValueError) as e:
            raise ProblemFormatError('invalid problem file: %s' % e)
        if len(q) != n or len(b) != m:
            raise ProblemFormatError('vector dimensions do not match n, m')
        integer_indices = data.get('integer_indices', [])
        if 'd' in data and int(data['d']) != len(integer_indices):
            raise ProblemFormatError('d does not match the integer indices')
        param_map = data.get('param_map', {}) or {}
        if param_map.get('type', 'affine') != 'affine':
            raise ProblemFormatError('only affine parameter maps are '
                                     'supported, got %r' % param_map['type'])
        unknown = set(param_map) - {'type', 'q', 'b', 'r', 'P', 'A'}
        if unknown:
            raise ProblemFormatError('unknown parameter map entries: %s' %
                                     sorted(unknown))

        def tensor(entries, shape, symmetric=False):
            maps = []
            for entry in entries:
                matrix = triplets_to_sparse(entry, shape)
                if symmetric:
                    matrix = symmetrize_upper(matrix)
                maps.append((int(entry['param']), matrix))
            return maps

        return cls(P=symmetrize_upper(triplets_to_sparse(data.get('P', {}),
                                                         (n, n))),
                   q=q, r=data.get('r', 0.),
                   A=triplets_to_sparse(data.get('A', {}), (m, n)), b=b,
                   integer_indices=integer_indices, p_dim=p,
                   q_map=triplets_to_sparse(param_map.get('q', {}), (n, p)),
                   b_map=triplets_to_sparse(param_map.get('b', {}), (m, p)),
                   r_map=param_map.get('r'),
                   P_maps=tensor(param_map.get('P', []), (n, n), True),
                   A_maps=tensor(param_map.get('A', []), (m, n)),
                   name=data.get('name'))

    def problem_hash(self):
        """
        Content hash of the problem.

        :return: hexadecimal sha256 digest of the canonical JSON document

        """
        return content_hash(self.to_dict())

    def save(self, filename):
        """
        Save the problem as a pmiqo-v1 JSON file.

        :param filename: output file name

        """
        write_json(self.to_dict(), filename)

    @classmethod
    def load(cls, filename):
        """
        Load a problem from a pmiqo-v1 JSON file.

        :param filename: input file name
        :return:         ParametricMIQO instance

        """
        with open(filename, 'r') as f:
            try:
                data = json.load(f)
            except ValueError as e:
                raise ProblemFormatError('invalid JSON: %s' % e)
        return cls.from_dict(data)


# functional interface
def instantiate(problem, theta):
    """
    Instantiate the problem data for a given parameter.

    :param problem: ParametricMIQO
    :param theta:   parameter vector or ParameterInstance
    :return:        InstanceData

    """
    return problem.instantiate(theta)


def violation(instance, x):
    """
    Normalized constraint violation.

    :param instance: InstanceData
    :param x:        variables
    :return:         ||(Ax - b)_+||_inf / max(||b||_inf, 1)

    """
    if instance.m == 0:
        return 0.
    x = np.asarray(x, dtype=float)
    residual = instance.A.dot(x) - instance.b
    return float(np.max(np.maximum(residual, 0)) /
                 max(np.max(np.abs(instance.b)), 1.))


def extract_strategy(instance, x, integer_indices=None, eps_tight=1e-5,
                     int_tol=1e-4):
    """
    Extract the strategy from an optimal solution.

    :param instance:        InstanceData
    :param x:               optimal solution
    :param integer_indices: indices of the integer variables
                            [default: those of the instance]
    :param eps_tight:       relative tightness tolerance
    :param int_tol:         integrality tolerance
    :return:                Strategy
    :raises NonIntegralSolutionError: if an integer variable is not integral

    """
    x = np.asarray(x, dtype=float)
    if integer_indices is None:
        integer_indices = instance.integer_indices
    integer_indices = np.asarray(integer_indices, dtype=int)
    x_int = x[integer_indices]
    rounded = np.round(x_int)
    if np.any(np.abs(x_int - rounded) > int_tol):
        raise NonIntegralSolutionError('non-integral solution: %s' % x_int)
    slack = instance.b - instance.A.dot(x)
    tight = np.nonzero(slack <= eps_tight * (1. + np.abs(instance.b)))[0]
    return Strategy(tight, rounded)
