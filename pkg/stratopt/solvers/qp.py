# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
"""
This file contains a dense primal active-set solver for convex quadratic
programs, used as the continuous relaxation engine of the branch-and-bound
oracle.

The solver handles positive semidefinite (including zero) cost matrices: if
the reduced Hessian is singular and the reduced gradient has a component in
its null space, a zero-curvature descent direction is followed until a
constraint blocks it.

"""

from __future__ import absolute_import, division, print_function

import numpy as np
import scipy.linalg

from . import OPTIMAL, INFEASIBLE, ITERATION_LIMIT, UNBOUNDED

FEAS_TOL = 1e-9
DUAL_TOL = 1e-9
EIG_TOL = 1e-10
DEGENERATE_STEPS = 10
PIVOTS_PER_ROW = 50


class QPResult(object):
    """
    Result of a QP solve.

    :param x:           solution (None if infeasible)
    :param objective:   cost at the solution
    :param status:      solver status
    :param active_rows: indices of the constraint rows (of A) in the final
                        working set
    :param duals:       multipliers of the active rows
    :param bound_duals: aggregated multipliers of the variable bounds and
                        fixings (length n)
    :param iterations:  number of pivots (both phases)

    Note: At an optimal solution the stationarity condition reads
          P x + q + A[active_rows]^T duals + bound_duals = 0.

    """

    def __init__(self, x, objective, status, active_rows=(), duals=(),
                 bound_duals=None, iterations=0):
        self.x = x
        self.objective = objective
        self.status = status
        self.active_rows = np.asarray(active_rows, dtype=int)
        self.duals = np.asarray(duals, dtype=float)
        self.bound_duals = bound_duals
        self.iterations = iterations

    @property
    def optimal(self):
        """Flag whether the solve was successful."""
        return self.status == OPTIMAL

    def __repr__(self):
        return 'QPResult(status=%s, objective=%r)' % (self.status,
                                                     self.objective)


def _constraint_system(instance, equality_rows, fixed, lower, upper):
    """
    Stack the constraint rows, the fixings and the variable bounds.

    :return: tuple (C, d, is_eq, row, var, sign)

    """
    n = instance.n
    C = [instance.A.toarray()]
    d = [instance.b]
    is_eq = np.zeros(instance.m, dtype=bool)
    is_eq[np.asarray(list(equality_rows), dtype=int)] = True
    is_eq = [is_eq]
    row = [np.arange(instance.m)]
    var = [-np.ones(instance.m, dtype=int)]
    sign = [np.zeros(instance.m)]
    fixed = dict(fixed or {})
    extra = []
    for j, value in sorted(fixed.items()):
        extra.append((j, 1., float(value), True))
    for bounds, s in ((upper, 1.), (lower, -1.)):
        if bounds is None:
            continue
        for j, value in enumerate(bounds):
            if j not in fixed and np.isfinite(value):
                extra.append((j, s, s * float(value), False))
    if extra:
        E = np.zeros((len(extra), n))
        E[np.arange(len(extra)), [e[0] for e in extra]] = [e[1] for e in
                                                           extra]
        C.append(E)
        d.append(np.array([e[2] for e in extra]))
        is_eq.append(np.array([e[3] for e in extra], dtype=bool))
        row.append(-np.ones(len(extra), dtype=int))
        var.append(np.array([e[0] for e in extra], dtype=int))
        sign.append(np.array([e[1] for e in extra]))
    return (np.vstack(C), np.hstack(d), np.hstack(is_eq), np.hstack(row),
            np.hstack(var), np.hstack(sign))


def _active_set(H, g, C, d, is_eq, x, max_iter):
    """
    Primal active-set iteration from a feasible point.

    Minimizes 1/2 x^T H x + g^T x subject to C x <= d on the rows not
    flagged as equalities and C x = d on the others.

    :return: tuple (x, working set, multipliers, status, iterations)

    """
    n = len(x)
    working = [int(i) for i in np.nonzero(is_eq)[0]]
    row_norms = np.sqrt(np.sum(C ** 2, axis=1))
    degenerate = 0
    mu = np.zeros(0)
    for it in range(max_iter):
        grad = H.dot(x) + g
        grad_tol = DUAL_TOL * (1. + np.max(np.abs(grad)))
        if working:
            Z = scipy.linalg.null_space(C[working])
        else:
            Z = np.eye(n)
        step_max = 1.
        p = np.zeros(n)
        if Z.shape[1]:
            gz = Z.T.dot(grad)
            w, V = np.linalg.eigh(Z.T.dot(H).dot(Z))
            curved = w > EIG_TOL * max(1., np.max(np.abs(w)))
            flat = V[:, ~curved]
            gz_flat = flat.dot(flat.T.dot(gz))
            if np.max(np.abs(gz_flat), initial=0.) > grad_tol:
                # zero curvature descent direction
                pz = -gz_flat
                step_max = np.inf
            else:
                Vc = V[:, curved]
                pz = -Vc.dot(Vc.T.dot(gz) / w[curved])
            p = Z.dot(pz)
        p_norm = np.max(np.abs(p), initial=0.)
        if p_norm <= 1e-12 * (1. + np.max(np.abs(x), initial=0.)):
            # stationary on the working set, check the multipliers
            if working:
                mu = np.linalg.lstsq(C[working].T, -grad, rcond=None)[0]
            else:
                mu = np.zeros(0)
            negative = [k for k, i in enumerate(working)
                        if not is_eq[i] and mu[k] < -grad_tol]
            if not negative:
                return x, working, mu, OPTIMAL, it
            if degenerate >= DEGENERATE_STEPS:
                # Bland's rule: drop the lowest row index
                drop = min(negative, key=lambda k: working[k])
            else:
                drop = min(negative, key=lambda k: mu[k])
            working.pop(drop)
            continue
        # ratio test over the inactive inequality rows
        Cp = C.dot(p)
        candidates = ~is_eq & (Cp > 1e-11 * row_norms * p_norm)
        candidates[working] = False
        idx = np.nonzero(candidates)[0]
        alpha = step_max
        block = None
        if len(idx):
            slack = np.maximum(d[idx] - C[idx].dot(x), 0.)
            alphas = slack / Cp[idx]
            min_alpha = np.min(alphas)
            if min_alpha < step_max:
                alpha = min_alpha
                # lowest index among (numerical) ties
                ties = idx[alphas <= min_alpha + 1e-14 * (1. + min_alpha)]
                block = int(ties[0])
        if not np.isfinite(alpha):
            return x, working, mu, UNBOUNDED, it
        x = x + alpha * p
        if block is not None:
            working.append(block)
        if alpha * p_norm <= 1e-14 * (1. + np.max(np.abs(x))):
            degenerate += 1
        else:
            degenerate = 0
    return x, working, mu, ITERATION_LIMIT, max_iter


def _phase_one(C, d, is_eq, x0, max_iter):
    """
    Find a feasible point by minimizing the maximum violation.

    :return: tuple (feasible point or None, iterations)

    """
    n = len(x0)
    tol = FEAS_TOL * (1. + np.max(np.abs(d), initial=0.))
    x = np.array(x0, dtype=float)
    if np.any(is_eq):
        Ce, de = C[is_eq], d[is_eq]
        x += np.linalg.lstsq(Ce, de - Ce.dot(x), rcond=None)[0]
        if np.max(np.abs(Ce.dot(x) - de)) > tol:
            return None, 0
    ineq = ~is_eq
    t = max(0., np.max(C[ineq].dot(x) - d[ineq], initial=0.))
    if t <= tol:
        return x, 0
    # variables (x, t): minimize t s.t. C_I x - t <= d_I, C_E x = d_E, t >= 0
    C1 = np.zeros((len(d) + 1, n + 1))
    C1[:-1, :n] = C
    C1[:-1, n] = -ineq.astype(float)
    C1[-1, n] = -1.
    d1 = np.hstack((d, 0.))
    eq1 = np.hstack((is_eq, False))
    g1 = np.zeros(n + 1)
    g1[n] = 1.
    z, _, _, status, it = _active_set(np.zeros((n + 1, n + 1)), g1, C1, d1,
                                      eq1, np.hstack((x, t)), max_iter)
    if status != OPTIMAL or z[n] > tol:
        return None, it
    return z[:n], it


def solve_qp(instance, equality_rows=(), fixed=None, lower=None, upper=None,
             x0=None, max_iter=None):
    """
    Solve the continuous QP of an instance.

    :param instance:      InstanceData
    :param equality_rows: rows of A to be held as equalities
    :param fixed:         dictionary {variable index: value} of fixings
    :param lower:         lower variable bounds (length n, -inf for none)
    :param upper:         upper variable bounds (length n, inf for none)
    :param x0:            starting point (need not be feasible)
    :param max_iter:      pivot limit [default: 50 * (n + number of rows)]
    :return:              QPResult

    """
    n = instance.n
    C, d, is_eq, row, var, sign = _constraint_system(instance, equality_rows,
                                                     fixed, lower, upper)
    if max_iter is None:
        max_iter = PIVOTS_PER_ROW * (n + len(d))
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)
    x, it1 = _phase_one(C, d, is_eq, x0, max_iter)
    if x is None:
        return QPResult(None, np.inf, INFEASIBLE, iterations=it1)
    H = instance.P.toarray()
    x, working, mu, status, it2 = _active_set(H, instance.q, C, d, is_eq, x,
                                              max_iter)
    if status != OPTIMAL:
        return QPResult(x, np.nan, status, iterations=it1 + it2)
    working = np.asarray(working, dtype=int)
    mu = np.asarray(mu, dtype=float)
    bound_duals = np.zeros(n)
    is_row = row[working] >= 0
    np.add.at(bound_duals, var[working[~is_row]],
              sign[working[~is_row]] * mu[~is_row])
    order = np.argsort(row[working[is_row]])
    return QPResult(x, instance.objective(x), OPTIMAL,
                    active_rows=row[working[is_row]][order],
                    duals=mu[is_row][order], bound_duals=bound_duals,
                    iterations=it1 + it2)
