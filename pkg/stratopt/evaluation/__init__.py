# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-instance-attributes
"""
Evaluation package.

Online solutions are evaluated by their infeasibility p (normalized maximum
constraint violation) and their suboptimality d (relative cost difference
to the optimal cost). A solution is accurate if p <= eps_inf and
d <= eps_sub.

"""

from __future__ import absolute_import, division, print_function

import csv
import warnings
from collections import OrderedDict

import numpy as np

from ..utils import write_json
from ..utils.stats import coefficient_of_variation

EPS_INF = 1e-4
EPS_SUB = 1e-4
# guard of the suboptimality denominator
COST_GUARD = 1e-10

# columns of the benchmark reports
COLUMNS = ['size_param', 'n_var', 'n_constr', 'M_unpruned', 'M', 'n_best',
           'mean_time_pred', 'max_time_pred', 'mean_time_full',
           'max_time_full', 'mean_time_heuristic', 'max_time_heuristic',
           'avg_subopt', 'avg_infeas', 'accuracy']


class ReportWarning(UserWarning):
    """
    Warning issued for incomplete reports.

    """
    pass


def suboptimality(cost, optimal_cost, infeasibility=None, eps_inf=EPS_INF):
    """
    Relative suboptimality (f - f*) / |f*| of a feasible solution.

    :param cost:          cost of the solution
    :param optimal_cost:  optimal cost
    :param infeasibility: infeasibility of the solution (checked if given)
    :param eps_inf:       feasibility tolerance
    :return:              nonnegative suboptimality

    Note: The denominator is max(|f*|, 1e-10).

    """
    if infeasibility is not None and not infeasibility <= eps_inf:
        raise ValueError('suboptimality of an infeasible solution '
                         '(infeasibility %g)' % infeasibility)
    raw = (cost - optimal_cost) / max(abs(optimal_cost), COST_GUARD)
    if np.isnan(raw):
        return np.nan
    return max(0., float(raw))


class EvaluationMixin(object):
    """
    Evaluation mixin class.

    `METRIC_NAMES` is a list of tuples, containing the attribute's name and
    the corresponding label. The attributes are provided as an ordered
    dictionary by the `metrics` property.

    """
    name = None
    METRIC_NAMES = []
    FLOAT_FORMAT = '{:.3g}'

    @property
    def metrics(self):
        """Metrics as a dictionary."""
        return OrderedDict((m, getattr(self, m)) for m, _ in
                           self.METRIC_NAMES)

    def tostring(self, **kwargs):
        """
        One line summary of the metrics, preceded by the name.

        :param kwargs: ignored
        :return:       string

        """
        # pylint: disable=unused-argument
        ret = '' if self.name is None else '%s\n  ' % self.name
        ret += ' '.join('%s: %s' % (label, self.FLOAT_FORMAT.format(
            float(getattr(self, metric)))) for metric, label in
                        self.METRIC_NAMES)
        return ret

    def __str__(self):
        return self.tostring()


class EvalRecord(EvaluationMixin):
    """
    Evaluation of a single online solution.

    :param theta_id:       identifier of the parameter
    :param k:              number of evaluated strategies
    :param objective:      cost of the online solution (nan if none)
    :param infeasibility:  infeasibility p of the online solution
    :param optimal_cost:   cost of the oracle solution
    :param time_pred:      strategy prediction time [seconds]
    :param time_decode:    solution decoding time [seconds]
    :param time_full:      oracle solve time [seconds]
    :param time_heuristic: node limited oracle solve time [seconds]
    :param eps_inf:        feasibility tolerance
    :param eps_sub:        suboptimality tolerance

    Note: The suboptimality is only defined for feasible solutions, it is
          nan otherwise. A failed decode has nan cost and infeasibility.

    """
    METRIC_NAMES = [
        ('infeasibility', 'Infeas'),
        ('suboptimality', 'Subopt'),
        ('time_online', 'Time'),
        ('accurate', 'Accurate'),
    ]

    def __init__(self, theta_id, k, objective, infeasibility, optimal_cost,
                 time_pred=np.nan, time_decode=np.nan, time_full=np.nan,
                 time_heuristic=np.nan, eps_inf=EPS_INF, eps_sub=EPS_SUB):
        self.name = theta_id
        self.theta_id = theta_id
        self.k = int(k)
        self.objective = float(objective)
        self.infeasibility = float(infeasibility)
        self.optimal_cost = float(optimal_cost)
        self.time_pred = float(time_pred)
        self.time_decode = float(time_decode)
        self.time_full = float(time_full)
        self.time_heuristic = float(time_heuristic)
        self.eps_inf = eps_inf
        self.eps_sub = eps_sub

    @property
    def feasible(self):
        """Flag whether the solution is feasible."""
        return self.infeasibility <= self.eps_inf

    @property
    def suboptimality(self):
        """Suboptimality d (nan for infeasible solutions)."""
        if not self.feasible:
            return np.nan
        return suboptimality(self.objective, self.optimal_cost)

    @property
    def accurate(self):
        """Flag whether the solution is feasible and suboptimality within
        the tolerance."""
        return bool(self.feasible and self.suboptimality <= self.eps_sub)

    @property
    def time_online(self):
        """Prediction plus decoding time."""
        return self.time_pred + self.time_decode

    def to_dict(self):
        """Dictionary representation."""
        return {'theta_id': self.theta_id, 'k': self.k,
                'objective': self.objective,
                'infeasibility': self.infeasibility,
                'optimal_cost': self.optimal_cost,
                'suboptimality': self.suboptimality,
                'accurate': self.accurate,
                'time_pred': self.time_pred,
                'time_decode': self.time_decode,
                'time_full': self.time_full,
                'time_heuristic': self.time_heuristic}


def accuracy(records, eps_inf=EPS_INF, eps_sub=EPS_SUB):
    """
    Fraction of accurate solutions.

    :param records: list of EvalRecord
    :param eps_inf: feasibility tolerance
    :param eps_sub: suboptimality tolerance
    :return:        accuracy in [0, 1]

    """
    if not len(records):
        raise ValueError('at least one record must be given')
    accurate = 0
    for r in records:
        if r.infeasibility <= eps_inf and \
                suboptimality(r.objective, r.optimal_cost) <= eps_sub:
            accurate += 1
    return accurate / len(records)


def _nanmean(values):
    values = np.asarray(values, dtype=float)
    if not np.any(np.isfinite(values)):
        return np.nan
    return float(np.nanmean(values))


def _nanmax(values):
    values = np.asarray(values, dtype=float)
    if not np.any(np.isfinite(values)):
        return np.nan
    return float(np.nanmax(values))


class MeanEvaluation(EvaluationMixin):
    """
    Aggregation of EvalRecords.

    :param records: list of EvalRecord
    :param name:    name to be displayed

    """
    METRIC_NAMES = [
        ('avg_subopt', 'Subopt'),
        ('avg_infeas', 'Infeas'),
        ('accuracy', 'Accuracy'),
        ('mean_time_pred', 'Time MLOPT'),
        ('max_time_pred', 'Max time MLOPT'),
        ('mean_time_full', 'Time full'),
        ('max_time_full', 'Max time full'),
    ]

    def __init__(self, records, name=None):
        self.records = list(records)
        self.name = name or 'mean for %d samples' % len(self.records)

    def __len__(self):
        return len(self.records)

    def _values(self, attr):
        return [getattr(r, attr) for r in self.records]

    @property
    def avg_subopt(self):
        """Mean suboptimality of the feasible solutions."""
        return _nanmean(self._values('suboptimality'))

    @property
    def avg_infeas(self):
        """Mean infeasibility."""
        return _nanmean(self._values('infeasibility'))

    @property
    def accuracy(self):
        """Fraction of accurate solutions."""
        if not self.records:
            return np.nan
        return float(np.mean(self._values('accurate')))

    @property
    def mean_time_pred(self):
        """Mean online time (prediction and decoding)."""
        return _nanmean(self._values('time_online'))

    @property
    def max_time_pred(self):
        """Maximum online time (prediction and decoding)."""
        return _nanmax(self._values('time_online'))

    @property
    def mean_time_full(self):
        """Mean oracle time."""
        return _nanmean(self._values('time_full'))

    @property
    def max_time_full(self):
        """Maximum oracle time."""
        return _nanmax(self._values('time_full'))

    @property
    def mean_time_heuristic(self):
        """Mean node limited oracle time."""
        return _nanmean(self._values('time_heuristic'))

    @property
    def max_time_heuristic(self):
        """Maximum node limited oracle time."""
        return _nanmax(self._values('time_heuristic'))

    @property
    def cv_time_pred(self):
        """Coefficient of variation of the online times."""
        return coefficient_of_variation(self._values('time_online'))

    @property
    def cv_time_full(self):
        """Coefficient of variation of the oracle times."""
        return coefficient_of_variation(self._values('time_full'))


def report_row(size_param, dims, M_unpruned, M, k, records):
    """
    Report row of a problem size and number of evaluated strategies.

    :param size_param: value of the size parameter
    :param dims:       problem dimensions (with n_var and n_constr)
    :param M_unpruned: number of strategies before pruning
    :param M:          number of strategies
    :param k:          number of evaluated strategies
    :param records:    list of EvalRecord
    :return:           ordered dictionary with the report COLUMNS

    """
    mean = MeanEvaluation(records)
    row = OrderedDict([('size_param', size_param),
                       ('n_var', dims['n_var']),
                       ('n_constr', dims['n_constr']),
                       ('M_unpruned', M_unpruned), ('M', M), ('n_best', k)])
    for column in COLUMNS[6:]:
        row[column] = getattr(mean, column)
    return row


def emit_report(rows, filename, expected=None, summary=None):
    """
    Write the report rows as CSV file and a JSON summary.

    :param rows:     list of report rows (dictionaries with the COLUMNS)
    :param filename: CSV output file name, the summary is written to the
                     same name with a .json suffix
    :param expected: list of (size_param, n_best) tuples expected in the
                     report
    :param summary:  additional summary information
    :return:         tuple (CSV file name, JSON file name)

    Note: Incomplete reports (missing rows or columns) are written with a
          ReportWarning; missing values are left empty.

    """
    rows = [dict(r) for r in rows]
    for row in rows:
        missing = [c for c in COLUMNS if c not in row]
        if missing:
            warnings.warn('report row %s lacks columns %s' %
                          (row.get('size_param'), missing), ReportWarning)
    if expected is not None:
        present = set((r.get('size_param'), r.get('n_best')) for r in rows)
        missing = [e for e in expected if tuple(e) not in present]
        if missing:
            warnings.warn('report lacks rows %s' % missing, ReportWarning)
    with open(filename, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=COLUMNS, extrasaction='ignore',
                                restval='')
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    json_file = filename.rsplit('.', 1)[0] + '.json' \
        if filename.endswith('.csv') else filename + '.json'
    data = dict(summary or {})
    data['columns'] = COLUMNS
    data['rows'] = rows
    write_json(data, json_file)
    return filename, json_file
