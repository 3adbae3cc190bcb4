# encoding: utf-8
# pylint: skip-file
"""
This file contains tests for the stratopt.evaluation module.

"""

from __future__ import absolute_import, division, print_function

import os
import csv
import json
import shutil
import unittest
import tempfile
import warnings

from stratopt.evaluation import *

DIMS = {'n_var': 21, 'n_constr': 74}


def records():
    # accurate, suboptimal, infeasible and failed online solutions
    return [EvalRecord('a', 1, -1., 0., -1., .001, .002, .1, .05),
            EvalRecord('b', 1, -.9, 0., -1., .003, .002, .3, .05),
            EvalRecord('c', 1, -2., .5, -1., .001, .004, .2, .05),
            EvalRecord('d', 1, np.nan, np.nan, -1., .001, .002, .2, .05)]


class TestSuboptimalityFunction(unittest.TestCase):

    def test_values(self):
        self.assertTrue(np.allclose(suboptimality(-.9, -1.), .1))
        self.assertTrue(np.allclose(suboptimality(3., 2.), .5))
        # better than the oracle
        self.assertEqual(suboptimality(-1.1, -1.), 0)
        # zero optimal cost
        self.assertTrue(np.allclose(suboptimality(1e-12, 0.), 1e-2))
        self.assertTrue(np.isnan(suboptimality(np.nan, 1.)))

    def test_errors(self):
        with self.assertRaises(ValueError):
            suboptimality(1., 1., infeasibility=1.)
        self.assertEqual(suboptimality(1., 1., infeasibility=1e-5), 0)


class TestEvalRecordClass(unittest.TestCase):

    def test_values(self):
        accurate, suboptimal, infeasible, failed = records()
        self.assertTrue(accurate.feasible)
        self.assertTrue(accurate.accurate)
        self.assertEqual(accurate.suboptimality, 0)
        self.assertTrue(np.allclose(accurate.time_online, .003))
        self.assertTrue(suboptimal.feasible)
        self.assertFalse(suboptimal.accurate)
        self.assertTrue(np.allclose(suboptimal.suboptimality, .1))
        self.assertFalse(infeasible.feasible)
        self.assertTrue(np.isnan(infeasible.suboptimality))
        self.assertFalse(infeasible.accurate)
        self.assertFalse(failed.feasible)
        self.assertFalse(failed.accurate)

    def test_tolerances(self):
        record = EvalRecord('a', 3, -.9, 1e-3, -1., eps_inf=1e-2,
                            eps_sub=.2)
        self.assertTrue(record.accurate)
        self.assertEqual(record.k, 3)

    def test_dict(self):
        data = records()[1].to_dict()
        self.assertEqual(data['theta_id'], 'b')
        self.assertFalse(data['accurate'])
        self.assertTrue(np.allclose(data['suboptimality'], .1))
        self.assertEqual(data['time_full'], .3)

    def test_tostring(self):
        self.assertTrue(str(records()[0]).startswith('a\n'))


class TestAccuracyFunction(unittest.TestCase):

    def test_values(self):
        self.assertEqual(accuracy(records()), .25)
        self.assertEqual(accuracy(records(), eps_sub=.2), .5)
        self.assertEqual(accuracy(records(), eps_inf=1., eps_sub=.2), .75)
        self.assertEqual(accuracy(records()[:1]), 1)

    def test_errors(self):
        with self.assertRaises(ValueError):
            accuracy([])


class TestMeanEvaluationClass(unittest.TestCase):

    def test_values(self):
        mean = MeanEvaluation(records())
        self.assertEqual(len(mean), 4)
        self.assertEqual(mean.name, 'mean for 4 samples')
        # suboptimality of the feasible solutions only
        self.assertTrue(np.allclose(mean.avg_subopt, .05))
        self.assertTrue(np.allclose(mean.avg_infeas, .5 / 3))
        self.assertEqual(mean.accuracy, .25)
        self.assertTrue(np.allclose(mean.mean_time_pred, .004))
        self.assertTrue(np.allclose(mean.max_time_pred, .005))
        self.assertTrue(np.allclose(mean.mean_time_full, .2))
        self.assertTrue(np.allclose(mean.max_time_full, .3))
        self.assertTrue(np.allclose(mean.mean_time_heuristic, .05))
        self.assertTrue(np.allclose(mean.cv_time_pred, .25))
        self.assertEqual(list(mean.metrics)[:3],
                         ['avg_subopt', 'avg_infeas', 'accuracy'])

    def test_empty(self):
        mean = MeanEvaluation([])
        self.assertTrue(np.isnan(mean.accuracy))
        self.assertTrue(np.isnan(mean.avg_subopt))
        self.assertTrue(np.isnan(mean.max_time_full))

    def test_infeasible_only(self):
        mean = MeanEvaluation(records()[2:])
        self.assertTrue(np.isnan(mean.avg_subopt))
        self.assertEqual(mean.accuracy, 0)


class TestReportRowFunction(unittest.TestCase):

    def test_values(self):
        row = report_row(3, DIMS, 12, 5, 1, records())
        self.assertEqual(list(row), COLUMNS)
        self.assertEqual(row['size_param'], 3)
        self.assertEqual(row['n_var'], 21)
        self.assertEqual(row['M_unpruned'], 12)
        self.assertEqual(row['M'], 5)
        self.assertEqual(row['n_best'], 1)
        self.assertEqual(row['accuracy'], .25)


class TestEmitReportFunction(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp()
        self.filename = os.path.join(self.tmp_dir, 'motion.csv')

    def tearDown(self):
        shutil.rmtree(self.tmp_dir)

    def test_values(self):
        rows = [report_row(3, DIMS, 12, 5, k, records()) for k in (1, 10)]
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter('always')
            csv_file, json_file = emit_report(rows, self.filename,
                                              expected=[(3, 1), (3, 10)],
                                              summary={'family': 'motion'})
        self.assertEqual(len(w), 0)
        self.assertEqual(json_file, os.path.join(self.tmp_dir,
                                                 'motion.json'))
        with open(csv_file) as f:
            lines = list(csv.reader(f))
        self.assertEqual(lines[0], COLUMNS)
        self.assertEqual(len(lines), 3)
        self.assertEqual(lines[2][COLUMNS.index('n_best')], '10')
        with open(json_file) as f:
            data = json.load(f)
        self.assertEqual(data['family'], 'motion')
        self.assertEqual(data['columns'], COLUMNS)
        self.assertEqual(len(data['rows']), 2)

    def test_incomplete(self):
        rows = [{'size_param': 3, 'n_best': 1, 'accuracy': 1.}]
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter('always')
            emit_report(rows, self.filename, expected=[(3, 1), (5, 1)])
        self.assertEqual(len(w), 2)
        self.assertTrue(all(issubclass(x.category, ReportWarning)
                            for x in w))
        with open(self.filename) as f:
            lines = list(csv.reader(f))
        # missing values are left empty
        self.assertEqual(lines[1][COLUMNS.index('M')], '')
        self.assertEqual(lines[1][COLUMNS.index('accuracy')], '1.0')

    def test_json_name(self):
        filename = os.path.join(self.tmp_dir, 'report')
        _, json_file = emit_report([], filename)
        self.assertEqual(json_file, filename + '.json')
