# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
"""
This file contains timing statistics.

"""

from __future__ import absolute_import, division, print_function

import numpy as np

# repeats of the timed online solves
REPEATS = 3


def coefficient_of_variation(values):
    """
    Coefficient of variation (standard deviation / mean).

    :param values: values (e.g. solve times)
    :return:       coefficient of variation, nan for empty or zero-mean values

    """
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if not len(values) or np.mean(values) == 0:
        return np.nan
    return float(np.std(values) / np.mean(values))
