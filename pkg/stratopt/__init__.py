# encoding: utf-8
"""
StratOpt learns the optimal strategies of parametric mixed-integer quadratic
optimization problems.

Offline, sampled problem instances are solved to optimality and their
strategies (the tight constraints and the values of the integer variables)
are collected and pruned. A classifier is trained to map the parameters to
the strategies. Online, the most likely strategies are decoded with a
single (cached) KKT factorization each.

Please see the README for further details of this package.

"""

from __future__ import absolute_import, division, print_function

try:
    from importlib.metadata import version as _version, PackageNotFoundError
    try:
        __version__ = _version("stratopt")
    except PackageNotFoundError:
        # not installed
        __version__ = "unknown"
    # keep namespace clean
    del _version, PackageNotFoundError
except ImportError:
    import pkg_resources
    try:
        __version__ = pkg_resources.get_distribution("stratopt").version
    except pkg_resources.DistributionNotFound:
        __version__ = "unknown"
    del pkg_resources

# finally import all submodules
from . import (processors, problems, solvers, strategies, ml, benchmarks,
               evaluation, utils, pipeline)
