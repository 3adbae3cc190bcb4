# encoding: utf-8
"""
Machine learning package.

"""

from __future__ import absolute_import, division, print_function

# import the submodules
from . import nn, io
