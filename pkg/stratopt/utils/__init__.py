# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
"""
Utility package.

"""

from __future__ import absolute_import, division, print_function

import os
import json
import hashlib
import argparse

import numpy as np


def _json_default(obj):
    """Convert numpy types for JSON serialisation."""
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError('%r is not JSON serializable' % obj)


def canonical_json(data):
    """
    Canonical JSON text (sorted keys, no whitespace).

    :param data: JSON serializable data (numpy arrays are converted)
    :return:     string

    """
    return json.dumps(data, sort_keys=True, separators=(',', ':'),
                      default=_json_default)


def content_hash(data):
    """
    Content hash of JSON serializable data.

    :param data: data
    :return:     hexadecimal sha256 digest of the canonical JSON text

    """
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def file_hash(filename, block_size=1 << 16):
    """
    Content hash of a file.

    :param filename:   file name
    :param block_size: read block size
    :return:           hexadecimal sha256 digest

    """
    sha = hashlib.sha256()
    with open(filename, 'rb') as f:
        for block in iter(lambda: f.read(block_size), b''):
            sha.update(block)
    return sha.hexdigest()


def write_json(data, filename):
    """
    Write data as (indented) JSON file.

    :param data:     JSON serializable data (numpy arrays are converted)
    :param filename: output file name

    """
    with open(filename, 'w') as f:
        json.dump(data, f, sort_keys=True, indent=2, default=_json_default)


def read_json(filename):
    """
    Read a JSON file.

    :param filename: input file name
    :return:         data

    """
    with open(filename, 'r') as f:
        return json.load(f)


def ensure_dir(path):
    """
    Create the directory if it does not exist.

    :param path: directory
    :return:     directory

    """
    if path and not os.path.isdir(path):
        os.makedirs(path)
    return path


class OverrideDefaultListAction(argparse.Action):
    """
    An argparse action that works similarly to the regular 'append' action,
    but the default value is replaced (not extended) by the first given value.

    Multiple values can be parsed from a single argument with the specified
    separator, e.g. `--k 1,3,10` with `sep=','`.

    """
    def __init__(self, sep=None, *args, **kwargs):
        super(OverrideDefaultListAction, self).__init__(*args, **kwargs)
        # values are converted after splitting
        self.list_type = self.type or str
        if sep is not None:
            self.type = str
        self.sep = sep

    def __call__(self, parser, namespace, value, option_string=None):
        values = getattr(namespace, self.dest, None)
        if values is None or values is self.default:
            values = []
            setattr(namespace, self.dest, values)
        items = value.split(self.sep) if self.sep is not None else [value]
        try:
            values.extend([self.list_type(v) for v in items if v != ''])
        except ValueError as e:
            raise argparse.ArgumentError(self, str(e))


# import the submodules
from . import stats
