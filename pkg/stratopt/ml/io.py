# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
"""
This file contains the storage of trained classifiers.

A model is stored as a pair of files sharing the same base name:

The .npz file contains the numeric data:
  - `format_version`:        version of the storage format
  - `dims`:                  layer sizes (input, hidden..., output)
  - `layer_<i>_weights`:     weights of layer i (n_in x n_out)
  - `layer_<i>_bias`:        bias of layer i
  - `layer_<i>_transfer_fn`: name of the transfer function of layer i

The layers are numbered consecutively, starting with zero.

The .json file contains the metadata (training hyper-parameters, the label
map from network outputs to strategy bank positions and the hash of the
strategy bank the model was trained on).

"""

from __future__ import absolute_import, division, print_function

import os
import re

import numpy as np

from .nn import NetworkModel, FeedForwardLayer
from ..utils import read_json, write_json

FORMAT_VERSION = 1


class ModelFormatError(Exception):
    """
    Exception raised for unreadable or inconsistent model files.

    """
    def __init__(self, value):
        super(ModelFormatError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


def model_filenames(filename):
    """
    Names of the numeric data and metadata files of a model.

    :param filename: model file name (with or without extension)
    :return:         tuple (npz file name, json file name)

    """
    base, ext = os.path.splitext(filename)
    if ext not in ('.npz', '.json'):
        base = filename
    return base + '.npz', base + '.json'


def save_model(model, filename, label_map=None, bank_hash=None):
    """
    Save a model.

    :param model:     NetworkModel
    :param filename:  output file name
    :param label_map: list mapping network outputs to strategy labels
                      [default: identity]
    :param bank_hash: hash of the strategy bank
    :return:          tuple (npz file name, json file name)

    """
    npz_file, json_file = model_filenames(filename)
    data = {'format_version': np.array(FORMAT_VERSION),
            'dims': np.array(model.dims)}
    for i, layer in enumerate(model.layers):
        data['layer_%d_weights' % i] = layer.weights
        data['layer_%d_bias' % i] = layer.bias
        data['layer_%d_transfer_fn' % i] = np.array(layer.transfer_fn)
    np.savez(npz_file, **data)
    if label_map is None:
        label_map = model.metadata.get('label_map',
                                       list(range(model.output_size)))
    if bank_hash is None:
        bank_hash = model.metadata.get('bank_hash')
    metadata = dict(model.metadata, label_map=[int(l) for l in label_map],
                    bank_hash=bank_hash, format_version=FORMAT_VERSION)
    write_json(metadata, json_file)
    model.metadata = metadata
    return npz_file, json_file


def load_model(filename):
    """
    Load a model.

    :param filename: model file name (with or without extension)
    :return:         NetworkModel with the metadata attached

    """
    npz_file, json_file = model_filenames(filename)
    with np.load(npz_file) as data:
        if int(data['format_version']) != FORMAT_VERSION:
            raise ModelFormatError('unsupported format version %d' %
                                   int(data['format_version']))
        indices = set(int(re.findall(r'layer_(\d+)_', k)[0])
                      for k in data.keys() if k.startswith('layer_'))
        if indices != set(range(len(indices))):
            raise ModelFormatError('layers are not numbered consecutively')
        layers = []
        for i in range(len(indices)):
            layers.append(FeedForwardLayer(
                data['layer_%d_weights' % i], data['layer_%d_bias' % i],
                str(data['layer_%d_transfer_fn' % i])))
        dims = data['dims'].tolist()
    metadata = {}
    if os.path.exists(json_file):
        metadata = read_json(json_file)
    try:
        model = NetworkModel(layers, metadata)
    except ValueError as e:
        raise ModelFormatError(str(e))
    if model.dims != dims:
        raise ModelFormatError('layer sizes do not match %s' % dims)
    return model
