# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
"""
This file contains the feed-forward neural network which maps problem
parameters to a ranking over the strategies.

The network uses rectified linear hidden layers and a linear output layer.
The softmax is only needed for training (cross-entropy loss) and for class
probabilities; online predictions rank the raw outputs (logits) directly.

The only dependencies are Python + numpy.

"""

from __future__ import absolute_import, division, print_function

import numpy as np

from ..processors import Processor

NN_DTYPE = np.float64

# default hyper-parameters
DEPTH = 3
WIDTH = 32
LEARNING_RATE = 1e-2
BATCH_SIZE = 32
EPOCHS = 30
MOMENTUM = 0.9
VAL_FRACTION = 0.2

# search ranges of the hyper-parameter tuning
DEPTH_RANGE = (3, 15)
WIDTH_RANGE = (4, 128)
LEARNING_RATE_RANGE = (1e-5, 1e-1)
BATCH_SIZE_RANGE = (32, 256)
EPOCHS_RANGE = (5, 30)


class DivergenceError(Exception):
    """
    Exception raised if the training loss diverges.

    The `value` holds the TrainReport up to the divergence.

    """
    def __init__(self, value):
        super(DivergenceError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


# transfer functions
def linear(x, out=None):
    """
    Identity, used by the output layer.

    :param x:   pre-activations
    :param out: optional output array
    :return:    x (copied to out if given)

    """
    if out is None or x is out:
        return x
    out[:] = x
    return out


def relu(x, out=None):
    """
    ReLU, max(x, 0), used by the hidden layers.

    :param x:   pre-activations
    :param out: optional output array
    :return:    activations

    """
    if out is None:
        return np.maximum(x, 0)
    np.maximum(x, 0, out)
    return out


def softmax(x, out=None):
    """
    Class probabilities from logits.

    :param x:   logits (classes along the last axis)
    :param out: optional output array
    :return:    probabilities, summing to one along the last axis

    """
    # shift by the maximum logit to avoid overflow
    tmp = np.amax(x, axis=-1, keepdims=True)
    if out is None:
        out = np.exp(x - tmp)
    else:
        np.exp(x - tmp, out=out)
    out /= np.sum(out, axis=-1, keepdims=True)
    return out


def log_softmax(x):
    """
    Logarithm of the softmax, computed with the log-sum-exp trick.

    :param x: input data (classes along the last axis)
    :return:  log softmax of input data

    """
    shifted = x - np.amax(x, axis=-1, keepdims=True)
    return shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))


TRANSFER_FUNCTIONS = {'linear': linear, 'relu': relu}


# network layer classes
class FeedForwardLayer(object):
    """
    Dense layer computing transfer_fn(data . weights + bias).

    :param weights:     weights (n_in x n_out)
    :param bias:        bias (n_out)
    :param transfer_fn: name of the transfer function ('relu' or 'linear')

    """

    def __init__(self, weights, bias, transfer_fn='relu'):
        self.weights = np.array(weights, dtype=NN_DTYPE, ndmin=2)
        self.bias = np.array(bias, dtype=NN_DTYPE).ravel()
        if self.weights.shape[1] != len(self.bias):
            raise ValueError('weights and bias dimensions do not match')
        if transfer_fn not in TRANSFER_FUNCTIONS:
            raise ValueError('unknown transfer function %r' % transfer_fn)
        self.transfer_fn = transfer_fn

    @property
    def n_in(self):
        """Input size."""
        return self.weights.shape[0]

    @property
    def n_out(self):
        """Output size."""
        return self.weights.shape[1]

    def activate(self, data):
        """
        Forward pass of the layer.

        :param data: input vector or matrix (one vector per row)
        :return:     activations

        """
        return TRANSFER_FUNCTIONS[self.transfer_fn](
            np.dot(data, self.weights) + self.bias)


class NetworkModel(Processor):
    """
    Feed-forward network classifier.

    :param layers:   list of FeedForwardLayer
    :param metadata: dictionary with training metadata

    """

    def __init__(self, layers, metadata=None):
        if not layers:
            raise ValueError('at least one layer must be given')
        for prev, layer in zip(layers[:-1], layers[1:]):
            if prev.n_out != layer.n_in:
                raise ValueError('layer dimensions do not chain')
        self.layers = layers
        self.metadata = dict(metadata or {})

    @classmethod
    def create(cls, dims, seed=None):
        """
        Create a network with randomly initialized weights.

        :param dims: layer sizes (input, hidden..., output)
        :param seed: random seed or numpy RandomState
        :return:     NetworkModel

        Note: Weights are drawn uniformly from +-sqrt(6 / (n_in + n_out)),
              biases are zero.

        """
        rng = seed if isinstance(seed, np.random.RandomState) else \
            np.random.RandomState(seed)
        layers = []
        for i, (n_in, n_out) in enumerate(zip(dims[:-1], dims[1:])):
            limit = np.sqrt(6. / (n_in + n_out))
            weights = rng.uniform(-limit, limit, size=(n_in, n_out))
            transfer_fn = 'linear' if i == len(dims) - 2 else 'relu'
            layers.append(FeedForwardLayer(weights, np.zeros(n_out),
                                           transfer_fn))
        return cls(layers)

    @property
    def dims(self):
        """Layer sizes (input, hidden..., output)."""
        return [self.layers[0].n_in] + [l.n_out for l in self.layers]

    @property
    def input_size(self):
        """Size of the parameter vector."""
        return self.layers[0].n_in

    @property
    def output_size(self):
        """Number of classes (strategies)."""
        return self.layers[-1].n_out

    def forward(self, data):
        """
        Compute the logits.

        :param data: parameter vector or matrix (one vector per row)
        :return:     logits

        """
        data = np.asarray(data, dtype=NN_DTYPE)
        if data.shape[-1] != self.input_size:
            raise ValueError('input must have size %d' % self.input_size)
        for layer in self.layers:
            data = layer.activate(data)
        return data

    def process(self, data):
        """
        Process the given data with the network.

        :param data: parameter vector or matrix
        :return:     logits

        """
        return self.forward(data)

    def predict_proba(self, data):
        """
        Class probabilities.

        :param data: parameter vector or matrix
        :return:     softmax of the logits

        """
        return softmax(self.forward(data))

    def predict_topk(self, data, k):
        """
        The k most likely classes.

        :param data: parameter vector
        :param k:    number of classes
        :return:     list of k labels, most likely first

        """
        if not 1 <= k <= self.output_size:
            raise ValueError('k must be in [1, %d]' % self.output_size)
        logits = self.forward(data)
        # stable sort, ties are ranked by the lower label
        return [int(l) for l in np.argsort(-logits, kind='mergesort')[:k]]

    def loss(self, X, y):
        """
        Mean cross-entropy loss.

        :param X: parameter matrix (one vector per row)
        :param y: labels
        :return:  loss

        """
        y = np.asarray(y, dtype=int)
        logp = log_softmax(self.forward(X))
        return -float(np.mean(logp[np.arange(len(y)), y]))

    def gradients(self, X, y):
        """
        Loss and gradients by back-propagation.

        :param X: parameter matrix (one vector per row)
        :param y: labels
        :return:  tuple (loss, list of (weight gradient, bias gradient))

        """
        X = np.asarray(X, dtype=NN_DTYPE)
        y = np.asarray(y, dtype=int)
        inputs = []
        data = X
        for layer in self.layers:
            inputs.append(data)
            data = layer.activate(data)
        logp = log_softmax(data)
        rows = np.arange(len(y))
        loss = -float(np.mean(logp[rows, y]))
        delta = np.exp(logp)
        delta[rows, y] -= 1.
        delta /= len(y)
        grads = []
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            grads.append((np.dot(inputs[i].T, delta), delta.sum(axis=0)))
            if i:
                delta = np.dot(delta, layer.weights.T) * (inputs[i] > 0)
        return loss, grads[::-1]

    def copy(self):
        """Deep copy of the network."""
        return NetworkModel([FeedForwardLayer(l.weights.copy(), l.bias.copy(),
                                              l.transfer_fn)
                             for l in self.layers], dict(self.metadata))


# functional interface
def forward(model, theta):
    """
    Compute the logits of a parameter vector.

    :param model: NetworkModel
    :param theta: parameter vector
    :return:      logits

    """
    return model.forward(theta)


def predict_topk(model, theta, k):
    """
    The k most likely strategy labels of a parameter vector.

    :param model: NetworkModel
    :param theta: parameter vector
    :param k:     number of labels
    :return:      list of labels, most likely first

    """
    return model.predict_topk(theta, k)


class TrainReport(object):
    """
    Report of a training run.

    :param hyperparams: hyper-parameters of the run

    """

    def __init__(self, hyperparams=None):
        self.hyperparams = dict(hyperparams or {})
        self.loss = []
        self.train_accuracy = []
        self.val_accuracy = []
        self.best_epoch = None
        self.stopped_early = False

    @property
    def epochs(self):
        """Number of trained epochs."""
        return len(self.loss)

    @property
    def final_val_accuracy(self):
        """Validation accuracy of the last epoch (nan if none)."""
        return self.val_accuracy[-1] if self.val_accuracy else np.nan

    def to_dict(self):
        """Dictionary representation."""
        return {'hyperparams': self.hyperparams, 'loss': self.loss,
                'train_accuracy': self.train_accuracy,
                'val_accuracy': self.val_accuracy,
                'best_epoch': self.best_epoch,
                'stopped_early': self.stopped_early}

    def __repr__(self):
        return 'TrainReport(epochs=%d, loss=%r, val_accuracy=%r)' % \
               (self.epochs, self.loss[-1] if self.loss else None,
                self.final_val_accuracy)


def split_dataset(num, val_fraction=VAL_FRACTION, seed=None):
    """
    Deterministic train/validation split.

    :param num:          number of samples
    :param val_fraction: fraction of validation samples
    :param seed:         random seed
    :return:             tuple (train indices, validation indices)

    """
    perm = np.random.RandomState(seed).permutation(num)
    num_val = int(round(val_fraction * num))
    if num > 1:
        num_val = min(num_val, num - 1)
    else:
        num_val = 0
    return np.sort(perm[num_val:]), np.sort(perm[:num_val])


def _accuracy(model, X, y):
    if not len(y):
        return np.nan
    return float(np.mean(np.argmax(model.forward(X), axis=1) == y))


def train(X, y, num_classes=None, depth=DEPTH, width=WIDTH,
          learning_rate=LEARNING_RATE, batch_size=BATCH_SIZE, epochs=EPOCHS,
          momentum=MOMENTUM, seed=0, val_fraction=VAL_FRACTION,
          epoch_callback=None):
    """
    Train a network with minibatch stochastic gradient descent (with
    momentum) on the softmax cross-entropy loss.

    The returned network holds the weights of the epoch with the best
    validation accuracy (training accuracy without validation samples).

    :param X:              parameter matrix (one vector per row)
    :param y:              labels in [0, num_classes)
    :param num_classes:    number of classes [default: max(y) + 1]
    :param depth:          number of hidden layers
    :param width:          size of the hidden layers
    :param learning_rate:  learning rate
    :param batch_size:     minibatch size
    :param epochs:         number of epochs
    :param momentum:       momentum (0 disables it)
    :param seed:           random seed (initialization and shuffling)
    :param val_fraction:   fraction of validation samples
    :param epoch_callback: function(epoch, report) called after every
                           epoch; returning True stops the training
    :return:               tuple (NetworkModel, TrainReport)
    :raises DivergenceError: if the loss becomes non-finite

    """
    X = np.asarray(X, dtype=NN_DTYPE)
    y = np.asarray(y, dtype=int)
    if X.ndim != 2 or not len(X):
        raise ValueError('dataset must be a non-empty matrix')
    if len(X) != len(y):
        raise ValueError('number of samples and labels differ')
    if num_classes is None:
        num_classes = int(y.max()) + 1
    if y.min() < 0 or y.max() >= num_classes:
        raise ValueError('labels must be in [0, %d)' % num_classes)
    hyperparams = dict(depth=depth, width=width, learning_rate=learning_rate,
                       batch_size=batch_size, epochs=epochs,
                       momentum=momentum, seed=seed,
                       val_fraction=val_fraction)
    report = TrainReport(hyperparams)
    train_idx, val_idx = split_dataset(len(X), val_fraction, seed)
    rng = np.random.RandomState(seed)
    dims = [X.shape[1]] + [width] * depth + [num_classes]
    model = NetworkModel.create(dims, rng)
    metadata = dict(hyperparams, num_classes=num_classes,
                    num_train=len(train_idx), num_val=len(val_idx))
    if num_classes == 1:
        # constant model, the loss is zero
        for layer in model.layers:
            layer.weights[:] = 0
        model.metadata = metadata
        report.loss.append(0.)
        report.train_accuracy.append(1.)
        report.val_accuracy.append(1. if len(val_idx) else np.nan)
        report.best_epoch = 0
        model.metadata['best_epoch'] = 0
        return model, report
    best, best_score = None, -np.inf
    velocity = [[np.zeros_like(l.weights), np.zeros_like(l.bias)]
                for l in model.layers]
    for epoch in range(epochs):
        order = train_idx[rng.permutation(len(train_idx))]
        for start in range(0, len(order), batch_size):
            batch = order[start:start + batch_size]
            _, grads = model.gradients(X[batch], y[batch])
            for layer, v, (gw, gb) in zip(model.layers, velocity, grads):
                v[0] *= momentum
                v[0] -= learning_rate * gw
                v[1] *= momentum
                v[1] -= learning_rate * gb
                layer.weights += v[0]
                layer.bias += v[1]
        loss = model.loss(X[train_idx], y[train_idx])
        report.loss.append(loss)
        if not np.isfinite(loss):
            raise DivergenceError(report)
        report.train_accuracy.append(_accuracy(model, X[train_idx],
                                               y[train_idx]))
        report.val_accuracy.append(_accuracy(model, X[val_idx], y[val_idx]))
        # keep the epoch with the best validation accuracy, the earliest on
        # ties
        score = _score(report, -1)
        if best is None or score > best_score:
            best, best_score = model.copy(), score
            report.best_epoch = epoch
        if epoch_callback is not None and epoch_callback(epoch, report):
            report.stopped_early = True
            break
    if best is not None:
        model = best
    model.metadata = dict(metadata, best_epoch=report.best_epoch)
    return model, report


def sample_hyperparams(rng):
    """
    Draw a random hyper-parameter configuration from the search ranges.

    :param rng: numpy RandomState
    :return:    dictionary

    """
    def log_uniform(low, high):
        return float(np.exp(rng.uniform(np.log(low), np.log(high))))

    return dict(depth=int(rng.randint(DEPTH_RANGE[0], DEPTH_RANGE[1] + 1)),
                width=int(round(log_uniform(*WIDTH_RANGE))),
                learning_rate=log_uniform(*LEARNING_RATE_RANGE),
                batch_size=int(rng.randint(BATCH_SIZE_RANGE[0],
                                           BATCH_SIZE_RANGE[1] + 1)),
                epochs=int(rng.randint(EPOCHS_RANGE[0], EPOCHS_RANGE[1] + 1)))


class TuneReport(object):
    """
    Report of a hyper-parameter search.

    """

    def __init__(self):
        self.trials = []
        self.best = None

    def to_dict(self):
        """Dictionary representation."""
        return {'trials': self.trials, 'best': self.best}


def tune(X, y, budget, num_classes=None, seed=0, warmup=1, **kwargs):
    """
    Random hyper-parameter search with median stopping.

    A trial is stopped early if, after the warm-up epochs, its validation
    accuracy falls below the median of the previous trials at the same
    epoch. Stopped trials do not compete for the best configuration.

    :param X:           parameter matrix (one vector per row)
    :param y:           labels
    :param budget:      number of trials
    :param num_classes: number of classes
    :param seed:        random seed
    :param warmup:      number of epochs before stopping is considered
    :param kwargs:      additional keyword arguments passed to `train`
    :return:            tuple (best hyper-parameters, TuneReport)

    """
    if budget < 1:
        raise ValueError('budget must be at least 1')
    rng = np.random.RandomState(seed)
    report = TuneReport()
    history = []
    best_score = -np.inf
    for trial in range(budget):
        params = sample_hyperparams(rng)

        def stop(epoch, train_report):
            if epoch + 1 < warmup or not history:
                return False
            previous = [h[epoch] for h in history if len(h) > epoch]
            if not previous:
                return False
            score = _score(train_report, -1)
            return score < np.median(previous)

        _, train_report = train(X, y, num_classes, seed=seed + trial,
                                epoch_callback=stop, **dict(kwargs, **params))
        curve = [_score(train_report, e) for e in
                 range(train_report.epochs)]
        history.append(curve)
        score = curve[-1]
        report.trials.append(dict(params, score=score,
                                  stopped=train_report.stopped_early))
        if not train_report.stopped_early and score > best_score:
            best_score = score
            report.best = params
    if report.best is None:
        report.best = report.trials[0]
        report.best = dict((k, report.best[k]) for k in
                           ('depth', 'width', 'learning_rate', 'batch_size',
                            'epochs'))
    return report.best, report


def _score(report, epoch):
    """Validation accuracy of an epoch, train accuracy without validation."""
    score = report.val_accuracy[epoch]
    if np.isnan(score):
        score = report.train_accuracy[epoch]
    return score
