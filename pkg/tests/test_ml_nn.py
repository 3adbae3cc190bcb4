# encoding: utf-8
# pylint: skip-file
"""
This file contains tests for the stratopt.ml.nn module.

"""

from __future__ import absolute_import, division, print_function

import unittest

from stratopt.ml.nn import *

from . import desk_scale


def separable_dataset(num=200):
    X = np.linspace(-1, 1, num).reshape(-1, 1)
    y = (X[:, 0] > 0).astype(int)
    return X, y


class TestTransferFunctions(unittest.TestCase):

    def test_linear(self):
        x = np.array([-1., 2.])
        self.assertTrue(np.allclose(linear(x), x))
        out = np.zeros(2)
        linear(x, out)
        self.assertTrue(np.allclose(out, x))

    def test_relu(self):
        self.assertTrue(np.allclose(relu(np.array([-1., 2.])), [0, 2]))

    def test_softmax(self):
        x = np.array([[1., 2., 3.], [1000., 1000., 1000.]])
        result = softmax(x)
        self.assertTrue(np.allclose(result.sum(axis=1), 1))
        self.assertTrue(np.allclose(result[1], 1 / 3.))
        self.assertTrue(np.allclose(log_softmax(x), np.log(result)))


class TestFeedForwardLayerClass(unittest.TestCase):

    def test_values(self):
        layer = FeedForwardLayer([[1., -1.]], [0., .5])
        self.assertEqual(layer.n_in, 1)
        self.assertEqual(layer.n_out, 2)
        self.assertTrue(np.allclose(layer.activate([2.]), [2, 0]))
        layer = FeedForwardLayer([[1., -1.]], [0., .5], 'linear')
        self.assertTrue(np.allclose(layer.activate([2.]), [2, -1.5]))

    def test_errors(self):
        with self.assertRaises(ValueError):
            FeedForwardLayer([[1., -1.]], [0.])
        with self.assertRaises(ValueError):
            FeedForwardLayer([[1.]], [0.], 'tanh')


class TestNetworkModelClass(unittest.TestCase):

    def setUp(self):
        self.model = NetworkModel.create([2, 5, 3], seed=0)

    def test_create(self):
        self.assertEqual(self.model.dims, [2, 5, 3])
        self.assertEqual(self.model.input_size, 2)
        self.assertEqual(self.model.output_size, 3)
        self.assertEqual([l.transfer_fn for l in self.model.layers],
                         ['relu', 'linear'])
        self.assertTrue(np.allclose(self.model.layers[0].bias, 0))
        limit = np.sqrt(6. / 7)
        self.assertTrue(np.all(np.abs(self.model.layers[0].weights) <=
                               limit))
        # deterministic initialization
        other = NetworkModel.create([2, 5, 3], seed=0)
        self.assertTrue(np.allclose(other.layers[1].weights,
                                    self.model.layers[1].weights))

    def test_forward(self):
        self.assertEqual(self.model.forward([1., 2.]).shape, (3, ))
        self.assertEqual(self.model.forward(np.ones((4, 2))).shape, (4, 3))
        self.assertTrue(np.allclose(self.model([1., 2.]),
                                    forward(self.model, [1., 2.])))
        proba = self.model.predict_proba(np.ones((4, 2)))
        self.assertTrue(np.allclose(proba.sum(axis=1), 1))
        with self.assertRaises(ValueError):
            self.model.forward([1., 2., 3.])

    def test_predict_topk(self):
        model = NetworkModel([FeedForwardLayer([[1., 3., 3., 0.]],
                                               np.zeros(4), 'linear')])
        # ties are ranked by the lower label
        self.assertEqual(model.predict_topk([1.], 3), [1, 2, 0])
        self.assertEqual(predict_topk(model, [1.], 1), [1])
        self.assertEqual(model.predict_topk([-1.], 4), [3, 0, 1, 2])
        with self.assertRaises(ValueError):
            model.predict_topk([1.], 0)
        with self.assertRaises(ValueError):
            model.predict_topk([1.], 5)

    def test_gradients(self):
        rng = np.random.RandomState(1)
        X = rng.randn(6, 2)
        y = np.array([0, 1, 2, 0, 1, 2])
        loss, grads = self.model.gradients(X, y)
        self.assertTrue(np.allclose(loss, self.model.loss(X, y)))
        self.assertEqual(len(grads), 2)
        # finite differences
        h = 1e-6
        for layer, (gw, gb) in zip(self.model.layers, grads):
            for idx in [(0, 0), (1, 2)]:
                w = layer.weights[idx]
                layer.weights[idx] = w + h
                up = self.model.loss(X, y)
                layer.weights[idx] = w - h
                down = self.model.loss(X, y)
                layer.weights[idx] = w
                self.assertTrue(np.allclose((up - down) / (2 * h), gw[idx],
                                            atol=1e-5))
            b = layer.bias[0]
            layer.bias[0] = b + h
            up = self.model.loss(X, y)
            layer.bias[0] = b - h
            down = self.model.loss(X, y)
            layer.bias[0] = b
            self.assertTrue(np.allclose((up - down) / (2 * h), gb[0],
                                        atol=1e-5))

    def test_gradients_all_parameters(self):
        rng = np.random.RandomState(2)
        h = 1e-6
        for seed in range(10):
            model = NetworkModel.create([4, 6, 5, 3], seed=seed)
            for layer in model.layers:
                layer.bias[:] = .1 * rng.randn(layer.n_out)
            X = rng.randn(8, 4)
            y = rng.randint(3, size=8)
            _, grads = model.gradients(X, y)
            for layer, (gw, gb) in zip(model.layers, grads):
                for param, grad in ((layer.weights, gw), (layer.bias, gb)):
                    for idx in np.ndindex(*param.shape):
                        value = param[idx]
                        param[idx] = value + h
                        up = model.loss(X, y)
                        param[idx] = value - h
                        down = model.loss(X, y)
                        param[idx] = value
                        fd = (up - down) / (2 * h)
                        error = abs(fd - grad[idx]) / \
                            max(abs(fd) + abs(grad[idx]), 1e-4)
                        self.assertTrue(error <= 1e-5, (seed, idx))

    def test_argmax(self):
        model = NetworkModel.create([3, 16, 16, 10], seed=0)
        X = np.random.RandomState(0).randn(50, 3)
        self.assertTrue(np.array_equal(
            np.argmax(model.forward(X), axis=1),
            np.argmax(model.predict_proba(X), axis=1)))
        for theta in X[:5]:
            self.assertEqual(model.predict_topk(theta, 1)[0],
                             np.argmax(model.predict_proba(theta)))

    def check_forward_time(self, num_classes):
        from timeit import default_timer
        model = NetworkModel.create([10] + [128] * 15 + [num_classes],
                                    seed=0)
        theta = np.random.RandomState(0).randn(10)
        times = []
        for _ in range(50):
            start = default_timer()
            model.forward(theta)
            times.append(default_timer() - start)
        self.assertTrue(np.median(times) < 1e-3)

    def test_forward_time(self):
        self.check_forward_time(1000)

    @desk_scale
    def test_forward_time_many_classes(self):
        self.check_forward_time(10000)

    def test_copy(self):
        other = self.model.copy()
        other.layers[0].weights[:] = 0
        self.assertFalse(np.allclose(self.model.layers[0].weights, 0))

    def test_errors(self):
        with self.assertRaises(ValueError):
            NetworkModel([])
        with self.assertRaises(ValueError):
            NetworkModel([FeedForwardLayer(np.ones((2, 3)), np.zeros(3)),
                          FeedForwardLayer(np.ones((2, 3)), np.zeros(3))])


class TestSplitDatasetFunction(unittest.TestCase):

    def test_values(self):
        train_idx, val_idx = split_dataset(10, .2, seed=0)
        self.assertEqual(len(train_idx), 8)
        self.assertEqual(len(val_idx), 2)
        self.assertEqual(sorted(np.hstack((train_idx, val_idx))),
                         list(range(10)))
        other = split_dataset(10, .2, seed=0)
        self.assertTrue(np.array_equal(val_idx, other[1]))
        # at least a single training sample
        train_idx, val_idx = split_dataset(1, .5)
        self.assertEqual(len(train_idx), 1)
        self.assertEqual(len(val_idx), 0)
        train_idx, val_idx = split_dataset(2, .9)
        self.assertEqual(len(train_idx), 1)


class TestTrainFunction(unittest.TestCase):

    def test_separable(self):
        X, y = separable_dataset()
        model, report = train(X, y, depth=1, width=8, learning_rate=.1,
                              batch_size=16, epochs=50, seed=0)
        self.assertIsInstance(model, NetworkModel)
        self.assertIsInstance(report, TrainReport)
        self.assertEqual(report.epochs, 50)
        self.assertTrue(report.train_accuracy[-1] >= .9)
        self.assertTrue(report.loss[-1] < report.loss[0])
        self.assertEqual(model.metadata['num_classes'], 2)
        self.assertEqual(model.metadata['num_train'], 160)
        self.assertEqual(model.dims, [1, 8, 2])

    def test_best_epoch(self):
        rng = np.random.RandomState(0)
        X = rng.randn(100, 2)
        y = (X[:, 0] + .5 * rng.randn(100) > 0).astype(int)
        model, report = train(X, y, depth=1, width=8, learning_rate=.2,
                              batch_size=8, epochs=15, seed=1)
        self.assertEqual(report.best_epoch,
                         int(np.argmax(report.val_accuracy)))
        self.assertEqual(model.metadata['best_epoch'], report.best_epoch)
        self.assertEqual(report.to_dict()['best_epoch'], report.best_epoch)
        # the returned network is the one of the best epoch
        _, val_idx = split_dataset(100, VAL_FRACTION, 1)
        accuracy = np.mean(np.argmax(model.forward(X[val_idx]), axis=1) ==
                           y[val_idx])
        self.assertTrue(np.allclose(accuracy,
                                    report.val_accuracy[report.best_epoch]))
        self.assertEqual(max(report.val_accuracy),
                         report.val_accuracy[report.best_epoch])

    def test_full_batch_loss(self):
        # plain gradient descent with a small step never increases the loss
        rng = np.random.RandomState(0)
        X = rng.randn(60, 2)
        y = (X[:, 0] * X[:, 1] > 0).astype(int)
        _, report = train(X, y, depth=1, width=8, learning_rate=1e-3,
                          batch_size=60, epochs=20, momentum=0., seed=0)
        self.assertTrue(np.all(np.diff(report.loss) <= 1e-12))

    def test_determinism(self):
        X, y = separable_dataset(40)
        model, _ = train(X, y, depth=2, width=4, epochs=3, seed=3)
        other, _ = train(X, y, depth=2, width=4, epochs=3, seed=3)
        for layer, layer_ in zip(model.layers, other.layers):
            self.assertTrue(np.array_equal(layer.weights, layer_.weights))

    def test_single_class(self):
        X = np.random.RandomState(0).randn(10, 3)
        model, report = train(X, np.zeros(10, dtype=int))
        self.assertEqual(report.loss, [0.])
        self.assertEqual(model.output_size, 1)
        self.assertEqual(model.predict_topk(X[0], 1), [0])
        self.assertTrue(np.allclose(model.loss(X, np.zeros(10)), 0))

    def test_num_classes(self):
        X, y = separable_dataset(40)
        model, _ = train(X, y, num_classes=4, depth=1, width=4, epochs=1)
        self.assertEqual(model.output_size, 4)

    def test_epoch_callback(self):
        X, y = separable_dataset(40)
        _, report = train(X, y, depth=1, width=4, epochs=10,
                          epoch_callback=lambda epoch, r: epoch == 1)
        self.assertEqual(report.epochs, 2)
        self.assertTrue(report.stopped_early)

    def test_errors(self):
        X, y = separable_dataset(10)
        with self.assertRaises(ValueError):
            train(X, y[:5])
        with self.assertRaises(ValueError):
            train(X, y, num_classes=1)
        with self.assertRaises(ValueError):
            train(np.zeros((0, 1)), [])


class TestSampleHyperparamsFunction(unittest.TestCase):

    def test_values(self):
        rng = np.random.RandomState(0)
        for _ in range(20):
            params = sample_hyperparams(rng)
            self.assertTrue(DEPTH_RANGE[0] <= params['depth'] <=
                            DEPTH_RANGE[1])
            self.assertTrue(WIDTH_RANGE[0] <= params['width'] <=
                            WIDTH_RANGE[1])
            self.assertTrue(LEARNING_RATE_RANGE[0] <=
                            params['learning_rate'] <=
                            LEARNING_RATE_RANGE[1])
            self.assertTrue(BATCH_SIZE_RANGE[0] <= params['batch_size'] <=
                            BATCH_SIZE_RANGE[1])
            self.assertTrue(EPOCHS_RANGE[0] <= params['epochs'] <=
                            EPOCHS_RANGE[1])


class TestTuneFunction(unittest.TestCase):

    def test_values(self):
        X, y = separable_dataset(40)
        best, report = tune(X, y, 3, seed=0)
        self.assertIsInstance(report, TuneReport)
        self.assertEqual(len(report.trials), 3)
        self.assertEqual(set(best), set(['depth', 'width', 'learning_rate',
                                         'batch_size', 'epochs']))
        # the first trial is never stopped
        self.assertFalse(report.trials[0]['stopped'])
        candidates = [t for t in report.trials if not t['stopped']]
        self.assertEqual(max(t['score'] for t in candidates),
                         [t['score'] for t in candidates
                          if t['depth'] == best['depth'] and
                          t['width'] == best['width'] and
                          t['epochs'] == best['epochs']][0])

    def test_errors(self):
        X, y = separable_dataset(10)
        with self.assertRaises(ValueError):
            tune(X, y, 0)
