# encoding: utf-8
# pylint: skip-file
"""
This file contains tests for the stratopt.processors module.

"""

from __future__ import absolute_import, division, print_function

import os
import argparse
import unittest
import tempfile

import numpy as np

from stratopt.processors import *


def square(x):
    return x * x


class Offset(Processor):

    def __init__(self, offset):
        self.offset = offset

    def process(self, data):
        return data + self.offset


class TestProcessorClass(unittest.TestCase):

    def test_call(self):
        self.assertEqual(Offset(2)(3), 5)
        with self.assertRaises(NotImplementedError):
            Processor()(1)

    def test_dump_load(self):
        f, filename = tempfile.mkstemp()
        os.close(f)
        try:
            Offset(4).dump(filename)
            processor = Processor.load(filename)
        finally:
            os.unlink(filename)
        self.assertIsInstance(processor, Offset)
        self.assertEqual(processor(1), 5)


class TestSequentialProcessorClass(unittest.TestCase):

    def test_values(self):
        processor = SequentialProcessor([Offset(1), square, [Offset(2),
                                                             square]])
        self.assertEqual(len(processor), 3)
        self.assertIsInstance(processor[2], SequentialProcessor)
        # ((2 + 1)^2 + 2)^2
        self.assertEqual(processor(2), 121)
        processor.insert(0, None)
        self.assertEqual(processor(2), 121)
        processor.append(Offset(-21))
        self.assertEqual(processor(2), 100)
        del processor[1]
        self.assertEqual(processor(3), 100)


class TestParallelProcessorClass(unittest.TestCase):

    def test_values(self):
        data = list(range(10))
        result = ParallelProcessor(square)(data)
        self.assertEqual(result, [x * x for x in data])
        # results keep the order of the data
        result = ParallelProcessor([Offset(1), square], num_threads=3)(data)
        self.assertEqual(result, [(x + 1) ** 2 for x in data])
        self.assertEqual(ParallelProcessor(square, num_threads=4)([]), [])

    def test_num_threads(self):
        self.assertEqual(ParallelProcessor(square, 0).num_threads, 1)
        self.assertEqual(ParallelProcessor(square, None).num_threads,
                         ParallelProcessor.NUM_THREADS)

    def test_add_arguments(self):
        parser = argparse.ArgumentParser()
        group = ParallelProcessor.add_arguments(parser, num_threads=2)
        self.assertIsNotNone(group)
        self.assertEqual(parser.parse_args([]).num_threads, 2)
        self.assertEqual(parser.parse_args(['-j', '4']).num_threads, 4)
        parser = argparse.ArgumentParser()
        self.assertIsNone(ParallelProcessor.add_arguments(parser, 0))
