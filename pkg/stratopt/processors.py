# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
"""
This file contains the processor abstraction the pipeline is built from.

A Processor turns one data item into another. Processors are chained with a
SequentialProcessor (the online solver predicts strategies, then decodes
them) and mapped over many items with a ParallelProcessor (the exploration
solves batches of sampled parameters).

"""

from __future__ import absolute_import, division, print_function

import pickle
import itertools
import multiprocessing as mp

try:
    from collections.abc import MutableSequence
except ImportError:
    from collections import MutableSequence


class Processor(object):
    """
    Base class of all pipeline stages.

    Subclasses implement `process`; instances are callable.

    """

    @classmethod
    def load(cls, infile):
        """
        Load a pickled Processor.

        :param infile: file name or open file
        :return:       Processor

        """
        if not isinstance(infile, str):
            infile.close()
            infile = infile.name
        with open(infile, 'rb') as f:
            return pickle.load(f)

    def dump(self, outfile):
        """
        Pickle the Processor.

        :param outfile: file name or open file

        """
        if not isinstance(outfile, str):
            outfile.close()
            outfile = outfile.name
        with open(outfile, 'wb') as f:
            pickle.dump(self, f, protocol=pickle.HIGHEST_PROTOCOL)

    def process(self, data):
        """
        Process a data item.

        :param data: data item
        :return:     processed data item

        """
        raise NotImplementedError('must be implemented by subclass.')

    def __call__(self, *args):
        return self.process(*args)


def _apply(task):
    """
    Apply a processor (or plain function) to a data item.

    :param task: tuple (processor, data item); a processor of None passes
                 the item through unchanged
    :return:     processed data item

    Note: Module level, so it can be sent to worker processes.

    """
    processor, data = task
    if processor is None:
        return data
    return processor(data)


class SequentialProcessor(MutableSequence, Processor):
    """
    Chain of processors, each one consuming the output of its predecessor.

    :param processors: list of Processor objects or functions; nested lists
                       and tuples become chains themselves

    """

    def __init__(self, processors):
        self.processors = [SequentialProcessor(p)
                           if isinstance(p, (list, tuple)) else p
                           for p in processors]

    def __getitem__(self, index):
        return self.processors[index]

    def __setitem__(self, index, processor):
        self.processors[index] = processor

    def __delitem__(self, index):
        del self.processors[index]

    def __len__(self):
        return len(self.processors)

    def insert(self, index, processor):
        """
        Insert a processor into the chain.

        :param index:     position in the chain
        :param processor: Processor or function

        """
        self.processors.insert(index, processor)

    def process(self, data):
        """
        Run the data item through the chain.

        :param data: data item
        :return:     output of the last processor

        """
        for processor in self.processors:
            data = _apply((processor, data))
        return data


class ParallelProcessor(Processor):
    """
    Apply one processor to every item of a list, optionally with a pool of
    worker processes.

    :param processor:   Processor or module level function; lists and tuples
                        become a SequentialProcessor
    :param num_threads: number of worker processes [None: all CPU cores]

    Note: Results keep the order of the items, so the outcome is the same for
          any number of workers. With more than one worker, the processor and
          the items must be picklable.

    """
    NUM_THREADS = mp.cpu_count()

    def __init__(self, processor, num_threads=1):
        if isinstance(processor, (list, tuple)):
            processor = SequentialProcessor(processor)
        self.processor = processor
        if num_threads is None:
            num_threads = self.NUM_THREADS
        self.num_threads = max(1, int(num_threads))

    def process(self, data):
        """
        Process all data items.

        :param data: iterable of data items
        :return:     list of processed items

        """
        tasks = list(zip(itertools.repeat(self.processor), data))
        if self.num_threads == 1 or len(tasks) < 2:
            return [_apply(task) for task in tasks]
        # one pool per call, a stored pool would make self unpicklable
        pool = mp.Pool(min(self.num_threads, len(tasks)))
        try:
            return pool.map(_apply, tasks)
        finally:
            pool.close()
            pool.join()

    @classmethod
    def add_arguments(cls, parser, num_threads=None):
        """
        Add the worker count option to a parser.

        :param parser:      argparse parser
        :param num_threads: default number of workers [None: all CPU cores]
        :return:            the argument group, None if `num_threads` <= 0
                            (the option is left out then)

        """
        if num_threads is None:
            num_threads = cls.NUM_THREADS
        if num_threads <= 0:
            return None
        g = parser.add_argument_group('parallel processing arguments')
        g.add_argument('-j', '--threads', dest='num_threads', type=int,
                       default=num_threads,
                       help='number of worker processes [default=%(default)s]')
        return g
