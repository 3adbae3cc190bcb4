# encoding: utf-8
# pylint: disable=no-member
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
"""
This file contains the end-to-end pipeline.

Offline, parameters are sampled and solved until the strategy exploration
converges, the strategies are pruned, the classifier is trained and the KKT
factorizations of the strategies are cached. Online, the classifier ranks
the strategies of a parameter and the k most likely are decoded, which is
expressed as a chain of processors (StrategyPredictor -> SolutionDecoder).

"""

from __future__ import absolute_import, division, print_function

import os
import sys
import json
import time
import argparse
import contextlib
import warnings

import numpy as np

from .processors import Processor, SequentialProcessor, ParallelProcessor
from .problems import ParametricMIQO, ParameterInstance
from .solvers import SolverError, InfeasibleError, NoFeasibleStrategyError
from .solvers.bnb import solve_miqo
from .solvers.kkt import FactorCache, evaluate_candidates, EPS_INF
from .strategies import Sample, StrategyBank, explore, StrategyWarning
from .strategies.pruning import prune
from .ml.nn import train, tune
from .ml.io import save_model, load_model, model_filenames
from .benchmarks import SamplerSpec, family_module, make_problem
from .evaluation import (EvalRecord, MeanEvaluation, ReportWarning,
                         report_row, emit_report)
from .utils import (OverrideDefaultListAction, ensure_dir, file_hash,
                    read_json, write_json)
from .utils.stats import REPEATS

EXIT_SUCCESS = 0
EXIT_INFEASIBLE = 2
EXIT_FAILURE = 3

# artifact file names
PROBLEM_FILE = 'problem.json'
SAMPLER_FILE = 'sampler.json'
SAMPLES_FILE = 'samples.json'
UNPRUNED_BANK_FILE = 'bank_unpruned.json'
BANK_FILE = 'bank.json'
MODEL_FILE = 'model.npz'
CACHE_FILE = 'cache.npz'
REPORT_FILE = 'train_report.json'
MANIFEST_FILE = 'manifest.json'


class StageError(Exception):
    """
    Exception raised if a pipeline stage fails.

    The `value` is a tuple (stage name, causing exception).

    """
    def __init__(self, value):
        super(StageError, self).__init__(value)
        self.value = value

    @property
    def stage(self):
        """Name of the failed stage."""
        return self.value[0]

    @property
    def error(self):
        """Causing exception."""
        return self.value[1]

    def __str__(self):
        return 'stage %s failed: %s' % (self.value[0], self.value[1])


class ArtifactMismatchError(Exception):
    """
    Exception raised if artifacts do not belong together.

    """
    def __init__(self, value):
        super(ArtifactMismatchError, self).__init__(value)
        self.value = value

    def __str__(self):
        return repr(self.value)


@contextlib.contextmanager
def stage(name, verbose=False):
    """
    Run a pipeline stage, wrapping its failures into a StageError.

    :param name:    name of the stage
    :param verbose: print progress information

    """
    if verbose:
        print('stage %s' % name, file=sys.stderr)
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError((name, e))
    if verbose:
        print('stage %s done in %.2f s' % (name, time.perf_counter() - start),
              file=sys.stderr)


class RunConfig(object):
    """
    Configuration of a pipeline run.

    Values are layered, lowest priority first: the class defaults, a JSON
    configuration file, environment variables prefixed with `STRATOPT_` and
    explicitly given command line arguments.

    """
    ENV_PREFIX = 'STRATOPT_'
    DEFAULTS = {
        'problem': None,
        'sampler': None,
        'family': None,
        'family_config': {},
        'eps': 0.05,
        'beta': 0.05,
        'max_samples': 1000,
        'prune_eps': 1e-3,
        'prune_max_it': 10,
        'k': [1, 10],
        'sizes': [],
        'tune_budget': 1,
        'seed': 0,
        'threads': ParallelProcessor.NUM_THREADS,
        'out': '.',
        'test_samples': 500,
        'heuristic_nodes': 100,
    }

    def __init__(self, **kwargs):
        for key, value in self.DEFAULTS.items():
            setattr(self, key, value.copy() if isinstance(value, (list, dict))
                    else value)
        self.update(kwargs)

    def update(self, values):
        """
        Update the configuration.

        :param values: dictionary
        :return:       the configuration itself
        :raises ValueError: for unknown keys

        """
        unknown = set(values) - set(self.DEFAULTS)
        if unknown:
            raise ValueError('unknown configuration keys: %s' %
                             sorted(unknown))
        for key, value in values.items():
            setattr(self, key, value)
        return self

    @classmethod
    def _convert(cls, key, text):
        default = cls.DEFAULTS[key]
        if isinstance(default, dict):
            return json.loads(text)
        if isinstance(default, list):
            return [int(v) for v in text.split(',') if v]
        if isinstance(default, float):
            return float(text)
        if isinstance(default, int):
            return int(text)
        return text

    def update_env(self, environ=None):
        """
        Update the configuration from environment variables.

        :param environ: environment dictionary [default: os.environ]
        :return:        the configuration itself

        """
        if environ is None:
            environ = os.environ
        values = {}
        for name, text in environ.items():
            if not name.startswith(self.ENV_PREFIX):
                continue
            key = name[len(self.ENV_PREFIX):].lower()
            if key not in self.DEFAULTS:
                raise ValueError('unknown configuration variable %s' % name)
            values[key] = self._convert(key, text)
        return self.update(values)

    def update_file(self, filename):
        """
        Update the configuration from a JSON file.

        :param filename: JSON file name
        :return:         the configuration itself

        """
        return self.update(read_json(filename))

    @classmethod
    def layered(cls, config_file=None, environ=None, overrides=None):
        """
        Create a configuration from all layers.

        :param config_file: JSON configuration file
        :param environ:     environment dictionary [default: os.environ]
        :param overrides:   explicitly given values
        :return:            RunConfig

        """
        cfg = cls()
        if config_file is not None:
            cfg.update_file(config_file)
        cfg.update_env(environ)
        cfg.update(overrides or {})
        return cfg.check()

    def check(self):
        """
        Check the configuration.

        :raises ValueError: for invalid values

        """
        if not 0 < self.eps < 1 or not 0 < self.beta < 1:
            raise ValueError('eps and beta must be in (0, 1)')
        if not self.prune_eps > 0:
            raise ValueError('prune_eps must be positive')
        if not self.k or min(self.k) < 1:
            raise ValueError('k values must be at least 1')
        if self.tune_budget < 1 or self.max_samples < 1 or self.threads < 1:
            raise ValueError('tune_budget, max_samples and threads must be '
                             'positive')
        return self

    def to_dict(self):
        """Dictionary representation."""
        return dict((key, getattr(self, key)) for key in self.DEFAULTS)


# online processors
class Prediction(object):
    """
    Ranked strategy labels of a parameter.

    """

    def __init__(self, theta, labels, time_pred):
        self.theta = theta
        self.labels = labels
        self.time_pred = time_pred


class OnlineSolution(object):
    """
    Solution of the online pipeline.

    :param theta:       ParameterInstance
    :param candidates:  ranked list of Candidate
    :param labels:      predicted strategy labels
    :param time_pred:   prediction time [seconds]
    :param time_decode: decoding time [seconds]
    :param eps_inf:     feasibility tolerance

    """

    def __init__(self, theta, candidates, labels, time_pred, time_decode,
                 eps_inf=EPS_INF):
        self.theta = theta
        self.candidates = candidates
        self.labels = labels
        self.time_pred = time_pred
        self.time_decode = time_decode
        best = candidates[0]
        self.x = best.x
        self.objective = best.objective if not best.failed else np.nan
        self.violation = best.violation if not best.failed else np.nan
        self.label = labels[best.index]
        self.feasible = bool(self.violation <= eps_inf)

    def to_dict(self):
        """Dictionary representation."""
        return {'id': self.theta.id, 'label': self.label,
                'labels': self.labels, 'objective': self.objective,
                'violation': self.violation, 'feasible': self.feasible,
                'time_pred': self.time_pred,
                'time_decode': self.time_decode,
                'x': None if self.x is None else self.x.tolist()}


class StrategyPredictor(Processor):
    """
    Predict the k most likely strategy labels of a parameter.

    :param model: NetworkModel
    :param k:     number of strategies

    """

    def __init__(self, model, k=1):
        self.model = model
        self.k = min(int(k), model.output_size)
        self.label_map = model.metadata.get('label_map',
                                            list(range(model.output_size)))

    def process(self, theta):
        """
        Rank the strategies.

        :param theta: ParameterInstance
        :return:      Prediction

        """
        if not isinstance(theta, ParameterInstance):
            theta = ParameterInstance(theta)
        start = time.perf_counter()
        outputs = self.model.predict_topk(theta.theta, self.k)
        labels = [self.label_map[o] for o in outputs]
        return Prediction(theta, labels, time.perf_counter() - start)


class SolutionDecoder(Processor):
    """
    Decode the predicted strategies and select the best solution.

    :param problem:     ParametricMIQO
    :param bank:        StrategyBank
    :param cache:       FactorCache
    :param eps_inf:     feasibility tolerance
    :param num_threads: number of threads decoding the candidates

    """

    def __init__(self, problem, bank, cache=None, eps_inf=EPS_INF,
                 num_threads=1):
        self.problem = problem
        self.bank = bank
        self.cache = cache
        self.eps_inf = eps_inf
        self.num_threads = num_threads

    def process(self, prediction):
        """
        Decode the predicted strategies.

        :param prediction: Prediction
        :return:           OnlineSolution
        :raises NoFeasibleStrategyError: if no strategy could be decoded

        """
        start = time.perf_counter()
        instance = self.problem.instantiate(prediction.theta)
        strategies = [self.bank[l] for l in prediction.labels]
        candidates = evaluate_candidates(instance, strategies, self.cache,
                                         self.eps_inf, self.num_threads)
        return OnlineSolution(prediction.theta, candidates, prediction.labels,
                              prediction.time_pred,
                              time.perf_counter() - start, self.eps_inf)


class OnlineSolver(SequentialProcessor):
    """
    Online pipeline: strategy prediction followed by solution decoding.

    :param problem: ParametricMIQO
    :param bank:    StrategyBank
    :param model:   NetworkModel
    :param cache:   FactorCache
    :param k:       number of evaluated strategies

    """

    def __init__(self, problem, bank, model, cache=None, k=1,
                 eps_inf=EPS_INF):
        super(OnlineSolver, self).__init__([
            StrategyPredictor(model, k),
            SolutionDecoder(problem, bank, cache, eps_inf)])


# artifacts
def load_inputs(cfg):
    """
    Load (or build) the problem and create the training sampler.

    :param cfg: RunConfig
    :return:    tuple (ParametricMIQO, sampler, SamplerSpec)

    """
    if cfg.sampler is not None:
        spec = SamplerSpec.load(cfg.sampler)
    elif cfg.family is not None:
        spec = SamplerSpec(cfg.family, cfg.family_config, seed=cfg.seed)
    else:
        raise ValueError('a sampler spec or a benchmark family is required')
    if cfg.problem is not None:
        problem = ParametricMIQO.load(cfg.problem)
    else:
        problem = spec.problem()
    return problem, spec.sampler(problem=problem), spec


def save_samples(samples, filename):
    """Save solved samples as JSON file."""
    write_json([s.to_dict() for s in samples], filename)


def load_samples(filename):
    """Load solved samples from a JSON file."""
    return [Sample.from_dict(s) for s in read_json(filename)]


def write_manifest(outdir, problem, bank, cache_file=None):
    """
    Write the hash chain problem -> bank -> model/cache.

    :return: manifest dictionary

    """
    npz_file, _ = model_filenames(os.path.join(outdir, MODEL_FILE))
    manifest = {'problem_hash': problem.problem_hash(),
                'bank_hash': bank.bank_hash(),
                'model_hash': file_hash(npz_file),
                'cache_hash': None if cache_file is None else
                file_hash(cache_file),
                'matrices_parametric': problem.matrices_parametric}
    write_json(manifest, os.path.join(outdir, MANIFEST_FILE))
    return manifest


def load_artifacts(outdir, problem_file=None):
    """
    Load the artifacts of a trained pipeline and check their hash chain.

    :param outdir:       artifact directory
    :param problem_file: problem file [default: the one in outdir]
    :return:             tuple (ParametricMIQO, StrategyBank, NetworkModel,
                         FactorCache or None)
    :raises ArtifactMismatchError: if the artifacts do not belong together

    """
    problem = ParametricMIQO.load(problem_file or
                                  os.path.join(outdir, PROBLEM_FILE))
    bank = StrategyBank.load(os.path.join(outdir, BANK_FILE))
    model = load_model(os.path.join(outdir, MODEL_FILE))
    problem_hash = problem.problem_hash()
    if bank.problem_hash != problem_hash:
        raise ArtifactMismatchError('strategy bank belongs to another problem')
    if model.metadata.get('bank_hash') != bank.bank_hash():
        raise ArtifactMismatchError('model belongs to another strategy bank')
    if model.output_size != len(bank):
        raise ArtifactMismatchError('model has %d outputs, bank %d strategies'
                                    % (model.output_size, len(bank)))
    cache = None
    cache_file = os.path.join(outdir, CACHE_FILE)
    if os.path.exists(cache_file):
        cache = FactorCache.load(cache_file)
        if cache.problem_hash != problem_hash:
            raise ArtifactMismatchError('factor cache belongs to another '
                                        'problem')
    return problem, bank, model, cache


def train_pipeline(problem, sampler, cfg, outdir, verbose=False):
    """
    Run the offline pipeline and write all artifacts.

    :param problem: ParametricMIQO
    :param sampler: parameter sampler (callable by index)
    :param cfg:     RunConfig
    :param outdir:  artifact directory
    :param verbose: print progress information
    :return:        dictionary with the artifacts

    """
    ensure_dir(outdir)
    with stage('explore', verbose):
        samples, unpruned, reason = explore(
            problem, sampler, cfg.eps, cfg.beta, cfg.max_samples,
            num_threads=cfg.threads, verbose=verbose)
        if not samples:
            raise SolverError('no sample could be solved')
        problem.save(os.path.join(outdir, PROBLEM_FILE))
        save_samples(samples, os.path.join(outdir, SAMPLES_FILE))
        unpruned.save(os.path.join(outdir, UNPRUNED_BANK_FILE))
    with stage('prune', verbose):
        bank, labels = prune(problem, samples, unpruned, eps=cfg.prune_eps,
                             max_it=cfg.prune_max_it,
                             num_threads=cfg.threads, verbose=verbose)
        bank.save(os.path.join(outdir, BANK_FILE))
    with stage('train', verbose):
        X = np.array([s.theta.theta for s in samples])
        hyperparams, tune_report = {}, None
        if cfg.tune_budget > 1:
            hyperparams, tune_report = tune(X, labels, cfg.tune_budget,
                                            num_classes=len(bank),
                                            seed=cfg.seed)
        model, report = train(X, labels, num_classes=len(bank),
                              seed=cfg.seed, **hyperparams)
        save_model(model, os.path.join(outdir, MODEL_FILE),
                   label_map=list(range(len(bank))),
                   bank_hash=bank.bank_hash())
        write_json({'train': report.to_dict(),
                    'tune': None if tune_report is None else
                    tune_report.to_dict(),
                    'explore': {'stop_reason': reason,
                                'num_samples': len(samples),
                                'M_unpruned': len(unpruned)}},
                   os.path.join(outdir, REPORT_FILE))
    cache, cache_file = None, None
    with stage('cache', verbose):
        if not problem.matrices_parametric:
            cache = FactorCache.build(problem, bank.strategies)
            cache_file = os.path.join(outdir, CACHE_FILE)
            cache.save(cache_file)
        manifest = write_manifest(outdir, problem, bank, cache_file)
    return {'problem': problem, 'samples': samples, 'unpruned': unpruned,
            'bank': bank, 'model': model, 'report': report, 'cache': cache,
            'manifest': manifest}


# commands
def cmd_train(cfg, verbose=False):
    """
    Run the offline pipeline: explore, prune, (tune and) train, cache.

    :param cfg:     RunConfig
    :param verbose: print progress information
    :return:        dictionary with the artifacts

    """
    with stage('load', verbose):
        problem, sampler, spec = load_inputs(cfg)
        ensure_dir(cfg.out)
        spec.save(os.path.join(cfg.out, SAMPLER_FILE))
    return train_pipeline(problem, sampler, cfg, cfg.out, verbose)


def cmd_explore(cfg, verbose=False):
    """
    Sample and solve parameters until the strategy exploration converges.

    :param cfg:     RunConfig
    :param verbose: print progress information
    :return:        tuple (list of Sample, StrategyBank, stop reason)

    """
    with stage('load', verbose):
        problem, sampler, _ = load_inputs(cfg)
    with stage('explore', verbose):
        samples, bank, reason = explore(problem, sampler, cfg.eps, cfg.beta,
                                        cfg.max_samples,
                                        num_threads=cfg.threads,
                                        verbose=verbose)
        ensure_dir(cfg.out)
        problem.save(os.path.join(cfg.out, PROBLEM_FILE))
        save_samples(samples, os.path.join(cfg.out, SAMPLES_FILE))
        bank.save(os.path.join(cfg.out, UNPRUNED_BANK_FILE))
    return samples, bank, reason


def cmd_prune(cfg, verbose=False):
    """
    Prune the strategies of an explored bank.

    :param cfg:     RunConfig
    :param verbose: print progress information
    :return:        tuple (pruned StrategyBank, labels)

    """
    with stage('load', verbose):
        problem = ParametricMIQO.load(cfg.problem or
                                      os.path.join(cfg.out, PROBLEM_FILE))
        samples = load_samples(os.path.join(cfg.out, SAMPLES_FILE))
        unpruned = StrategyBank.load(os.path.join(cfg.out,
                                                  UNPRUNED_BANK_FILE))
        if unpruned.problem_hash != problem.problem_hash():
            raise ArtifactMismatchError('strategy bank belongs to another '
                                        'problem')
    with stage('prune', verbose):
        bank, labels = prune(problem, samples, unpruned, eps=cfg.prune_eps,
                             max_it=cfg.prune_max_it,
                             num_threads=cfg.threads, verbose=verbose)
        bank.save(os.path.join(cfg.out, BANK_FILE))
    return bank, labels


def solve_online(problem, bank, model, cache, theta, k, oracle=False,
                 heuristic_nodes=None, repeats=1):
    """
    Solve a parameter online and evaluate the solution.

    :param problem:         ParametricMIQO
    :param bank:            StrategyBank
    :param model:           NetworkModel
    :param cache:           FactorCache
    :param theta:           ParameterInstance
    :param k:               number of evaluated strategies
    :param oracle:          solve with the oracle to compute the optimal cost
    :param heuristic_nodes: node limit of the heuristic baseline (None skips
                            the baseline)
    :param repeats:         number of online solves (median timing)
    :return:                tuple (OnlineSolution, EvalRecord)
    :raises NoFeasibleStrategyError: if no strategy could be decoded

    """
    solver = OnlineSolver(problem, bank, model, cache, k)
    solutions = [solver(theta) for _ in range(max(1, repeats))]
    solution = solutions[-1]
    solution.time_pred = float(np.median([s.time_pred for s in solutions]))
    solution.time_decode = float(np.median([s.time_decode for s in
                                            solutions]))
    optimal_cost, time_full, time_heuristic = np.nan, np.nan, np.nan
    if oracle or heuristic_nodes:
        instance = problem.instantiate(theta)
    if oracle:
        result = solve_miqo(instance)
        optimal_cost, time_full = result.objective, result.time
    if heuristic_nodes:
        try:
            time_heuristic = solve_miqo(instance, max_nodes=heuristic_nodes,
                                        incumbent_on_limit=True).time
        except SolverError:
            pass
    record = EvalRecord(theta.id, k, solution.objective, solution.violation,
                        optimal_cost, solution.time_pred,
                        solution.time_decode, time_full, time_heuristic)
    return solution, record


def cmd_solve(cfg, theta, k=None, oracle=False, verbose=False):
    """
    Solve a parameter with the trained pipeline.

    :param cfg:     RunConfig (artifacts are read from `cfg.out`)
    :param theta:   parameter vector
    :param k:       number of evaluated strategies [default: first of cfg.k]
    :param oracle:  also solve with the oracle for the evaluation
    :param verbose: print progress information
    :return:        tuple (OnlineSolution, EvalRecord)

    """
    with stage('load', verbose):
        problem, bank, model, cache = load_artifacts(cfg.out, cfg.problem)
    theta = ParameterInstance(theta, 'cli')
    if k is None:
        k = cfg.k[0]
    try:
        with stage('solve', verbose):
            return solve_online(problem, bank, model, cache, theta, k,
                                oracle)
    except StageError as e:
        if isinstance(e.error, (NoFeasibleStrategyError, InfeasibleError)):
            raise e.error
        raise


def _benchmark_size(cfg, family, size, verbose=False):
    """Train and evaluate one problem size, return the report rows."""
    module = family_module(family)
    family_config = dict(cfg.family_config, **{module.SIZE_PARAM: size})
    outdir = ensure_dir(os.path.join(cfg.out, '%s_%s' % (family, size)))
    spec = SamplerSpec(family, family_config, seed=cfg.seed)
    with stage('build', verbose):
        problem = make_problem(family, family_config)
        sampler = spec.sampler(problem=problem)
        spec.save(os.path.join(outdir, SAMPLER_FILE))
    artifacts = train_pipeline(problem, sampler, cfg, outdir, verbose)
    with stage('test', verbose):
        # a different seed draws id-disjoint test parameters
        test_sampler = spec.sampler(seed=cfg.seed + 1, problem=problem)
        thetas = [test_sampler(i) for i in range(cfg.test_samples)]
        oracle = {}
        for theta in thetas:
            instance = problem.instantiate(theta)
            try:
                full = solve_miqo(instance)
            except SolverError as e:
                warnings.warn('skipping test sample %s: %s' % (theta.id, e),
                              StrategyWarning)
                continue
            try:
                heuristic = solve_miqo(instance,
                                       max_nodes=cfg.heuristic_nodes,
                                       incumbent_on_limit=True).time
            except SolverError:
                heuristic = np.nan
            oracle[theta.id] = (full.objective, full.time, heuristic)
        rows = []
        bank, model, cache = (artifacts['bank'], artifacts['model'],
                              artifacts['cache'])
        for k in cfg.k:
            records = []
            for theta in thetas:
                if theta.id not in oracle:
                    continue
                f_star, t_full, t_heur = oracle[theta.id]
                try:
                    solution, _ = solve_online(problem, bank, model, cache,
                                               theta, k, repeats=REPEATS)
                    objective, infeas = solution.objective, solution.violation
                    t_pred, t_decode = solution.time_pred, solution.time_decode
                except NoFeasibleStrategyError:
                    objective, infeas, t_pred, t_decode = (np.nan,) * 4
                records.append(EvalRecord(theta.id, k, objective, infeas,
                                          f_star, t_pred, t_decode, t_full,
                                          t_heur))
            if verbose:
                print(MeanEvaluation(records, '%s %s k=%d' %
                                     (family, size, k)).tostring(),
                      file=sys.stderr)
            rows.append(report_row(size, module.dimensions(
                module.Config.from_dict(family_config)),
                len(artifacts['unpruned']), len(bank), k, records))
    return rows


def cmd_benchmark(cfg, verbose=False):
    """
    Benchmark the pipeline against the oracle and the node limited oracle
    (heuristic-emulated) over a grid of problem sizes and values of k.

    :param cfg:     RunConfig (with family, sizes and k)
    :param verbose: print progress information
    :return:        tuple (CSV file name, JSON summary file name)

    Note: Stage failures are isolated per problem size; the report is written
          with the remaining rows.

    """
    if cfg.family is None:
        raise StageError(('benchmark', ValueError('a benchmark family is '
                                                  'required')))
    family = cfg.family
    family_module(family)
    ensure_dir(cfg.out)
    sizes = cfg.sizes or [getattr(family_module(family).Config,
                                  family_module(family).SIZE_PARAM)]
    rows, failures = [], {}
    for size in sizes:
        try:
            rows.extend(_benchmark_size(cfg, family, size, verbose))
        except StageError as e:
            warnings.warn('size %s: %s' % (size, e), ReportWarning)
            failures[str(size)] = str(e)
    expected = [(size, k) for size in sizes for k in cfg.k]
    summary = {'family': family, 'baseline': 'heuristic-emulated',
               'config': cfg.to_dict(), 'failures': failures}
    return emit_report(rows, os.path.join(cfg.out, '%s.csv' % family),
                       expected, summary)


def cmd_inspect(cfg, verbose=False):
    """
    Summarize the artifacts of a run.

    :param cfg:     RunConfig (artifacts are read from `cfg.out`)
    :param verbose: print progress information
    :return:        summary dictionary

    """
    with stage('inspect', verbose):
        summary = {}
        problem_file = cfg.problem or os.path.join(cfg.out, PROBLEM_FILE)
        problem = ParametricMIQO.load(problem_file)
        summary['problem'] = {'name': problem.name, 'n': problem.n,
                              'm': problem.m, 'd': problem.d,
                              'p_dim': problem.p_dim,
                              'matrices_parametric':
                                  problem.matrices_parametric,
                              'hash': problem.problem_hash()}
        for key, filename in (('bank_unpruned', UNPRUNED_BANK_FILE),
                              ('bank', BANK_FILE)):
            filename = os.path.join(cfg.out, filename)
            if os.path.exists(filename):
                bank = StrategyBank.load(filename)
                summary[key] = {'M': len(bank), 'hash': bank.bank_hash(),
                                'num_samples': len(bank.labels),
                                'info': bank.info}
        if os.path.exists(os.path.join(cfg.out, MODEL_FILE)):
            model = load_model(os.path.join(cfg.out, MODEL_FILE))
            summary['model'] = {'dims': model.dims,
                                'bank_hash': model.metadata.get('bank_hash')}
        cache_file = os.path.join(cfg.out, CACHE_FILE)
        summary['cache'] = None
        if os.path.exists(cache_file):
            cache = FactorCache.load(cache_file)
            summary['cache'] = {'num_factors': len(cache),
                                'problem_hash': cache.problem_hash}
        for key, filename in (('train_report', REPORT_FILE),
                              ('manifest', MANIFEST_FILE)):
            filename = os.path.join(cfg.out, filename)
            if os.path.exists(filename):
                summary[key] = read_json(filename)
    return summary


# command line interface
def _add_common_arguments(parser, defaults):
    """Arguments shared by all commands."""
    parser.add_argument('--problem', help='problem file (pmiqo-v1 JSON)')
    parser.add_argument('--sampler', help='sampler spec file (JSON)')
    parser.add_argument('--family', choices=['fuel_cell', 'portfolio',
                                             'motion'],
                        help='benchmark family')
    parser.add_argument('--config', help='configuration file (JSON)')
    parser.add_argument('--seed', type=int, help='random seed '
                        '[default=%d]' % defaults.seed)
    parser.add_argument('--out', help='artifact directory '
                        '[default=%s]' % defaults.out)
    parser.add_argument('-v', dest='verbose', action='count', default=0,
                        help='increase verbosity')
    ParallelProcessor.add_arguments(parser, defaults.threads)


def _add_explore_arguments(parser, defaults):
    g = parser.add_argument_group('strategy exploration arguments')
    g.add_argument('--eps', type=float, help='bound on the probability of '
                   'an unseen strategy [default=%g]' % defaults.eps)
    g.add_argument('--beta', type=float, help='confidence parameter '
                   '[default=%g]' % defaults.beta)
    g.add_argument('--max-samples', dest='max_samples', type=int,
                   help='maximum number of samples [default=%d]' %
                   defaults.max_samples)


def _add_prune_arguments(parser, defaults):
    g = parser.add_argument_group('strategy pruning arguments')
    g.add_argument('--prune-eps', dest='prune_eps', type=float,
                   help='relative cost tolerance [default=%g]' %
                   defaults.prune_eps)


def _add_k_argument(parser, defaults):
    parser.add_argument('--k', action=OverrideDefaultListAction, sep=',',
                        type=int, default=list(defaults.k),
                        help='number of evaluated strategies, comma '
                        'separated [default=%s]' %
                        ','.join(str(k) for k in defaults.k))


def parser_factory(defaults=None):
    """
    Create the command line parser.

    :param defaults: RunConfig providing the displayed defaults
    :return:         argparse parser

    """
    if defaults is None:
        defaults = RunConfig()
    p = argparse.ArgumentParser(
        prog='StratOpt', description='''
    Learn the optimal strategies of parametric mixed-integer quadratic
    problems offline and solve new instances online by predicting the
    strategy and decoding the solution with a single linear system solve.
    ''')
    sub = p.add_subparsers(dest='command', title='commands')
    sub.required = True

    sp = sub.add_parser('train', help='run the offline pipeline')
    _add_common_arguments(sp, defaults)
    _add_explore_arguments(sp, defaults)
    _add_prune_arguments(sp, defaults)
    sp.add_argument('--tune-budget', dest='tune_budget', type=int,
                    help='number of hyper-parameter trials [default=%d]' %
                    defaults.tune_budget)
    sp.set_defaults(func=_run_train)

    sp = sub.add_parser('explore', help='sample and collect strategies')
    _add_common_arguments(sp, defaults)
    _add_explore_arguments(sp, defaults)
    sp.set_defaults(func=_run_explore)

    sp = sub.add_parser('prune', help='prune the explored strategies')
    _add_common_arguments(sp, defaults)
    _add_prune_arguments(sp, defaults)
    sp.set_defaults(func=_run_prune)

    sp = sub.add_parser('solve', help='solve a parameter online')
    _add_common_arguments(sp, defaults)
    sp.add_argument('--theta', action=OverrideDefaultListAction, sep=',',
                    type=float, default=[], required=True,
                    help='parameter vector, comma separated')
    _add_k_argument(sp, defaults)
    sp.add_argument('--oracle', action='store_true', default=False,
                    help='also solve with the oracle')
    sp.set_defaults(func=_run_solve)

    sp = sub.add_parser('benchmark', help='benchmark over sizes and k')
    _add_common_arguments(sp, defaults)
    _add_explore_arguments(sp, defaults)
    _add_prune_arguments(sp, defaults)
    _add_k_argument(sp, defaults)
    sp.add_argument('--sizes', action=OverrideDefaultListAction, sep=',',
                    type=int, default=list(defaults.sizes),
                    help='problem sizes, comma separated')
    sp.add_argument('--test-samples', dest='test_samples', type=int,
                    help='number of test samples [default=%d]' %
                    defaults.test_samples)
    sp.set_defaults(func=_run_benchmark)

    sp = sub.add_parser('inspect', help='summarize the artifacts')
    _add_common_arguments(sp, defaults)
    sp.set_defaults(func=_run_inspect)
    return p


def _run_train(cfg, args):
    cmd_train(cfg, args.verbose)
    print('artifacts written to %s' % cfg.out)
    return EXIT_SUCCESS


def _run_explore(cfg, args):
    samples, bank, reason = cmd_explore(cfg, args.verbose)
    print('%d samples, %d strategies (%s)' % (len(samples), len(bank),
                                              reason))
    return EXIT_SUCCESS


def _run_prune(cfg, args):
    bank, _ = cmd_prune(cfg, args.verbose)
    print('%d strategies after pruning' % len(bank))
    return EXIT_SUCCESS


def _run_solve(cfg, args):
    solution, record = cmd_solve(cfg, args.theta, cfg.k[0], args.oracle,
                                 args.verbose)
    print(json.dumps(solution.to_dict(), sort_keys=True))
    if args.oracle:
        print(record.tostring())
    if not solution.feasible:
        print('no feasible candidate, best violation %g' %
              solution.violation, file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_SUCCESS


def _run_benchmark(cfg, args):
    csv_file, json_file = cmd_benchmark(cfg, args.verbose)
    print('report written to %s and %s' % (csv_file, json_file))
    return EXIT_SUCCESS


def _run_inspect(cfg, args):
    print(json.dumps(cmd_inspect(cfg, args.verbose), indent=2,
                     sort_keys=True, default=str))
    return EXIT_SUCCESS


# command line arguments which are not configuration values
_NON_CONFIG = {'command', 'func', 'config', 'verbose', 'num_threads',
               'theta', 'oracle'}


def main(argv=None, environ=None):
    """
    Command line entry point.

    :param argv:    command line arguments [default: sys.argv[1:]]
    :param environ: environment dictionary [default: os.environ]
    :return:        exit code

    """
    # the configuration file and the environment provide the defaults of the
    # command line arguments, hence the file name is parsed beforehand
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument('--config')
    known, _ = pre.parse_known_args(argv)
    try:
        defaults = RunConfig.layered(known.config, environ)
    except (ValueError, IOError) as e:
        print('invalid configuration: %s' % e, file=sys.stderr)
        return EXIT_FAILURE
    parser = parser_factory(defaults)
    args = parser.parse_args(argv)
    overrides = dict((key, value) for key, value in vars(args).items()
                     if key not in _NON_CONFIG and value is not None)
    overrides['threads'] = args.num_threads
    try:
        cfg = RunConfig.layered(args.config, environ, overrides)
    except ValueError as e:
        print('invalid configuration: %s' % e, file=sys.stderr)
        return EXIT_FAILURE
    try:
        return args.func(cfg, args)
    except (NoFeasibleStrategyError, InfeasibleError) as e:
        print('no feasible solution: %s' % e, file=sys.stderr)
        return EXIT_INFEASIBLE
    except StageError as e:
        if isinstance(e.error, (NoFeasibleStrategyError, InfeasibleError)):
            print(str(e), file=sys.stderr)
            return EXIT_INFEASIBLE
        print(str(e), file=sys.stderr)
        return EXIT_FAILURE
    except ArtifactMismatchError as e:
        print('stage load failed: %s' % e, file=sys.stderr)
        return EXIT_FAILURE
