# -*- coding: utf-8 -*-
"""
Console script for quasi-arithmetic means.

Subcommands evaluate means, compare generators, build envelope generators
of families, project kinked generators and run the verification suites.
JSON goes to stdout, CSV artifacts to the output directory and log records
to stderr.

Exit status is 0 on success, 1 when a certificate or suite fails and 2 on
invalid input.
"""

import argparse
import json
import logging
import os
import sys
from functools import partial

import hiyapyco
from pydantic import ValidationError

from qamean import __version__

from .compare import compare
from .exceptions import InputError, InvalidDescriptor, QAMeanError
from .export import (FLOAT_FORMAT, dumps_json, envelope_frame, generator_frame, read_grid_csv,
                     write_csv, write_json)
from .generator import from_descriptor, normalized_distance, parse_generator
from .grid import Interval
from .lattice_c1 import envelope_generator_c1
from .lattice_smooth import envelope_generator_c2
from .mean import VectorSampler, qa_mean
from .oracle import SUITES, Catalog, run_suite
from .regularize import regularize
from .settings import config, get_run_config, load_config

__author__ = "Moshe Malawach"
__copyright__ = "Moshe Malawach"
__license__ = "mit"

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def parse_interval(text):
    try:
        lo, hi = (float(part) for part in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}") from None
    return lo, hi


def parse_vector(text):
    try:
        return [float(part) for part in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma separated list, got {text!r}") from None


def add_run_options(parser):
    parser.add_argument("--interval", dest="interval", help="working interval as lo,hi", type=parse_interval)
    parser.add_argument("--grid-n", dest="grid_n", help="grid nodes (2**k + 1)", type=int)
    parser.add_argument("--seed", dest="seed", help="seed of the vector sampler", type=int)
    parser.add_argument("-o", "--output", dest="output_path", help="directory for CSV/JSON artifacts")


def parse_args(args):
    """Parse command line parameters

    Args:
      args ([str]): command line parameters as list of strings

    Returns:
      :obj:`argparse.Namespace`: command line parameters namespace
    """
    parser = argparse.ArgumentParser(
        description="Quasi-arithmetic means, comparability and envelope generators")
    parser.add_argument(
        "--version",
        action="version",
        version="qamean {ver}".format(ver=__version__))
    parser.add_argument('-c', '--config', action="store", dest="config_file")
    parser.add_argument(
        "-v",
        "--verbose",
        dest="loglevel",
        help="set loglevel to INFO",
        action="store_const",
        const=logging.INFO)
    parser.add_argument(
        "-vv",
        "--very-verbose",
        dest="loglevel",
        help="set loglevel to DEBUG",
        action="store_const",
        const=logging.DEBUG)
    add_run_options(parser)
    # the same flags after the subcommand; SUPPRESS keeps the global value when absent
    shared = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    add_run_options(shared)

    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True
    add_parser = partial(commands.add_parser, parents=[shared])

    evaluate = add_parser("eval", help="evaluate a mean")
    evaluate.add_argument("--gen", required=True, help="generator: shorthand, JSON or CSV file")
    evaluate.add_argument("--vec", required=True, type=parse_vector, help="arguments as a,b,c")

    comparison = add_parser("compare", help="compare two means")
    comparison.add_argument("--f", required=True, help="lower candidate generator")
    comparison.add_argument("--g", required=True, help="upper candidate generator")
    comparison.add_argument("--method", default="all",
                            choices=["ratio", "convexity", "empirical", "all"])

    for kind in ("sup", "inf"):
        envelope = add_parser(kind, help=f"{kind} envelope generator of a family")
        envelope.add_argument("--family", required=True, help="JSON family file")
        envelope.add_argument("--pathway", default="both", choices=["c2", "c1", "both"])
        envelope.add_argument("--anchor", type=float, help="base point, defaults to the midpoint")

    projection = add_parser("regularize", help="project a kinked generator")
    projection.add_argument("--gen", required=True, help="generator: shorthand, JSON or JSON file")
    projection.add_argument("--direction", default="upper", choices=["upper", "lower", "both"])
    projection.add_argument("--x0", type=float, help="base point")
    projection.add_argument("--order", default="nearest", choices=["nearest", "paired"])

    verify = add_parser("verify", help="run verification suites")
    verify.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    return parser.parse_args(args)


def setup_logging(loglevel):
    """Setup basic logging

    Args:
      loglevel (int): minimum loglevel for emitting messages
    """
    logformat = "[%(asctime)s] %(levelname)s:%(name)s:%(message)s"
    logging.basicConfig(level=loglevel, stream=sys.stderr,
                        format=logformat, datefmt="%Y-%m-%d %H:%M:%S")


def load_generator(text, interval):
    """Generator from shorthand, inline JSON, a JSON descriptor file or a grid CSV."""
    if text.endswith('.csv'):
        return read_grid_csv(text)
    if text.endswith('.json') and os.path.exists(text):
        with open(text) as f:
            return parse_generator(f.read(), interval)
    return parse_generator(text, interval)


def load_family(path, interval):
    """Family file: ``{"interval": [lo, hi], "generators": [...]}`` or a bare list.

    Entries are shorthand strings or descriptors; the file's interval wins
    over the configured one.
    """
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidDescriptor(f"Cannot read family file {path}: {e}") from e
    if isinstance(data, dict):
        if 'interval' in data:
            try:
                interval = Interval(*data['interval'])
            except TypeError as e:
                raise InvalidDescriptor(f"{path}: interval must be [lo, hi], got {data['interval']}") from e
        data = data.get('generators', [])
    if not isinstance(data, list) or not data:
        raise InvalidDescriptor(f"{path} holds no generators")
    family = [parse_generator(entry, interval) if isinstance(entry, str) else from_descriptor(entry, interval)
              for entry in data]
    return family, interval


def fmt(value):
    return FLOAT_FORMAT % value


def cmd_eval(args, run):
    g = load_generator(args.gen, run.working_interval())
    print(fmt(qa_mean(g, args.vec)))
    return EXIT_OK


def cmd_compare(args, run):
    interval = run.working_interval()
    f, g = load_generator(args.f, interval), load_generator(args.g, interval)
    sampler = VectorSampler(seed=run.seed, count=run.vectors, **config.get('sampler', {}))
    relation, verdicts = compare(f, g, method=args.method, sampler=sampler,
                                 eps_mono=run.tolerances.eps_mono, tol_cmp=run.tolerances.tol_cmp,
                                 n=run.grid_n)
    print(dumps_json({'f': f.describe(), 'g': g.describe(), 'relation': relation.value,
                      'verdicts': [json.loads(v.json()) for v in verdicts]}))
    return EXIT_OK


def cmd_envelope(args, run):
    family, interval = load_family(args.family, run.working_interval())
    catalog = Catalog.from_config(interval, config.get('catalog'))
    tolerances = run.tolerances
    results = {}
    if args.pathway in ('c2', 'both'):
        results['c2'] = envelope_generator_c2(family, args.command, n=run.grid_n, anchor=args.anchor,
                                              catalog=catalog, cert_slack=tolerances.cert_slack)
    if args.pathway in ('c1', 'both'):
        results['c1'] = envelope_generator_c1(family, args.command, n=run.grid_n, anchor=args.anchor,
                                              catalog=catalog, refine_tol=tolerances.refine_tol,
                                              max_depth=run.refine_depth, cert_slack=tolerances.cert_slack)
    summary = {'kind': args.command, 'pathway': args.pathway,
               'family': [f.describe() for f in family], 'results': {}}
    certified = True
    for pathway, result in results.items():
        path = os.path.join(run.output_path, f"{args.command}_{pathway}.csv")
        write_csv(envelope_frame(result), path)
        certified = certified and result.certified
        summary['results'][pathway] = {
            'csv': path,
            'certified': result.certified,
            'catalog_bounds': result.catalog_bounds,
            'dominance': [json.loads(c.json()) for c in result.dominance_certificates],
            'minimality': [json.loads(c.json()) for c in result.minimality_certificates],
        }
    if len(results) == 2:
        distance = normalized_distance(results['c1'].generator, results['c2'].generator)
        summary['cross_distance'] = distance
        if distance > tolerances.tol_envelope:
            _logger.error(f"Pathways disagree: normalized distance {distance}")
            certified = False
    summary['certified'] = certified
    print(dumps_json(summary))
    return EXIT_OK if certified else EXIT_FAILED


def cmd_regularize(args, run):
    f = load_generator(args.gen, run.working_interval())
    sampler = VectorSampler(seed=run.seed, count=run.vectors, **config.get('sampler', {}))
    m, trace = regularize(f, args.direction, x0=args.x0, order=args.order, sampler=sampler,
                          tol_cmp=run.tolerances.tol_cmp)
    csv_path = os.path.join(run.output_path, "regularized.csv")
    write_csv(generator_frame(m, n=run.grid_n), csv_path)
    data = trace.to_dict()
    write_json(data, os.path.join(run.output_path, "regularize_trace.json"))
    print(dumps_json({'generator': m.describe(), 'csv': csv_path, 'steps': trace.steps,
                      'certified': trace.certified,
                      'kinks_remaining': data['kinks_remaining'],
                      'pal91_distances': data['pal91_distances']}))
    return EXIT_OK if trace.certified else EXIT_FAILED


def cmd_verify(args, run):
    report = run_suite(args.suite, seed=run.seed, vectors=run.vectors, n=run.grid_n,
                       tolerances=run.tolerances, catalog=config.get('catalog'))
    print(report.to_json())
    return EXIT_OK if report.passed else EXIT_FAILED


COMMANDS = {
    'eval': cmd_eval,
    'compare': cmd_compare,
    'sup': cmd_envelope,
    'inf': cmd_envelope,
    'regularize': cmd_regularize,
    'verify': cmd_verify,
}


def main(args):
    """Main entry point allowing external calls

    Args:
      args ([str]): command line parameter list

    Returns:
      int: exit status
    """
    args = parse_args(args)
    setup_logging(args.loglevel)
    try:
        load_config(args.config_file)
        run = get_run_config(interval=args.interval, grid_n=args.grid_n, seed=args.seed,
                             output_path=args.output_path)
    except (ValidationError, ValueError, OSError, hiyapyco.HiYaPyCoInvocationException) as e:
        _logger.error(f"Invalid configuration: {e}")
        return EXIT_INPUT
    _logger.debug(f"Running {args.command} with {run}")
    try:
        return COMMANDS[args.command](args, run)
    except InputError as e:
        _logger.error(f"Invalid input: {e}")
        return EXIT_INPUT
    except QAMeanError as e:
        _logger.error(f"{args.command} failed: {e}")
        return EXIT_FAILED


def run():
    """Entry point for console_scripts
    """
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
