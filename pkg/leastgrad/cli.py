"""
Command-line interface for leastgrad.
"""

import argparse
import logging
import sys

from .core import dump_cut, run_experiment, verify_field
from .errors import ConfigError
from .utils.log_utils import LEVELS, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_BAD_INPUT = 2


def _common(parser):
    parser.add_argument('config', help='path of the TOML experiment config')
    parser.add_argument('-o', '--out', help='output directory (overrides config and LEASTGRAD_OUT)')
    parser.add_argument('--seed', type=int, help='random seed for the randomized checks')
    parser.add_argument('--threads', type=int, help='worker threads for the per-level solves')
    parser.add_argument('--check-filter', action='append', metavar='PATTERN',
                        help='run only checks matching this shell pattern (repeatable)')


def process_args(argv=None):
    """
    Parse command-line arguments.

    Args:
        argv: Argument list; defaults to ``sys.argv[1:]``

    Returns:
        argparse.Namespace: Parsed arguments
    """
    parser = argparse.ArgumentParser(
        prog='leastgrad',
        description='Construct minimizers of weighted least gradient problems level set by '
                    'level set and verify their structural properties.'
    )
    parser.add_argument('--log-level', default='info', choices=sorted(LEVELS),
                        help='logging verbosity')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='run the configured pipeline and checks')
    _common(run)

    verify = sub.add_parser('verify', help='run the field checks on a stored field')
    verify.add_argument('field', help='field file (.csv, or .pgm with its .json sidecar)')
    _common(verify)

    cut = sub.add_parser('dump-cut', help='write one level\'s cut problem in DIMACS format')
    _common(cut)
    cut.add_argument('--level', type=float, help='level value (default: middle of the data range)')
    cut.add_argument('--dimacs', help='output file (default: <out>/cut.dimacs)')

    args = parser.parse_args(argv)
    if args.threads is not None and args.threads < 1:
        parser.error('--threads must be at least 1')
    if args.seed is not None and args.seed < 0:
        parser.error('--seed must be non-negative')
    return args


def _overrides(args):
    return {'out': args.out, 'seed': args.seed, 'threads': args.threads,
            'checks': args.check_filter}


def main(argv=None):
    """
    Main entry point for CLI.

    Returns:
        int: 0 when every check passed, 1 when a check failed, 2 on bad
        input (config or file errors)
    """
    args = process_args(argv)
    setup_logging(args.log_level)
    try:
        if args.command == 'dump-cut':
            path = dump_cut(args.config, level=args.level, out_path=args.dimacs,
                            overrides=_overrides(args))
            print(path)
            return EXIT_OK
        if args.command == 'verify':
            report = verify_field(args.field, args.config, _overrides(args))
        else:
            report = run_experiment(args.config, _overrides(args))
    except (ConfigError, OSError, ValueError) as exc:
        logger.error('%s', exc)
        return EXIT_BAD_INPUT

    for check in report.checks:
        print('{:<28} {}'.format(check.name, check.status))
    return EXIT_OK if report.passed else EXIT_CHECKS_FAILED


if __name__ == '__main__':
    sys.exit(main())
