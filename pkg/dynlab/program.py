"""Command line entry point: argument parsing, merging of the
configuration sources and mapping of failures to exit codes.
"""

import sys
from os import path

import argparse

from .commands import (AnalyzeCommand, ClassifyCommand, EnvelopeCommand,
                       ChainCommand, GalleryCommand, CommandError)
from .env import EnvironmentError, Environment
from .config import Config
from .utils import DynlabError, InvariantViolation, Writer


__all__ = ('main', 'run',)


COMMANDS = {
    'analyze': AnalyzeCommand,
    'classify': ClassifyCommand,
    'envelope': EnvelopeCommand,
    'chain': ChainCommand,
    'gallery': GalleryCommand,
}

VERBOSITY = {'quiet': 1, 'verbose': 3}


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as input errors instead of exiting."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise CommandError(message)


def parse_args(argv):
    """One sub-parser per command, each sharing the verbosity switches,
    ``--config`` and every option of ``Config.OPTIONS``.
    """
    from . import get_version
    parser = ArgumentParser(add_help=True,
        description='Finite-sample diagnostics for topological dynamical '
                    'systems: sensitivity, fragmentation, subshift '
                    'classification, enveloping semigroups and chain '
                    'recurrence.')
    parser.add_argument('--version', action='version', version=get_version())

    shared = ArgumentParser(add_help=False)
    loudness = shared.add_mutually_exclusive_group()
    loudness.add_argument('--verbose', '-v', action='store_true',
                          help='report every step')
    loudness.add_argument('--quiet', '-q', action='store_true',
                          help='report verdicts and errors only')
    shared.add_argument('--config', '-c', metavar='FILE',
                        help='read options from FILE instead of an '
                             'auto-detected .dynlab file')
    Config.setup_arguments(shared.add_argument_group(
        'scales', 'Also accepted in the config file and the system spec; '
                  'a value given here wins over both.'))

    subparsers = parser.add_subparsers(dest='command', title='commands',
                                       parser_class=ArgumentParser)
    for name, cmdclass in sorted(COMMANDS.items()):
        cmd_parser = subparsers.add_parser(
            name, parents=[shared], add_help=True,
            help=cmdclass.__doc__.split('\n')[0])
        cmdclass.setup_arg_parser(
            cmd_parser.add_argument_group('%s arguments' % name))

    options = parser.parse_args(argv[1:])
    if options.command is None:
        # No default command.
        parser.print_usage()
        sys.exit(0)
    return options


def read_config(file):
    """Parse a config file (a filename or an open file) into a
    namespace of configuration values.

    The file holds command line options separated by whitespace; lines
    starting with ``#`` are comments. Only ``Config.OPTIONS`` may appear.
    """
    if hasattr(file, 'read'):
        lines = file.readlines()
        filename = getattr(file, 'name', None)
    else:
        filename = file
        with open(file, 'r', encoding='utf-8') as f:
            lines = f.readlines()

    args = ' '.join(l for l in lines
                    if not l.strip().startswith('#')).split()

    parser = argparse.ArgumentParser(add_help=False)
    Config.setup_arguments(parser)
    try:
        config, unprocessed = parser.parse_known_args(args)
    except SystemExit:
        raise CommandError('invalid value in config file %s' % filename)
    if unprocessed:
        raise CommandError('unsupported config values: %s'
                           % ' '.join(unprocessed))

    if filename:
        Config.rebase_paths(config, path.dirname(path.abspath(filename)))
    return config


def make_env_and_writer(argv):
    """Build the ``(Environment, Writer)`` pair a command runs with.

    The command line wins over the config file, which wins over the
    spec document.
    """
    options = parse_args(argv)

    writer = Writer()
    writer.verbosity = 2
    for flag, level in VERBOSITY.items():
        if getattr(options, flag):
            writer.verbosity = level

    env = Environment(writer)
    config_file = options.config or env.config_file
    if options.config:
        env.config_file = options.config
    elif config_file:
        writer.action('info', 'Using auto-detected config file: %s'
                      % config_file)
    if config_file:
        env.pop_from_config(read_config(config_file))
    # Applied after the config file so the command line overrides it.
    env.pop_from_options(options)

    if getattr(env.options, 'spec', None):
        env.load_spec(env.options.spec)
        writer.action('info', 'Using system spec: %s' % env.options.spec)

    env.init()
    writer.action('info', 'Using registry root: %s' % env.registry_dir)
    return env, writer


def main(argv):
    """Run one command. Returns 0 when the run completed (whatever the
    verdicts), 1 on input errors and 2 when an internal invariant was
    violated.
    """
    try:
        env, writer = make_env_and_writer(argv)
        try:
            COMMANDS[env.options.command](env, writer).execute()
        finally:
            writer.finish()
        return 0
    except InvariantViolation as e:
        print('Invariant violation:', e)
        return 2
    except (CommandError, EnvironmentError, DynlabError) as e:
        print('Error:', e)
        return 1


def run():  # pragma: no cover
    sys.exit(main(sys.argv) or 0)
