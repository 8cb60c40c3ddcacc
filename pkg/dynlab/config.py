from os import path
import argparse


__all__ = ('Config',)


def positive(type):
    def check(string):
        errstr = "must be a positive number, not %r" % string
        try:
            value = type(string)
        except ValueError:
            raise argparse.ArgumentTypeError(errstr)
        if value <= 0:
            raise argparse.ArgumentTypeError(errstr)
        return value
    check.__name__ = type.__name__
    return check


def nonnegative_int(string):
    errstr = "must be a nonnegative integer, not %r" % string
    try:
        value = int(string)
    except ValueError:
        raise argparse.ArgumentTypeError(errstr)
    if value < 0:
        raise argparse.ArgumentTypeError(errstr)
    return value


def eps_list(string):
    """A comma separated list of positive reals, e.g. ``0.5,0.25,0.125``.
    """
    errstr = "must be a comma separated list of positive numbers, not %r" \
        % string
    try:
        values = [float(v) for v in string.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(errstr)
    if not values or min(values) <= 0:
        raise argparse.ArgumentTypeError(errstr)
    return sorted(set(values), reverse=True)


class Config(object):
    """Defines all the options supported by our configuration system.

    Values come from three sources, weakest first: the system spec
    document, a config file and the command line.
    """
    OPTIONS = (
        {'name': 'eps-grid',
         'help': 'comma separated epsilon scales (default: diameter '
                 'times 2^-k, k=1..10)',
         'dest': 'eps_grid',
         'default': None,
         'spec_key': 'eps_grid',
         'kwargs': {'metavar': 'LIST', 'type': eps_list}
        },
        {'name': 'r',
         'help': 'ball radius standing in for open sets (default: the '
                 'covering radius of the cloud)',
         'dest': 'r',
         'default': None,
         'spec_key': 'r',
         'kwargs': {'metavar': 'REAL', 'type': positive(float)}
        },
        {'name': 'delta',
         'help': 'chain step for the recurrence analysis (default: twice '
                 'the cloud radius)',
         'dest': 'delta',
         'default': None,
         'spec_key': 'delta',
         'kwargs': {'metavar': 'REAL', 'type': positive(float)}
        },
        {'name': 'horizon',
         'help': 'orbit horizon N, iterates -N..N are used',
         'dest': 'horizon',
         'default': 16,
         'spec_key': 'horizon',
         'kwargs': {'metavar': 'INT', 'type': nonnegative_int}
        },
        {'name': 'tol',
         'help': 'sup distance below which iterates are identified in '
                 'the envelope',
         'dest': 'tol',
         'default': 1e-3,
         'spec_key': 'tol',
         'kwargs': {'metavar': 'REAL', 'type': positive(float)}
        },
        {'name': 'depth',
         'help': 'search depth of the subshift classifier and the '
                 'two-arrows verification',
         'dest': 'depth',
         'default': 64,
         'spec_key': 'depth',
         'kwargs': {'metavar': 'INT', 'type': positive(int)}
        },
        {'name': 'density',
         'help': 'grid density of the sample cloud',
         'dest': 'density',
         'default': 64,
         'spec_key': 'density',
         'kwargs': {'metavar': 'INT', 'type': positive(int)}
        },
        {'name': 'merge-tol',
         'help': 'sample points closer than this are merged',
         'dest': 'merge_tol',
         'default': 0.0,
         'spec_key': 'merge_tol',
         'kwargs': {'metavar': 'REAL', 'type': float}
        },
        {'name': 'out',
         'help': 'registry root the run bundles are written to ($%s or '
                 './runs by default)' % 'DYNLAB_REGISTRY',
         'dest': 'registry_dir',
         'kwargs': {'metavar': 'DIR'}
         # No default, resolved by the environment.
        },
        {'name': 'threads',
         'help': 'number of analysis tasks run in parallel; results do '
                 'not depend on it',
         'dest': 'threads',
         'default': 1,
         'kwargs': {'metavar': 'INT', 'type': positive(int)}
        },
    )

    def __init__(self):
        """Initialize all configuration values with a default.

        Defaults are not handed to argparse: with several configuration
        sources, a default from one source must never override a real
        value from another.
        """
        for optdef in self.OPTIONS:
            if 'default' in optdef:
                setattr(self, optdef['dest'], optdef['default'])

    @classmethod
    def setup_arguments(cls, parser):
        """Setup our configuration values as arguments in the ``argparse``
        object in ``parser``.
        """
        for optdef in cls.OPTIONS:
            names = ('--%s' % optdef.get('name'),)
            kwargs = {
                'help': optdef.get('help', None),
                'dest': optdef.get('dest', None),
                'default': argparse.SUPPRESS,
            }
            kwargs.update(optdef.get('kwargs', {}))
            parser.add_argument(*names, **kwargs)

    @classmethod
    def spec_keys(cls):
        """Map of system spec document keys to config attributes."""
        return dict((o['spec_key'], o['dest']) for o in cls.OPTIONS
                    if 'spec_key' in o)

    @classmethod
    def coerce(cls, dest, value):
        """Run a spec document value through the option's type check."""
        for optdef in cls.OPTIONS:
            if optdef['dest'] != dest:
                continue
            type = optdef.get('kwargs', {}).get('type')
            if type is None or value is None:
                return value
            if type is eps_list and isinstance(value, (list, tuple)):
                value = ','.join(map(str, value))
            return type(str(value))
        raise KeyError(dest)

    @classmethod
    def rebase_paths(cls, config, base_path):
        """Make those config values that are paths relative to
        ``base_path``, because by default, paths are relative to
        the current working directory.
        """
        for name in ('registry_dir',):
            value = getattr(config, name, None)
            if value is not None:
                setattr(config, name, path.normpath(path.join(base_path, value)))
