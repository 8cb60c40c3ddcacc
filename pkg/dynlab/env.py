import os
import json
from argparse import Namespace
from os import path

from .config import Config
from .pseudometrics import Observable, default_eps_grid
from .spaces import (GALLERY, SpaceError, Horizon, make_gallery_system,
                     sample_space, suspension_cloud)
from .symbolic import SubshiftError, subshift_from_document, subshift_cloud
from .utils import DynlabError, Path


__all__ = ('EnvironmentError', 'SpecError', 'Environment', 'SystemDocument',
           'REGISTRY_VARIABLE',)


REGISTRY_VARIABLE = 'DYNLAB_REGISTRY'
CONFIG_NAME = '.dynlab'

SYSTEM_KEYS = ('system', 'params', 'subshift', 'observables', 'base_points',
               'name')


class EnvironmentError(DynlabError):
    pass


class SpecError(EnvironmentError):
    """A system spec document that cannot be used; ``key`` and ``line``
    point at the offending place when known.
    """

    def __init__(self, message, key=None, line=None, filename=None):
        self.key, self.line, self.filename = key, line, filename
        where = []
        if filename:
            where.append(str(filename))
        if line is not None:
            where.append('line %d' % line)
        if key is not None:
            where.append('key "%s"' % key)
        if where:
            message = '%s: %s' % (', '.join(where), message)
        super(SpecError, self).__init__(message)


def find_config_file():
    """Go upwards through the directory hierarchy and return the first
    ``.dynlab`` config file found, or None.
    """
    cur = os.getcwd()
    while True:
        config_path = path.join(cur, CONFIG_NAME)
        if path.isfile(config_path):
            return config_path
        old = cur
        cur = path.normpath(path.join(cur, path.pardir))
        if cur == old:
            break
    return None


class SystemDocument(dict):
    """A parsed system spec: a flat JSON object.

    A bare subshift document (one with a top-level ``kind``) is accepted
    as well and stands for the shift on that subshift.
    """

    def __init__(self, data, filename=None):
        if not isinstance(data, dict):
            raise SpecError('a system spec must be a JSON object',
                            filename=filename)
        if 'kind' in data:
            data = {'system': 'shift', 'subshift': data}
        super(SystemDocument, self).__init__(data)
        self.filename = filename
        known = set(SYSTEM_KEYS) | set(Config.spec_keys())
        for key in self:
            if key not in known:
                raise SpecError('unknown key', key=key, filename=filename)
        if 'system' not in self and 'subshift' not in self:
            raise SpecError('missing required key', key='system',
                            filename=filename)
        if self.get('system', 'shift') not in GALLERY:
            raise SpecError('unknown gallery id: %s' % self['system'],
                            key='system', filename=filename)
        if not isinstance(self.get('params', {}), dict):
            raise SpecError('must be an object', key='params',
                            filename=filename)

    @classmethod
    def load(cls, filename):
        try:
            with open(filename, 'r', encoding='utf-8') as f:
                text = f.read()
        except IOError as e:
            raise SpecError('cannot read spec: %s' % e, filename=filename)
        try:
            data = json.loads(text)
        except ValueError as e:
            raise SpecError(getattr(e, 'msg', str(e)),
                            line=getattr(e, 'lineno', None),
                            filename=filename)
        return cls(data, filename)

    def error(self, message, key):
        return SpecError(message, key=key, filename=self.filename)

    def subshift(self):
        doc = self.get('subshift', self.get('params', {}).get('subshift'))
        if doc is None and self.get('system') == 'morse':
            doc = {'kind': 'morse'}
        if doc is None:
            return None
        if not isinstance(doc, dict):
            raise self.error('must be an object', 'subshift')
        if doc.get('kind') == 'explicit' and not ('left' in doc and
                                                  'right' in doc):
            raise self.error('an explicit generator needs its eventual '
                             'behaviour declared (left and right periodic '
                             'words)', 'subshift')
        try:
            return subshift_from_document(doc)
        except SubshiftError as e:
            raise self.error(str(e), 'subshift')

    def system(self):
        params = dict(self.get('params', {}))
        sub = self.subshift()
        if sub is not None:
            params['subshift'] = sub.label
            params.setdefault('alphabet', [int(a) for a in sub.alphabet])
        try:
            return make_gallery_system(self.get('system', 'shift'), params)
        except (SpaceError, TypeError, ValueError) as e:
            raise self.error(str(e), 'params')

    def observables(self, sys):
        """The registered observables, defaulting to the first
        coordinate (or the symbol at the origin on sequence spaces).
        """
        specs = self.get('observables')
        if not specs:
            if sys.space.kind == 'sequence':
                return [Observable.symbol_at_origin(sys.space)]
            return [Observable.coordinate(0)]
        result = []
        for spec in specs:
            kind = spec.get('kind') if isinstance(spec, dict) else spec
            if kind == 'coordinate':
                index = int(spec.get('index', 0))
                if not 0 <= index < sys.space.dim:
                    raise self.error('coordinate %d out of range' % index,
                                     'observables')
                result.append(Observable.coordinate(index))
            elif kind == 'constant':
                result.append(Observable.constant(float(spec.get('value', 0))))
            elif kind == 'symbol' and sys.space.kind == 'sequence':
                result.append(Observable.symbol_at_origin(sys.space))
            else:
                raise self.error('unsupported observable %r' % (kind,),
                                 'observables')
        return result


class Environment(object):
    """Environment is the main object that holds all the data with
    which we run.

    Usage:

        env = Environment(writer)
        env.pop_from_config(config)
        env.pop_from_options(options)
        env.load_spec(filename)
        env.init()
    """

    def __init__(self, writer):
        self.w = writer
        self.config = Config()
        self.options = Namespace()
        self.registry_dir = None
        self.spec = None
        # Config values set by the config file or the command line; the
        # spec document must not override these.
        self.explicit = set()
        self.config_file = find_config_file()

    def _pull_into(self, namespace, target):
        """If for a value ``namespace`` there exists a corresponding
        attribute on ``target``, then update that attribute with the
        values from ``namespace``, and then remove the value from
        ``namespace``.
        """
        for name in dir(namespace):
            if name.startswith('_'):
                continue
            if name in target.__dict__:
                setattr(target, name, getattr(namespace, name))
                delattr(namespace, name)
                self.explicit.add(name)
        return namespace

    def _pull_into_self(self, namespace):
        if hasattr(namespace, 'registry_dir'):
            self.registry_dir = namespace.registry_dir
            delattr(namespace, 'registry_dir')
        return namespace

    def pop_from_options(self, argparse_namespace):
        """Apply the set of options given on the command line.

        Configuration values end up in ``self.config``, the rest is
        available as ``self.options``.
        """
        rest = self._pull_into_self(argparse_namespace)
        rest = self._pull_into(rest, self.config)
        self.options = rest

    def pop_from_config(self, argparse_namespace):
        rest = self._pull_into_self(argparse_namespace)
        rest = self._pull_into(rest, self.config)
        # Only configuration options can be set in a config file.
        assert rest == Namespace()

    def load_spec(self, filename):
        """Read the system spec and take those scales from it that
        neither the config file nor the command line set.
        """
        self.spec = SystemDocument.load(filename)
        for key, dest in Config.spec_keys().items():
            if key not in self.spec or dest in self.explicit:
                continue
            try:
                value = Config.coerce(dest, self.spec[key])
            except Exception as e:
                raise self.spec.error(str(e), key)
            setattr(self.config, dest, value)
        return self.spec

    def init(self):
        if not self.registry_dir:
            self.registry_dir = os.environ.get(REGISTRY_VARIABLE) or 'runs'
        self.registry_dir = Path(self.registry_dir, base=os.getcwd())

    def path(self, *pargs):
        """Helper that constructs a Path object using the registry root
        as the base."""
        return Path(self.registry_dir, *pargs, base=self.registry_dir)

    @property
    def horizon(self):
        return Horizon(self.config.horizon)

    def system(self):
        if self.spec is None:
            raise EnvironmentError('no system spec loaded')
        sys = self.spec.system()
        self.w.action('info', 'System: %s on %s' % (sys.name,
                                                    sys.space.descriptor))
        return sys

    def cloud(self, sys):
        """The sample cloud the analyses run on, with ``--r`` applied."""
        config = self.config
        sub = self.spec.subshift() if self.spec is not None else None
        try:
            if sys.space.kind == 'sequence':
                if sub is not None:
                    cloud = subshift_cloud(sub, sys.space.window)
                else:
                    cloud = sample_space(sys.space, sys.space.window)
            elif sys.space.kind == 'suspension':
                cloud = suspension_cloud(sys)
            else:
                cloud = sample_space(sys.space, config.density)
        except (SpaceError, SubshiftError) as e:
            raise SpecError(str(e), key='density')
        if config.merge_tol and config.merge_tol > 0:
            cloud = type(cloud).build(cloud.space, cloud.points, cloud.r,
                                      cloud.provenance, config.merge_tol)
        if config.r:
            cloud = cloud.with_radius(config.r)
        self.w.action('info', 'Cloud: %d points, r = %g' % (len(cloud),
                                                            cloud.r))
        return cloud

    def scales(self, cloud):
        """The scale tuple every verdict of a run is indexed by."""
        config = self.config
        eps_grid = config.eps_grid or list(default_eps_grid(cloud.space))
        return {'eps_grid': [float(e) for e in eps_grid],
                'r': float(cloud.r),
                'delta': float(config.delta or 2 * cloud.r),
                'N': int(config.horizon),
                'tol': float(config.tol),
                'depth': int(config.depth)}
