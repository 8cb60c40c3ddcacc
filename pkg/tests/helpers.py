import io
import os
import sys
import json
import glob
import shutil
import tempfile
from os.path import join

import numpy as np

from dynlab import program as dynlab
from dynlab.pseudometrics import Pseudometric
from dynlab.spaces import Interval, SampleCloud


__all__ = ('ProgramTest', 'TempRegistry', 'TestWarnFunc',
           'SystemExitCaught', 'NonZeroReturned', 'matrix_pseudometric',
           'line_cloud',)


class SystemExitCaught(Exception):
    pass


class NonZeroReturned(Exception):
    pass


def mkfile(path, content=''):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(content)


class TestWarnFunc(object):
    """Object that can be passed to the ``warnfunc`` parameter of for
    example f_semigroup_check(), and collects the warnings so we can test
    whether they are in fact generated.
    """
    __test__ = False

    def __init__(self):
        self.logs = []

    def __call__(self, msg, severity):
        print(msg)
        self.logs.append(msg)


class Tee(object):
    """Return a stdout-compatible object that will pipe data written
    into it to all of the file-objects in ``args``."""

    def __init__(self, *args):
        self.args = args

    def write(self, data):
        for f in self.args:
            f.write(data)

    def flush(self):
        pass


def matrix_pseudometric(M, label='matrix'):
    """A pseudometric whose values are read off the matrix ``M`` by
    cloud position.
    """
    M = np.asarray(M, float)
    return Pseudometric(label, lambda points: (lambda I, J: M[I, J]))


def line_cloud(n, r):
    """``n`` evenly spaced points of the unit interval, radius ``r``."""
    return SampleCloud(Interval(), np.linspace(0, 1, n), r)


class TempRegistry(object):
    """A temporary working directory with a run registry that we can run
    our command line tool in.
    """

    def __init__(self, config=None, specs=None):
        self.dir = tempfile.mkdtemp()
        self.registry = self.p('runs')
        if config is not None:
            self.write_config(config)
        for name, spec in (specs or {}).items():
            self.write_spec(name, spec)

    def __del__(self):
        self.delete()

    def delete(self):
        """Delete all the files of this temporary registry.
        """
        if os.path.exists(self.dir):
            shutil.rmtree(self.dir)

    def p(self, *w):
        """Join a path relative to the working directory.
        """
        return join(self.dir, *w)

    def write_config(self, config):
        if isinstance(config, (list, tuple)):
            config = "\n".join(config)
        mkfile(self.p('.dynlab'), config)

    def write_spec(self, name, spec):
        """Write a spec document; ``spec`` may be a dict or raw text."""
        if not isinstance(spec, str):
            spec = json.dumps(spec, indent=2)
        mkfile(self.p(name), spec)
        return self.p(name)

    def runs(self):
        return sorted(glob.glob(self.p('runs', '*', 'manifest.json')))

    def manifest(self, index=-1):
        with open(self.runs()[index], encoding='utf-8') as f:
            return json.load(f)

    def report(self, name, index=-1):
        run_dir = os.path.dirname(self.runs()[index])
        # CSV tables end their lines with \r\n; keep them untranslated.
        with open(join(run_dir, 'reports', name), encoding='utf-8',
                  newline='') as f:
            if name.endswith('.json'):
                return json.load(f)
            return f.read()

    def verdicts(self, index=-1):
        return dict((v['name'], v) for v in self.manifest(index)['verdicts'])

    def program(self, command=None, kwargs={}, expect=None):
        """Run dynlab in this working directory.

        Return the program output.
        """
        args = ['dynlab-test']
        if command:
            args.append(command)
        for k, v in kwargs.items():
            if v is True or not v and v != 0:
                args.append(k)
            else:
                if not isinstance(v, (list, tuple)):
                    # A tuple passes the same argument multiple times.
                    v = [v]
                for w in v:
                    args.append("%s=%s" % (k, w))

        old_cwd = os.getcwd()
        os.chdir(self.dir)
        old_stdout = sys.stdout
        stdout_capture = io.StringIO()
        sys.stdout = Tee(sys.stdout, stdout_capture)
        old_stderr = sys.stderr
        sys.stderr = sys.stdout
        old_registry = os.environ.pop('DYNLAB_REGISTRY', None)
        try:
            try:
                print("Running: %s" % " ".join(args))
                ret = dynlab.main(args)
            except SystemExit as e:
                raise SystemExitCaught('SystemExit raised by program: %s', e)
            else:
                if expect is not None:
                    if ret != expect:
                        raise ValueError(
                            'Program returned code %d, expected %d' % (
                                ret, expect))
                elif ret:
                    raise NonZeroReturned('Program returned non-zero: %d', ret)
                return stdout_capture.getvalue()
        finally:
            os.chdir(old_cwd)
            sys.stdout = old_stdout
            sys.stderr = old_stderr
            if old_registry is not None:
                os.environ['DYNLAB_REGISTRY'] = old_registry


class ProgramTest(object):
    """Base-class for tests that helps with setting up temporary
    registries and having dynlab run in them.
    """

    def setup_registry(self, *args, **kwargs):
        r = TempRegistry(*args, **kwargs)
        self.registries.append(r)
        return r

    def setup_method(self, method):
        self.registries = []

    def teardown_method(self, method):
        for r in self.registries:
            r.delete()
