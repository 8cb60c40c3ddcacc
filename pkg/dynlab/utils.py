"""Shared plumbing: the error base class, the terminal ``Writer`` and a
few file helpers used by the run registry.
"""

import os
import sys
import json
import hashlib
import tempfile
from os import path

import colorama
from termcolor import colored


__all__ = ('DynlabError', 'InvariantViolation', 'Path', 'Writer',
           'PropertyResult', 'dummy_warn', 'atomic_write', 'stable_hash',
           'to_jsonable',)


class DynlabError(Exception):
    """Base class of every error raised by the library."""


class InvariantViolation(DynlabError):
    """An internal consistency check failed (for example a fragmentation
    kernel disagreeing with its brute-force oracle). The command line
    maps this to exit code 2.
    """


# Library functions that want to report non-fatal diagnostics take a
# ``warnfunc(message, severity)`` callback; this is the silent default.
dummy_warn = lambda message, severity=None: None


def stable_hash(document, length=12):
    """Return a short hex digest of a JSON-compatible document. Keys are
    sorted so equal documents always hash equally.
    """
    data = json.dumps(to_jsonable(document), sort_keys=True,
                      separators=(',', ':'))
    return hashlib.sha1(data.encode('utf-8')).hexdigest()[:length]


def to_jsonable(value):
    """Convert numpy scalars/arrays, tuples, sets and report objects
    (anything with ``as_dict``) into plain JSON-compatible values.
    """
    import numpy as np
    if hasattr(value, 'as_dict'):
        return to_jsonable(value.as_dict())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value != value:
            return 'nan'
        if value in (float('inf'), float('-inf')):
            return 'inf' if value > 0 else '-inf'
        return value
    return value


def atomic_write(filename, content):
    """Write ``content`` (str) to ``filename`` by writing a temporary
    file in the same directory and renaming it into place.
    """
    directory = path.dirname(filename)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.tmp-')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as f:
            f.write(content)
        os.replace(tmp, filename)
    except BaseException:
        if path.exists(tmp):
            os.unlink(tmp)
        raise


class Path(str):
    """A filesystem path that can be "bound" to a base directory (the
    registry root) and rendered relative to it.
    """

    def __new__(cls, *parts, **kwargs):
        base = kwargs.pop('base', None)
        if kwargs:
            raise TypeError('unexpected arguments: %s' % ', '.join(kwargs))
        self = str.__new__(cls, path.normpath(path.abspath(path.join(*parts))))
        self.base = base
        return self

    @property
    def rel(self):
        """This path relative to the base it was bound to."""
        return path.relpath(self, start=self.base or os.getcwd())

    def exists(self):
        return path.exists(self)

    @property
    def dir(self):
        return Path(path.dirname(self), base=self.base)

    def join(self, *parts):
        return Path(self, *parts, base=self.base)


class Writer(object):
    """Terminal output made of tagged *actions*, each optionally followed
    by indented *messages*.

    An action carries an event (``verdict``, ``written`` ...); both
    events and messages have a severity that picks the colour and,
    against ``verbosity``, whether the line is shown. A visible message
    pulls its hidden action onto the screen with it.

    ``begin()`` starts an action whose event is only known later; its
    messages queue up until ``done()``.
    """

    # Event types and their default severity.
    EVENTS = {
        'info': 'info',
        'mkdir': 'default',
        'written': 'default',
        'verdict': 'default',
        'listed': 'default',
        'unknown': 'warning',
        'skipped': 'warning',
        'failed': 'error',
    }

    # Severities and the minimum verbosity needed to show them.
    LEVELS = {'default': 2, 'warning': 1, 'error': 0, 'info': 3}

    STYLES = {
        'default': {'color': 'blue'},
        'warning': {'color': 'magenta'},
        'error': {'color': 'red'},
    }

    # "[event]" plus one column of padding.
    TAG_WIDTH = max(len(k) for k in EVENTS) + 3

    class Action(dict):

        def __init__(self, writer, text='', **data):
            dict.__init__(self, text=text, status=None, severity=None,
                          event=None)
            self.set(**data)
            self.writer = writer
            self.queued = []
            self.is_done = False
            self.shown = False

        def set(self, severity=None, **data):
            if severity is not None:
                assert severity in Writer.LEVELS, 'Not a valid severity value'
                self['severity'] = severity
            self.update(data)

        @property
        def event(self):
            return self['event']

        @property
        def severity(self):
            return self['severity'] or Writer.EVENTS[self.event]

        def message(self, message, severity='info'):
            writer = self.writer
            if severity == 'error':
                writer.erroneous = True
            if not writer.allowed(severity):
                return
            if not self.is_done:
                self.queued.append((message, severity))
                return
            if not self.shown:
                writer._show(self)
            writer._print_message(message, severity)

        def done(self, event, **data):
            assert event in Writer.EVENTS, 'Not a valid event type'
            self.set(event=event, **data)
            self.is_done = True
            self.writer._complete(self)

    def __init__(self, verbosity=LEVELS['default'], stream=None):
        colorama.init()
        self.verbosity = verbosity
        self.erroneous = False
        self._stream = stream
        self._pending = []
        self._last = None

    @property
    def stdout(self):
        # Looked up late so tests can swap sys.stdout.
        return self._stream or sys.stdout

    def allowed(self, severity):
        return self.verbosity >= self.LEVELS[severity]

    def action(self, event, *a, **kw):
        action = Writer.Action(self, *a, **kw)
        action.done(event)
        return action

    def begin(self, *a, **kw):
        action = Writer.Action(self, *a, **kw)
        self._pending.append(action)
        return action

    def message(self, *a, **kw):
        """Attach a message to the last completed action."""
        self._last.message(*a, **kw)

    def finish(self):
        """Fail every action that was begun but never completed."""
        while self._pending:
            self._pending[0].done('failed')

    def _complete(self, action):
        if action in self._pending:
            self._pending.remove(action)
        if action.severity == 'error':
            self.erroneous = True
        if self.allowed(action.severity) or action.queued:
            self._show(action)
        self._last = action

    def _style(self, action):
        if action.event == 'verdict':
            return {'color': 'green'}
        if action.event == 'info':
            return {}
        return self.STYLES.get(action.severity, {})

    def _show(self, action):
        text = action['text']
        if isinstance(text, Path):
            text = text.rel
        if action['status']:
            text = '%s (%s)' % (text, action['status'])
        style = self._style(action)
        tag = '%*s' % (self.TAG_WIDTH, '[%s]' % action.event)
        self.stdout.write('%s %s\n' % (colored(tag, attrs=['bold'], **style),
                                       colored(str(text), **style)))
        for message, severity in action.queued:
            self._print_message(message, severity)
        action.queued = []
        action.shown = True

    def _print_message(self, message, severity):
        line = '%s- %s' % (' ' * (self.TAG_WIDTH + 1), message)
        self.stdout.write(colored(line, **self.STYLES.get(severity, {})))
        self.stdout.write('\n')


class PropertyResult(object):
    """Outcome of a property test: ``pass``, ``fail`` or ``unknown``,
    with a free-form ``detail`` mapping for the report.
    """

    STATUSES = ('pass', 'fail', 'unknown')

    def __init__(self, name, status, **detail):
        assert status in self.STATUSES, 'Not a valid status'
        self.name = name
        self.status = status
        self.detail = detail

    def __bool__(self):
        return self.status == 'pass'

    def __repr__(self):
        return '<PropertyResult %s: %s>' % (self.name, self.status)

    def as_dict(self):
        return dict(property=self.name, status=self.status, **self.detail)
