"""Test reading and parsing the configuration file.
"""

from io import StringIO

import pytest

from dynlab.config import Config
from dynlab.program import read_config, CommandError


def test_valid_args():
    c = read_config(StringIO('--horizon 32\n--eps-grid 0.5,0.25'))
    assert c.horizon == 32
    assert c.eps_grid == [0.5, 0.25]


def test_eps_grid_sorted_descending():
    c = read_config(StringIO('--eps-grid 0.125,0.5,0.25,0.5'))
    assert c.eps_grid == [0.5, 0.25, 0.125]


def test_invalid_args():
    with pytest.raises(CommandError):
        read_config(StringIO('--horizon 4\n--verbose'))


def test_invalid_value():
    with pytest.raises(CommandError):
        read_config(StringIO('--r -1'))


def test_comments():
    c = read_config(StringIO('''
# This is a comment
--delta 0.01
   # This is a comment with whitespace upfront
'''))
    assert c.delta == 0.01


def test_whitespace():
    """Whitespace in front of lines or at the end is ignored.
    """
    c = read_config(StringIO('''   --tol 0.002  '''))
    assert c.tol == 0.002


def test_only_given_values_are_set():
    """Defaults are not applied by the parser, so a config file does not
    clobber values it does not mention.
    """
    c = read_config(StringIO('--depth 8'))
    assert not hasattr(c, 'horizon')


def test_path_rebase():
    """Paths in the config file are made relative to their location.
    """
    class MockFile(StringIO):
        name = None
        def __init__(self, name, buffer_=None):
            super(MockFile, self).__init__(buffer_)
            self.name = name
    file = MockFile('/opt/study/shared/.dynlab', '''--out ../runs''')
    c = read_config(file)
    assert c.registry_dir == '/opt/study/runs'


def test_coerce_spec_values():
    assert Config.coerce('eps_grid', [0.25, 0.5]) == [0.5, 0.25]
    assert Config.coerce('horizon', 12) == 12
    with pytest.raises(Exception):
        Config.coerce('horizon', -3)
