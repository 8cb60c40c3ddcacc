"""Environment handling: which config file is used, how the spec
document, the config file and the command line are merged, where the
registry lives and how bad spec documents are reported.
"""

import os

import pytest

from dynlab.env import SpecError, SystemDocument
from tests.helpers import ProgramTest, NonZeroReturned


ROTATION = {'system': 'rotation', 'params': {'alpha': 0.25}, 'density': 8,
            'horizon': 4}


class TestSpecDocument(object):

    def test_unknown_key(self):
        with pytest.raises(SpecError) as e:
            SystemDocument({'system': 'rotation', 'colour': 'red'})
        assert e.value.key == 'colour'

    def test_unknown_system(self):
        with pytest.raises(SpecError) as e:
            SystemDocument({'system': 'baker'})
        assert e.value.key == 'system'

    def test_json_error_has_line(self, tmp_path):
        filename = tmp_path / 'bad.json'
        filename.write_text('{\n  "system": "rotation",\n  "params": {,}\n}')
        with pytest.raises(SpecError) as e:
            SystemDocument.load(str(filename))
        assert e.value.line == 3
        assert 'line 3' in str(e.value)

    def test_bare_subshift_document(self):
        doc = SystemDocument({'kind': 'sft', 'forbidden': ['11']})
        assert doc['system'] == 'shift'
        assert doc.subshift().kind == 'sft'

    def test_explicit_without_behaviour(self):
        doc = SystemDocument({'kind': 'explicit', 'center': '1'})
        with pytest.raises(SpecError) as e:
            doc.subshift()
        assert e.value.key == 'subshift'

    def test_bad_params(self):
        doc = SystemDocument({'system': 'rotation', 'params': {'alpha': 2}})
        with pytest.raises(SpecError) as e:
            doc.system()
        assert e.value.key == 'params'

    def test_default_observables(self):
        doc = SystemDocument(ROTATION)
        [f] = doc.observables(doc.system())
        assert f.label == 'x0'


class TestConfig(ProgramTest):

    def test_spec_scales_are_used(self):
        r = self.setup_registry(specs={'rot.json': ROTATION})
        r.program('chain', {'--spec': 'rot.json'})
        assert r.manifest()['scales']['N'] == 4

    def test_config_file_beats_spec(self):
        r = self.setup_registry(config='--horizon 6',
                                specs={'rot.json': ROTATION})
        r.program('chain', {'--spec': 'rot.json'})
        assert r.manifest()['scales']['N'] == 6

    def test_command_line_beats_config_file(self):
        r = self.setup_registry(config='--horizon 6',
                                specs={'rot.json': ROTATION})
        r.program('chain', {'--spec': 'rot.json', '--horizon': 2})
        assert r.manifest()['scales']['N'] == 2

    def test_invalid_config_file(self):
        r = self.setup_registry(config='--no-such-option',
                                specs={'rot.json': ROTATION})
        assert 'Error' in r.program('chain', {'--spec': 'rot.json'},
                                    expect=1)


class TestRegistry(ProgramTest):

    def test_default_root(self):
        r = self.setup_registry(specs={'rot.json': ROTATION})
        r.program('chain', {'--spec': 'rot.json'})
        assert len(r.runs()) == 1

    def test_out_option(self):
        r = self.setup_registry(specs={'rot.json': ROTATION})
        r.program('chain', {'--spec': 'rot.json', '--out': 'elsewhere'})
        assert os.path.isdir(r.p('elsewhere'))
        assert not r.runs()

    def test_environment_variable(self, monkeypatch):
        from dynlab.program import main
        r = self.setup_registry(specs={'rot.json': ROTATION})
        # The helper hides the variable, so call main directly.
        monkeypatch.setenv('DYNLAB_REGISTRY', r.p('from-env'))
        monkeypatch.chdir(r.dir)
        assert main(['dynlab', 'chain', '--spec', 'rot.json']) == 0
        assert os.path.isdir(r.p('from-env'))

    def test_append_only(self):
        """A second identical run gets its own bundle."""
        r = self.setup_registry(specs={'rot.json': ROTATION})
        r.program('chain', {'--spec': 'rot.json'})
        r.program('chain', {'--spec': 'rot.json'})
        assert len(r.runs()) == 2
        assert r.manifest(0)['run_id'] != r.manifest(1)['run_id']

    def test_missing_spec_file(self):
        r = self.setup_registry()
        with pytest.raises(NonZeroReturned):
            r.program('chain', {'--spec': 'nothing.json'})
