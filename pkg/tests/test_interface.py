# -*- coding: utf-8 -*-

import os
import json
import glob
from tempfile import TemporaryDirectory

import numpy as np
import numpy.testing as nptest
import pandas as pd
import pytest

from gbe60.exceptions import ConfigurationError
from gbe60.harness import Scenario, fingerprint
from gbe60.interface import ResultStore, read_scenario, dumps


def _table():
    table = pd.DataFrame({'distance_m': [1.0, 5.0],
                          'received_power_dbm': [-23.21, -37.19],
                          'fingerprint': ['abc', 'abc']})
    table.attrs['range_coded_m'] = 41.5
    return table


def test_write_read_roundtrip():
    scenario = Scenario(seed=4)
    with TemporaryDirectory() as outdir:
        store = ResultStore(outdir)
        path = store.write(_table(), 'link', scenario)
        fp = fingerprint(scenario)
        assert os.path.basename(path) == f'GBE60_link_{fp}.csv'
        assert os.path.exists(os.path.join(outdir,
                                           f'GBE60_link_{fp}.meta.json'))

        table, meta = store.read('link')
        nptest.assert_allclose(table['received_power_dbm'], [-23.21, -37.19])
        assert meta['global_attributes']['experiment'] == 'link'
        assert meta['global_attributes']['fingerprint'] == fp
        assert meta['summary'] == {'range_coded_m': 41.5}
        assert meta['column_attributes']['distance_m']['units'] == 'm'
        assert Scenario.from_dict(meta['scenario']) == scenario


def test_json_format_and_hyphenated_experiment():
    scenario = Scenario()
    with TemporaryDirectory() as outdir:
        store = ResultStore(outdir)
        report = pd.DataFrame({'candidate': [0, 1], 'max_score': [40, 37]})
        store.write(report, 'mask-search', scenario, fmt='json')
        found = store.search('mask-search', ext='json')
        assert len(found) == 1
        table, _ = store.read('mask-search', ext='json')
        assert list(table['max_score']) == [40, 37]
        with pytest.raises(ConfigurationError):
            store.write(report, 'mask-search', scenario, fmt='parquet')


def test_byte_identical_outputs():
    scenario = Scenario()
    with TemporaryDirectory() as a, TemporaryDirectory() as b:
        for outdir in (a, b):
            ResultStore(outdir).write(_table(), 'link', scenario)
        for name in os.listdir(a):
            with open(os.path.join(a, name), 'rb') as fa, \
                    open(os.path.join(b, name), 'rb') as fb:
                assert fa.read() == fb.read()


def test_ambiguous_results():
    with TemporaryDirectory() as outdir:
        store = ResultStore(outdir)
        store.write(_table(), 'link', Scenario(seed=1))
        store.write(_table(), 'link', Scenario(seed=2))
        with pytest.warns(UserWarning):
            store.read('link')
        with pytest.raises(IOError):
            ResultStore(outdir, solve_ambiguity='error').read('link')
        fp = fingerprint(Scenario(seed=2))
        _, meta = store.read('link', fingerprint=fp)
        assert meta['scenario']['seed'] == 2
        with pytest.raises(IOError):
            store.read('flow')


def test_missing_sidecar():
    with TemporaryDirectory() as outdir:
        store = ResultStore(outdir)
        store.write(_table(), 'link', Scenario())
        for f in glob.glob(os.path.join(outdir, '*.meta.json')):
            os.remove(f)
        with pytest.warns(UserWarning):
            _, meta = store.read('link')
        assert meta == {}


def test_read_scenario():
    with TemporaryDirectory() as outdir:
        path = os.path.join(outdir, 'scenario.json')
        with open(path, 'w') as f:
            json.dump({'name': 'hallway', 'gamma': 58,
                       'link': {'distances_m': [10, 20]}}, f)
        scenario = read_scenario(path, gamma=60, seed=None)
        assert scenario.name == 'hallway'
        assert scenario.gamma == 60
        assert scenario.link.distances_m == (10.0, 20.0)

        with open(path, 'w') as f:
            f.write('{"gamma": ')
        with pytest.raises(ConfigurationError):
            read_scenario(path)
        with pytest.raises(ConfigurationError):
            read_scenario(os.path.join(outdir, 'missing.json'))
    assert read_scenario() == Scenario()


def test_dumps_canonical():
    text = dumps({'b': np.int64(2), 'a': (np.float64(0.5), np.bool_(True))})
    assert text == '{\n  "a": [\n    0.5,\n    true\n  ],\n  "b": 2\n}\n'
