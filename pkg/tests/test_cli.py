# -*- coding: utf-8 -*-

import os
import glob
import json
from tempfile import TemporaryDirectory

import pandas as pd
import pytest

from gbe60.cli import main, parse_args, str2bool, COMMANDS


def test_parse_args():
    args = parse_args(['sync', '--gamma', '58', '--preamble', '32',
                       '--rs', 'False', '--ebn0', '4', '6'])
    assert args.command == 'sync'
    assert args.gamma == 58
    assert args.preamble == 32
    assert args.rs is False
    assert args.ebn0 == [4.0, 6.0]
    args = parse_args(['flow', '--duration', '1000', '--trace', 'True'])
    assert args.duration == 1000
    assert args.trace is True
    with pytest.raises(SystemExit):
        parse_args(['coverage'])


def test_str2bool():
    assert str2bool('True') and str2bool('1')
    assert not str2bool('no')


def test_link_command(capsys):
    with TemporaryDirectory() as outdir:
        code = main(['link', '--out', outdir, '--distances', '5', '10'])
        assert code == 0
        written = capsys.readouterr().out.split()
        assert len(written) == 1
        table = pd.read_csv(written[0])
        assert list(table['distance_m']) == [5.0, 10.0]
        assert len(glob.glob(os.path.join(outdir, '*.meta.json'))) == 1


def test_frame_command_deterministic():
    with TemporaryDirectory() as a, TemporaryDirectory() as b:
        assert main(['frame', '--out', a, '--seed', '3']) == 0
        assert main(['frame', '--out', b, '--seed', '3']) == 0
        names = sorted(os.listdir(a))
        assert names == sorted(os.listdir(b))
        assert len(names) == 2
        for name in names:
            with open(os.path.join(a, name), 'rb') as fa, \
                    open(os.path.join(b, name), 'rb') as fb:
                assert fa.read() == fb.read()


def test_flow_command_with_trace():
    with TemporaryDirectory() as outdir:
        code = main(['flow', '--out', outdir, '--duration', '50000',
                     '--trace', 'True', '--format', 'json'])
        assert code == 0
        assert len(glob.glob(os.path.join(outdir, 'GBE60_flow_*.json'))) == 2
        assert len(glob.glob(os.path.join(outdir,
                                          'GBE60_flow-trace_*.json'))) == 2


def test_mask_search_command():
    with TemporaryDirectory() as outdir:
        code = main(['mask-search', '--out', outdir, '--candidates', '3'])
        assert code == 0
        path, = glob.glob(os.path.join(outdir, 'GBE60_mask-search_*.csv'))
        assert len(pd.read_csv(path)) == 4


def test_contract_violation_exit_code(capsys):
    with TemporaryDirectory() as outdir:
        code = main(['ber', '--out', outdir, '--gamma', '99'])
        assert code == 2
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err['error'] == 'ConfigurationError'
        assert 'gamma' in err['message']
        assert os.listdir(outdir) == []


def test_scenario_file_errors(capsys):
    with TemporaryDirectory() as outdir:
        path = os.path.join(outdir, 'scenario.json')
        with open(path, 'w') as f:
            json.dump({'gama': 58}, f)
        code = main(['sync', '--scenario', path, '--out', outdir])
        assert code == 2
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert 'gama' in err['message']


def test_every_command_has_help():
    for name in COMMANDS:
        with pytest.raises(SystemExit) as e:
            parse_args([name, '--help'])
        assert e.value.code == 0


def test_ber_command_noise_options():
    with TemporaryDirectory() as outdir:
        path = os.path.join(outdir, 'scenario.json')
        with open(path, 'w') as f:
            json.dump({'target_errors': 1, 'max_bits': 478 * 8 * 8}, f)
        with pytest.warns(UserWarning):
            code = main(['ber', '--scenario', path, '--out', outdir,
                         '--ebn0', 'inf', '--rolloff-filter', 'True',
                         '--measured-degradation', 'True', '--rs', 'False'])
        assert code == 0
        meta_path, = glob.glob(os.path.join(outdir, 'GBE60_ber_*.meta.json'))
        with open(meta_path) as f:
            meta = json.load(f)
        assert meta['summary']['bandwidth_hz'] == 1.09375e9
        assert meta['summary']['impl_degradation_db'] == 3.5
        assert meta['scenario']['noise_bandwidth_hz'] == 1.09375e9
