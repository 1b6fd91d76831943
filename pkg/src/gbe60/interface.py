# -*- coding: utf-8 -*-

'''
Result files of the experiments and scenario files.

Every result table is written as ``GBE60_{experiment}_{fingerprint}.csv``
(or ``.json``) together with a JSON sidecar holding the column attributes,
the global attributes and the full scenario. Outputs hold no timestamps, so
the same scenario and seed give byte-identical files.
'''

import json
import logging
import os
import warnings

import numpy as np
import pandas as pd
from parse import parse

from gbe60.exceptions import ConfigurationError
from gbe60.harness import Scenario, fingerprint
from gbe60.metadata import attrs_for

logger = logging.getLogger(__name__)

fntempl = "GBE60_{experiment}_{fingerprint}.{ext}"
FLOAT_FORMAT = '%.10g'
SIDECAR_EXT = 'meta.json'


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.ndarray, tuple)):
        return list(obj)
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps(obj):
    """Canonical JSON text: sorted keys, fixed indentation, newline."""
    return json.dumps(obj, sort_keys=True, indent=2,
                      default=_json_default) + '\n'


def read_scenario(path=None, **overrides):
    """
    Load a scenario file and apply overrides.

    Parameters
    ----------
    path : str, optional (default: None)
        JSON file with Scenario fields. Defaults are used without a file.
    overrides
        Scenario fields that take precedence over the file; None values are
        ignored.

    Returns
    -------
    scenario : Scenario

    Raises
    ------
    ConfigurationError
        For unreadable files, unknown keys and invalid values.
    """
    if path is None:
        scenario = Scenario()
    else:
        try:
            with open(path, 'r') as f:
                values = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read scenario {path}: {e}")
        scenario = Scenario.from_dict(values)
    return scenario.override(**overrides)


class ResultStore(object):
    """
    Directory of result files.
    """

    def __init__(self, data_path, solve_ambiguity='sort_last',
                 fntempl=fntempl):
        """
        Parameters
        ----------
        data_path : str
            Directory where result files are written to and read from.
        solve_ambiguity : str, optional (default: 'sort_last')
            What to do if several files match a search:
                - error: raises an IOError
                - sort_last (default): uses the last file when sorted by file
                    name
                - sort_first: uses the first file when sorted by file name
        fntempl : str, optional
            File name template with the fields experiment, fingerprint, ext.
        """
        self.data_path = data_path
        self.solve_ambiguity = solve_ambiguity
        self.fntempl = fntempl

    def filename(self, experiment, fingerprint, ext='csv'):
        return os.path.join(self.data_path, self.fntempl.format(
            experiment=experiment, fingerprint=fingerprint, ext=ext))

    def write(self, table, experiment, scenario, fmt='csv', extra=None):
        """
        Write a result table and its sidecar.

        Parameters
        ----------
        table : pd.DataFrame
            Result rows. ``table.attrs`` go into the sidecar.
        experiment : str
            Experiment name, see gbe60.metadata.EXPERIMENTS.
        scenario : Scenario
            Inputs that produced the table.
        fmt : str, optional (default: 'csv')
            'csv' or 'json'.
        extra : dict, optional
            Further sidecar entries.

        Returns
        -------
        path : str
            The data file.
        """
        if fmt not in ('csv', 'json'):
            raise ConfigurationError(f"Unknown format {fmt}, use csv or json")
        os.makedirs(self.data_path, exist_ok=True)

        fp = fingerprint(scenario)
        path = self.filename(experiment, fp, fmt)
        if fmt == 'csv':
            table.to_csv(path, index=False, float_format=FLOAT_FORMAT,
                         lineterminator='\n')
        else:
            with open(path, 'w') as f:
                f.write(table.to_json(orient='records', double_precision=10)
                        + '\n')

        attrs = attrs_for(experiment, scenario)
        columns = {c: attrs.column_attributes.get(c, {}) for c in table.columns}
        sidecar = {'global_attributes': {**attrs.global_attr,
                                         'experiment': experiment,
                                         'fingerprint': fp},
                   'column_attributes': columns,
                   'summary': dict(table.attrs),
                   'scenario': scenario.to_dict()}
        if extra:
            sidecar.update(extra)
        with open(self.filename(experiment, fp, SIDECAR_EXT), 'w') as f:
            f.write(dumps(sidecar))

        logger.info(f"Wrote {len(table)} rows to {path}")
        return path

    def _parse_filename(self, f):
        args = parse(self.fntempl, f)
        if args is None:
            return None
        return args.named

    def search(self, experiment=None, fingerprint=None, ext='csv'):
        """All data files matching the passed fields, sorted by name."""
        found = []
        for curr, subdirs, files in os.walk(self.data_path):
            for f in files:
                args = self._parse_filename(f)
                if args is None or args['ext'] != ext:
                    continue
                if experiment is not None and args['experiment'] != experiment:
                    continue
                if fingerprint is not None and \
                        args['fingerprint'] != fingerprint:
                    continue
                found.append(os.path.join(curr, f))
        return sorted(found)

    def _resolve(self, experiment, fingerprint=None, ext='csv'):
        filename = self.search(experiment, fingerprint, ext)
        if len(filename) == 0:
            raise IOError(f"No {experiment} results found in {self.data_path}")
        if len(filename) > 1:
            if self.solve_ambiguity == 'sort_last':
                warnings.warn(f'Ambiguous results for {experiment} found.'
                              f' Sort and use last: {filename[-1]}, '
                              f'skipped {filename[:-1]}')
                filename = [filename[-1]]
            elif self.solve_ambiguity == 'sort_first':
                warnings.warn(f'Ambiguous results for {experiment} found.'
                              f' Sort and use first: {filename[0]}')
                filename = [filename[0]]
            else:
                raise IOError(
                    "Result search is ambiguous {:}".format(filename))
        return filename[0]

    def read(self, experiment, fingerprint=None, ext='csv'):
        """
        Read a result table and its sidecar.

        Returns
        -------
        table : pd.DataFrame
        meta : dict
        """
        path = self._resolve(experiment, fingerprint, ext)
        args = self._parse_filename(os.path.basename(path))
        if ext == 'csv':
            table = pd.read_csv(path)
        else:
            table = pd.read_json(path, orient='records')

        sidecar = os.path.join(os.path.dirname(path), self.fntempl.format(
            experiment=args['experiment'], fingerprint=args['fingerprint'],
            ext=SIDECAR_EXT))
        meta = {}
        if os.path.exists(sidecar):
            with open(sidecar, 'r') as f:
                meta = json.load(f)
        else:
            warnings.warn(f"No metadata sidecar for {path}")
        return table, meta
