# -*- coding: utf-8 -*-
"""
Command line interface to run the gbe60 experiments and write their result
files.
"""

import sys
import json
import logging
import argparse
from dataclasses import asdict

import pandas as pd

from gbe60.exceptions import Gbe60Error
from gbe60.harness import (run_ber, records_to_frame, run_sync_experiment,
                           run_link_model, run_flow_sim, run_mask_search,
                           run_frame_roundtrip)
from gbe60.interface import ResultStore, read_scenario
from gbe60.modem import ROLLOFF_BANDWIDTH_HZ, measured_degradation_db

COMMANDS = {
    'ber': 'Monte Carlo BER over an Eb/N0 grid through the full chain.',
    'sync': 'Miss and false alarm probabilities of the frame synchronizer.',
    'link': 'Received power, Eb/N0 and model BER versus distance.',
    'flow': 'FIFO rate adaptation with stop/start flow control.',
    'mask-search': 'Search the scrambler mask with the fewest false '
                   'preamble matches.',
    'frame': 'Build and parse one frame and dump it as hex.',
}


def str2bool(val):
    if val in ['True', 'true', 't', 'T', '1']:
        return True
    else:
        return False


def _common_parser():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--scenario", default=None,
                        help="JSON scenario file. Options given on the "
                             "command line take precedence over it.")
    parser.add_argument("--seed", type=int, default=None,
                        help="Random seed of the experiment.")
    parser.add_argument("--out", default=None,
                        help="Directory for the result files.")
    parser.add_argument("--format", choices=['csv', 'json'], default='csv',
                        help="Format of the result table.")
    parser.add_argument("--gamma", type=int, default=None,
                        help="Preamble detection threshold in bits.")
    parser.add_argument("--preamble", type=int, choices=[32, 64],
                        default=None, help="Preamble length in bits.")
    parser.add_argument("--banks", type=int, choices=[1, 2], default=None,
                        help="Number of correlator banks.")
    parser.add_argument("--rs", type=str2bool, default=None,
                        help="Set False to take the systematic bytes "
                             "without RS decoding.")
    parser.add_argument("--ebn0", type=float, nargs="+", default=None,
                        help="Eb/N0 grid in dB.")
    parser.add_argument("--distances", type=float, nargs="+", default=None,
                        help="Distance grid in m for the link model.")
    parser.add_argument("--workers", type=int, default=None,
                        help="Processes for the BER grid points.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for details.")
    return parser


def parse_args(args):
    """
    Parse command line parameters.

    Parameters
    ----------
    args : list of str
        Command line parameters as list of strings.

    Returns
    -------
    args : argparse.Namespace
        Command line arguments.
    """
    parser = argparse.ArgumentParser(
        description="Simulate and analyse a 60 GHz Gigabit Ethernet "
                    "baseband link.")
    subparsers = parser.add_subparsers(dest='command', required=True)
    common = _common_parser()
    cmds = {name: subparsers.add_parser(name, parents=[common], help=text,
                                        description=text)
            for name, text in COMMANDS.items()}

    cmds['flow'].add_argument("--duration", type=int, default=None,
                              help="Simulated write clock cycles.")
    cmds['flow'].add_argument("--ingress", default=None,
                              choices=['saturating', 'sub_rate', 'random'],
                              help="Ethernet burst pattern.")
    cmds['flow'].add_argument("--side", default=None,
                              choices=['transmit', 'receive'],
                              help="Transmitter or receiver FIFO.")
    cmds['flow'].add_argument("--trace", type=str2bool, default=None,
                              help="Set True to also write the event trace.")
    cmds['ber'].add_argument("--rolloff-filter", type=str2bool, default=None,
                             help="Set True to give SNR in the ~1.1 GHz "
                                  "noise bandwidth of a roll-off 0.25 "
                                  "receive filter instead of 2 GHz.")
    cmds['ber'].add_argument("--measured-degradation", type=str2bool,
                             default=None,
                             help="Set True to apply the measured SNR loss "
                                  "of the hardware (3 dB coded, 3.5 dB "
                                  "uncoded) to every point.")
    cmds['mask-search'].add_argument("--candidates", type=int, default=None,
                                     help="Number of random candidate masks.")

    return parser.parse_args(args)


def _scenario(args):
    scenario = read_scenario(args.scenario, seed=args.seed,
                             gamma=args.gamma, preamble_bits=args.preamble,
                             banks=args.banks, rs_enabled=args.rs,
                             ebn0_db=args.ebn0, workers=args.workers,
                             out_dir=args.out)
    if args.distances is not None:
        scenario = scenario.override(link={**asdict(scenario.link),
                                           'distances_m': args.distances})
    if args.command == 'flow':
        flow = {'duration_ticks': args.duration, 'ingress': args.ingress,
                'side': args.side, 'trace': args.trace}
        flow = {k: v for k, v in flow.items() if v is not None}
        scenario = scenario.override(flow={**asdict(scenario.flow), **flow})
    if args.command == 'ber':
        if args.rolloff_filter:
            scenario = scenario.override(
                noise_bandwidth_hz=ROLLOFF_BANDWIDTH_HZ)
        if args.measured_degradation:
            scenario = scenario.override(
                impl_degradation_db=measured_degradation_db(
                    scenario.rs_enabled))
    if args.command == 'mask-search' and args.candidates is not None:
        scenario = scenario.override(
            mask_search={**asdict(scenario.mask_search),
                         'candidates': args.candidates})
    return scenario


def run_command(command, scenario, fmt='csv'):
    """
    Run one experiment and write its results.

    Returns
    -------
    paths : list of str
        Written data files.
    """
    store = ResultStore(scenario.out_dir)
    if command == 'ber':
        table = records_to_frame(run_ber(scenario), scenario)
    elif command == 'sync':
        table = run_sync_experiment(scenario)
    elif command == 'link':
        table = run_link_model(scenario)
    elif command == 'flow':
        table, trace = run_flow_sim(scenario)
        paths = [store.write(table, 'flow', scenario, fmt)]
        if trace is not None:
            paths.append(store.write(trace, 'flow-trace', scenario, fmt))
        return paths
    elif command == 'mask-search':
        _, table = run_mask_search(scenario)
    elif command == 'frame':
        table = pd.DataFrame([run_frame_roundtrip(scenario)])
    else:
        raise ValueError(f"Unknown command {command}")
    return [store.write(table, command, scenario, fmt)]


def main(args):
    """
    Main routine used for command line interface.

    Parameters
    ----------
    args : list of str
        Command line arguments.

    Returns
    -------
    code : int
        0 on success, 2 if a contract was violated; the error is written to
        stderr as one JSON line.
    """
    args = parse_args(args)
    level = max(logging.WARNING - 10 * args.verbose, logging.DEBUG)
    logging.basicConfig(level=level,
                        format='%(asctime)s %(name)s %(levelname)s '
                               '%(message)s')

    try:
        scenario = _scenario(args)
        for path in run_command(args.command, scenario, args.format):
            print(path)
    except Gbe60Error as e:
        print(json.dumps({'error': type(e).__name__, 'message': str(e)}),
              file=sys.stderr)
        return 2
    return 0


def run():
    sys.exit(main(sys.argv[1:]))
