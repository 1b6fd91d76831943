# -*- coding: utf-8 -*-
"""
Column and global attributes of the result tables, written into the JSON
sidecar of every result file.
"""

from gbe60 import __version__
from gbe60.exceptions import ConfigurationError
from gbe60.flowctl import EVENTS

EXPERIMENTS = ('ber', 'sync', 'link', 'flow', 'flow-trace', 'mask-search',
               'frame')


class Gbe60ResultAttrs(object):
    '''Default, common metadata of all result tables'''
    def __init__(self, experiment, preamble_bits=64, rs_enabled=True,
                 version=__version__):
        '''
        Parameters
        ----------
        experiment : str
            One of EXPERIMENTS
        preamble_bits : int, optional (default: 64)
            Frame format the results were produced with
        rs_enabled : bool, optional (default: True)
            Whether the RS(255, 239) decoder was active
        version : str, optional
            Package version written into the product name
        '''
        self.experiment = experiment
        self.version = version
        self.frame_format_str = {64: 'P64-2W', 32: 'P32-1W'}
        self.atts_frame_format(preamble_bits, rs_enabled)

    def atts_frame_format(self, preamble_bits=64, rs_enabled=True):
        self.preamble_bits = preamble_bits
        self.coding = 'RS255_239' if rs_enabled else 'UNCODED'
        self.frame_format = self.frame_format_str[preamble_bits]

    def event_flag(self):
        # values are the labels of the FIFO trace event column
        meanings = {
            'write': 'byte written on the ingress clock',
            'read': 'byte read on the source byte clock',
            'stop_asserted': 'occupancy reached the upper threshold',
            'start_asserted': 'occupancy fell to the lower threshold',
            'sample': 'occupancy after every n-th ingress frame',
        }
        self.event_flag_values = list(EVENTS)
        self.event_flag_meanings = [meanings[e] for e in EVENTS]

        return self.event_flag_values, self.event_flag_meanings

    def product_name(self):
        return " ".join(['GBE60', self.experiment.upper(), self.frame_format,
                         self.coding, self.version])


class BerTableAttrs(object):
    """Attributes of Monte Carlo BER records."""

    def __init__(self, preamble_bits=64, rs_enabled=True, cls=Gbe60ResultAttrs):
        self.general_attrs = cls('ber', preamble_bits, rs_enabled)

        self.column_attributes = {
            'ebn0_db': {'full_name': 'Energy per Bit to Noise Density',
                        'units': 'dB'},
            'snr_db': {'full_name': 'Signal to Noise Ratio in 2 GHz',
                       'units': 'dB'},
            'bits_simulated': {'full_name': 'Payload Bits Compared'},
            'bit_errors': {'full_name': 'Payload Bit Errors'},
            'ber': {'full_name': 'Payload Bit Error Rate after Decoding'},
            'ci_low': {'full_name': 'BER 95% Lower Bound (Clopper-Pearson)'},
            'ci_high': {'full_name': 'BER 95% Upper Bound (Clopper-Pearson)'},
            'raw_bits': {'full_name': 'Channel Bits'},
            'raw_errors': {'full_name': 'Channel Bit Errors'},
            'raw_ber': {'full_name': 'Channel Bit Error Rate'},
            'frames_sent': {'full_name': 'Frames Sent'},
            'frames_lost_to_sync': {'full_name': 'Frames Missed or Misaligned '
                                                 'by the Synchronizer'},
            'frames_failed_decode': {'full_name': 'Frames with an '
                                                  'Undecodable Codeword'},
            'corrected_bytes': {'full_name': 'Bytes Corrected by the '
                                             'RS Decoder'},
            'complete': {'full_name': 'Target Error Count Reached'},
            'fingerprint': {'full_name': 'Scenario Fingerprint'}}

        self.global_attr = {'product': self.general_attrs.product_name(),
                            'coding': self.general_attrs.coding,
                            'preamble_bits': preamble_bits}


class SyncTableAttrs(object):
    """Attributes of miss and false alarm curves."""

    def __init__(self, preamble_bits=64, cls=Gbe60ResultAttrs):
        self.general_attrs = cls('sync', preamble_bits, True)

        self.column_attributes = {
            'n': {'full_name': 'Preamble Length', 'units': 'bit'},
            'banks': {'full_name': 'Correlator Banks'},
            'gamma': {'full_name': 'Detection Threshold', 'units': 'bit'},
            'p': {'full_name': 'Channel Bit Error Probability'},
            'p_miss_analytic': {'full_name': 'Miss Probability, exact'},
            'p_miss_mc': {'full_name': 'Miss Probability, Monte Carlo on '
                                       'the preamble bits'},
            'p_fa_per_pair': {'full_name': 'False Alarm Probability per '
                                           'Candidate Position'},
            'p_fa_frame_union': {'full_name': 'False Alarm Probability per '
                                              'Frame, union bound'},
            'p_miss_chain': {'full_name': 'Miss or Misalignment Rate, Monte '
                                          'Carlo with bit slip'},
            'p_fa_chain_window': {'full_name': 'False Alarm Rate per Decision '
                                               'Window, Monte Carlo'},
            'fingerprint': {'full_name': 'Scenario Fingerprint'}}

        self.global_attr = {'product': self.general_attrs.product_name(),
                            'false_alarm_convention':
                                'per position pair; union bound over coded '
                                'region bytes x 8 bit offsets'}


class LinkTableAttrs(object):
    """Attributes of the link budget model."""

    def __init__(self, blockage=(), cls=Gbe60ResultAttrs):
        self.general_attrs = cls('link')

        self.column_attributes = {
            'distance_m': {'full_name': 'Tx-Rx Distance', 'units': 'm'},
            'received_power_dbm': {'full_name': 'IF Received Power',
                                   'units': 'dBm'},
            'snr_db': {'full_name': 'Signal to Noise Ratio', 'units': 'dB'},
            'ebn0_db': {'full_name': 'Energy per Bit to Noise Density',
                        'units': 'dB'},
            'ber_uncoded': {'full_name': 'Model BER, DBPSK'},
            'ber_coded': {'full_name': 'Model BER after RS(255, 239)'},
            'demod_input_ok': {'full_name': 'Demodulator Input at least '
                                            '0 dBm'},
            'fingerprint': {'full_name': 'Scenario Fingerprint'}}
        for kind in blockage:
            name = kind.replace('_', ' ').title()
            self.column_attributes.update({
                f'received_power_dbm_{kind}': {
                    'full_name': f'IF Received Power, {name} Blockage',
                    'units': 'dBm'},
                f'ber_uncoded_{kind}': {
                    'full_name': f'Model BER, DBPSK, {name} Blockage'},
                f'ber_coded_{kind}': {
                    'full_name': f'Model BER after RS(255, 239), '
                                 f'{name} Blockage'}})

        self.global_attr = {'product': self.general_attrs.product_name(),
                            'propagation': 'free space'}


class FlowTableAttrs(object):
    """Attributes of FIFO statistics and traces."""

    def __init__(self, cls=Gbe60ResultAttrs):
        self.general_attrs = cls('flow')
        self.general_attrs.event_flag()

        self.column_attributes = {
            'tick': {'full_name': 'Time', 'units': 'write clock cycles'},
            'event': {'full_name': 'Trace Event',
                      'flag_values': self.general_attrs.event_flag_values,
                      'flag_meanings': self.general_attrs.event_flag_meanings},
            'occupancy': {'full_name': 'FIFO Occupancy', 'units': 'byte'},
            'bytes_in': {'full_name': 'Bytes Written', 'units': 'byte'},
            'bytes_out': {'full_name': 'Bytes Read', 'units': 'byte'},
            'egress_rate_bps': {'full_name': 'Egress Throughput',
                                'units': 'bit/s'},
            'ingress_rate_bps': {'full_name': 'Ingress Throughput',
                                 'units': 'bit/s'},
            'fingerprint': {'full_name': 'Scenario Fingerprint'}}

        self.global_attr = {'product': self.general_attrs.product_name(),
                            'flow_control': 'stop at upper threshold, '
                                            'honored at frame boundaries'}


class MaskSearchAttrs(object):
    """Attributes of the scrambler mask search report."""

    def __init__(self, preamble_bits=64, cls=Gbe60ResultAttrs):
        self.general_attrs = cls('mask-search', preamble_bits, True)

        self.column_attributes = {
            'candidate': {'full_name': 'Candidate Index, 0 is the zero mask'},
            'mask': {'full_name': 'Scrambler Mask', 'units': 'hex'},
            'max_score': {'full_name': 'Highest Preamble Agreement',
                          'units': 'bit'},
            'count': {'full_name': 'Windows Reaching the Highest Agreement'},
            'selected': {'full_name': 'Selected Mask'},
            'fingerprint': {'full_name': 'Scenario Fingerprint'}}

        self.global_attr = {'product': self.general_attrs.product_name()}


class FrameDumpAttrs(object):
    """Attributes of a single frame round trip."""

    def __init__(self, preamble_bits=64, rs_enabled=True, cls=Gbe60ResultAttrs):
        self.general_attrs = cls('frame', preamble_bits, rs_enabled)
        self.column_attributes = {
            'frame': {'full_name': 'Frame Bytes, LSB first on the line',
                      'units': 'hex'},
            'payload': {'full_name': 'Payload Bytes', 'units': 'hex'}}
        self.global_attr = {'product': self.general_attrs.product_name()}


def attrs_for(experiment, scenario):
    """Attribute object of one experiment for the given scenario."""
    if experiment == 'ber':
        return BerTableAttrs(scenario.preamble_bits, scenario.rs_enabled)
    if experiment == 'sync':
        return SyncTableAttrs(scenario.preamble_bits)
    if experiment == 'link':
        return LinkTableAttrs(scenario.link.blockage)
    if experiment in ('flow', 'flow-trace'):
        return FlowTableAttrs()
    if experiment == 'mask-search':
        return MaskSearchAttrs(scenario.preamble_bits)
    if experiment == 'frame':
        return FrameDumpAttrs(scenario.preamble_bits, scenario.rs_enabled)
    raise ConfigurationError(f"Unknown experiment {experiment}, use {EXPERIMENTS}")
