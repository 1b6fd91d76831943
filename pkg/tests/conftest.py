#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Shared fixtures of the gbe60 tests.
"""
import numpy as np
import pytest

from gbe60.bitframe import LAYOUT_64, build_frame, stream_frames
from gbe60.harness import Scenario


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def frames_64(rng):
    """Three random-payload frames of the 64-bit layout."""
    return [build_frame(rng.bytes(LAYOUT_64.payload_bytes))
            for _ in range(3)]


@pytest.fixture
def stream_64(frames_64):
    return stream_frames(frames_64, LAYOUT_64)


@pytest.fixture
def small_scenario(tmp_path):
    """A scenario sized to run in seconds."""
    return Scenario(ebn0_db=(float('inf'),), target_errors=1,
                    max_bits=LAYOUT_64.payload_bytes * 8 * 16,
                    out_dir=str(tmp_path),
                    sync={'ns': (64,), 'banks': (2,), 'gammas': (58, 59),
                          'ps': (1e-2,), 'mc_trials': 20000,
                          'chain_trials': 20000},
                    link={'distances_m': (1.0, 5.0, 10.0)},
                    flow={'duration_ticks': 200000},
                    mask_search={'candidates': 4, 'corpus_frames': 2})
