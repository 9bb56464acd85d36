# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Package**

Delay propagation in a multi-layer network of airports and en-route congestion points
"""

__version__ = '0.1.0'

__all__ = ['AirnetError', 'AirnetWarning', 'Buffers', 'DelayReport', 'Horizon',
           'MultiLayerNetwork', 'QueueEngine', 'QueueParams', 'RunConfig', 'ScenarioSpec',
           'load_fixture_network', 'mine_routes', 'run_profile', 'run_scenario', 'simulate_day']

from airnet.config import RunConfig
from airnet.exceptions import AirnetError, AirnetWarning
from airnet.network import Horizon, load_fixture_network, MultiLayerNetwork
from airnet.queueing import QueueEngine, QueueParams, run_profile
from airnet.routes import mine_routes
from airnet.scenario import run_scenario, ScenarioSpec
from airnet.simulation import Buffers, DelayReport, simulate_day
