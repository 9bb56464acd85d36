# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Scenario Submodule**

Applies capacity edits to a network, re-simulates, and reports delay changes

Edits are ``scenario_edit`` plugins. The built-in kinds are ``runway``, ``enroute_scale``,
and ``eliminate``.
"""

from collections import namedtuple

import numpy as np
import pandas as pd

from airnet.exceptions import ConfigError
from airnet.network import AIRPORT
from airnet.plugins.edits import ELIMINATION_MULTIPLIER
from airnet.simulation import simulate_day
from airnet._plugins import get_plugin
from airnet._util import LOGGER


DEFAULT_RUNWAYS = 2
DEFAULT_SCALE_FACTORS = tuple(np.round(np.arange(1, 21) * 0.1, 1))

Edit = namedtuple('Edit', ('kind', 'target', 'magnitude'))
METRICS = ('local', 'propagated', 'total')


def apply_runway_addition(network, airport, runways, plugin_paths=None):
    """
    Args:
        network(MultiLayerNetwork): Network; not modified
        airport(str): Airport code
        runways(int): Existing independent runways
        plugin_paths(list): Extra plugin directories

    Returns:
        MultiLayerNetwork: Copy with the airport's service rate times (n + 1) / n

    Raises:
        NodeLookupError: Unknown airport
    """
    return get_plugin('scenario_edit', 'runway', plugin_paths).apply(network, airport, runways)


def apply_enroute_scale(network, factor, plugin_paths=None):
    """
    Args:
        network(MultiLayerNetwork): Network; not modified
        factor(float or dict): Factor for every point, or point id to factor
        plugin_paths(list): Extra plugin directories

    Returns:
        MultiLayerNetwork: Copy with scaled point service rates
    """

    edit = get_plugin('scenario_edit', 'enroute_scale', plugin_paths)
    if not isinstance(factor, dict):
        return edit.apply(network, None, factor)

    for point_id in sorted(factor):
        network = edit.apply(network, point_id, factor[point_id])
    return network


def eliminate_points_for_airport(network, airport, multiplier=ELIMINATION_MULTIPLIER,
                                 plugin_paths=None):
    """
    Args:
        network(MultiLayerNetwork): Network; not modified
        airport(str): Airport code
        multiplier(float): Service rate multiplier standing in for unbounded capacity
        plugin_paths(list): Extra plugin directories

    Returns:
        MultiLayerNetwork: Copy with every point on the airport's routes relieved

    A point shared with other airports' routes is relieved for all traffic.

    Raises:
        NodeLookupError: Unknown airport
    """
    return get_plugin('scenario_edit', 'eliminate', plugin_paths).apply(network, airport,
                                                                        multiplier)


class ScenarioSpec(object):
    """
    Args:
        scenario_id(str): Identifier used in reports
        edits(list): :py:class:`Edit` tuples (kind, target, magnitude)
        subset(list): Airports whose flights get separate delay rows

    **Capacity edits evaluated together**

    Raises:
        ConfigError: Invalid magnitude
    """

    __slots__ = ('scenario_id', 'edits', 'subset')

    def __init__(self, scenario_id, edits=(), subset=()):
        self.scenario_id = str(scenario_id)
        self.edits = [Edit(*edit) for edit in edits]
        self.subset = tuple(subset)

        for edit in self.edits:
            if edit.kind == 'runway' and (int(edit.magnitude) != edit.magnitude or
                                          edit.magnitude < 1):
                raise ConfigError('Runway count must be an integer >= 1, received %r' %
                                  (edit.magnitude,))
            if edit.magnitude <= 0:
                raise ConfigError('Edit magnitude must be positive, received %r' %
                                  (edit.magnitude,))

    def __repr__(self):
        return '%s(%r, edits=%r)' % (self.__class__.__name__, self.scenario_id, self.edits)

    @classmethod
    def from_record(cls, record):
        """
        Args:
            record(dict): ``scenario_id``, ``edits`` as mappings with kind, target, and
                magnitude, optional ``subset``

        Returns:
            ScenarioSpec: Parsed specification

        Raises:
            ConfigError: Malformed record
        """
        try:
            edits = [(item['kind'], item.get('target'), float(item['magnitude']))
                     for item in record.get('edits', ())]
            return cls(record['scenario_id'], edits, record.get('subset', ()))
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise ConfigError('Malformed scenario: %s' % e,
                              friendly='scenario file is malformed') from None

    def to_record(self):
        """
        Returns:
            dict: JSON-compatible representation
        """
        return {'scenario_id': self.scenario_id,
                'edits': [edit._asdict() for edit in self.edits],
                'subset': list(self.subset)}

    def apply(self, network, plugin_paths=None):
        """
        Args:
            network(MultiLayerNetwork): Baseline; not modified
            plugin_paths(list): Extra plugin directories

        Returns:
            tuple: (edited network, list of edit descriptions)
        """

        descriptions = []
        for edit in self.edits:
            plugin = get_plugin('scenario_edit', edit.kind, plugin_paths)
            descriptions.append(plugin.describe(network, edit.target, edit.magnitude))
            network = plugin.apply(network, edit.target, edit.magnitude)
        return network, descriptions


def _total(item):
    if item.local is None or item.propagated is None:
        return None
    return item.local + item.propagated


def _row(scenario_id, scope, metric, baseline, scenario):
    if baseline is None or scenario is None:
        return (scenario_id, scope, metric, baseline, scenario, np.nan)
    return (scenario_id, scope, metric, baseline, scenario, baseline - scenario)


class ScenarioResult(object):
    """
    Args:
        spec(ScenarioSpec): Evaluated scenario
        baseline(DelayReport): Report on the unedited network
        scenario(DelayReport): Report on the edited network
        descriptions(list): Human-readable edits applied

    **Delay reports before and after a scenario, with deltas baseline minus scenario**
    """

    __slots__ = ('spec', 'baseline', 'scenario', 'descriptions')

    def __init__(self, spec, baseline, scenario, descriptions=()):
        self.spec = spec
        self.baseline = baseline
        self.scenario = scenario
        self.descriptions = list(descriptions)

    def __repr__(self):
        return '%s(%r, network_delta=%.4f)' % (self.__class__.__name__, self.spec.scenario_id,
                                               self.network_delta)

    @property
    def network_delta(self):
        """:py:class:`float` -- Reduction of average delay per flight"""
        return self.baseline.network_delay - self.scenario.network_delay

    def subset_delta(self, airport):
        """
        Returns:
            float: Reduction of average delay of flights from or to the airport
        """
        return self.baseline.subset_delay(airport) - self.scenario.subset_delay(airport)

    def to_frame(self):
        """
        Returns:
            :py:class:`pandas.DataFrame`: Columns scenario, scope, metric, baseline, scenario,
            delta; scope is a node id, ``network``, or ``flights:<airport>``
        """

        sid = self.spec.scenario_id
        rows = [_row(sid, 'network', 'delay', self.baseline.network_delay,
                     self.scenario.network_delay)]
        for airport in self.spec.subset:
            rows.append(_row(sid, 'flights:%s' % airport, 'delay',
                             self.baseline.subset_delay(airport),
                             self.scenario.subset_delay(airport)))

        for node_id, before in self.baseline.nodes.items():
            after = self.scenario.nodes[node_id]
            rows.append(_row(sid, node_id, 'local', before.local, after.local))
            rows.append(_row(sid, node_id, 'propagated', before.propagated, after.propagated))
            rows.append(_row(sid, node_id, 'total', _total(before), _total(after)))

        return pd.DataFrame(rows, columns=['scenario', 'scope', 'metric', 'baseline',
                                           'scenario_value', 'delta'])


# pylint: disable-next=too-many-arguments,too-many-positional-arguments
def run_scenario(network, itineraries, buffers, spec, baseline=None, plugin_paths=None,
                 wait_model=None):
    """
    Args:
        network(MultiLayerNetwork): Baseline network; not modified
        itineraries(list): :py:class:`~airnet.ingest.Itinerary` objects
        buffers(Buffers): Slack
        spec(ScenarioSpec): Edits to evaluate
        baseline(DelayReport): Baseline report when already simulated
        plugin_paths(list): Extra plugin directories
        wait_model(callable): Passed to :py:func:`~airnet.simulation.simulate_day`

    Returns:
        ScenarioResult: Both reports and their deltas
    """

    if baseline is None:
        baseline = simulate_day(network, itineraries, buffers, wait_model)

    edited, descriptions = spec.apply(network, plugin_paths)
    for description in descriptions:
        LOGGER.info('Scenario %s: %s', spec.scenario_id, description)

    result = ScenarioResult(spec, baseline, simulate_day(edited, itineraries, buffers,
                                                         wait_model), descriptions)
    LOGGER.info('Scenario %s: delay per flight %.4f -> %.4f', spec.scenario_id,
                baseline.network_delay, result.scenario.network_delay)
    return result


def _serves(itineraries, airport):
    return any(airport in (flight.origin, flight.destination)
               for itinerary in itineraries for flight in itinerary.flights)


# pylint: disable-next=too-many-arguments,too-many-positional-arguments
def rank_cumulative_expansions(network, itineraries, buffers, candidates, runways=None,
                               plugin_paths=None):
    """
    Args:
        network(MultiLayerNetwork): Baseline network; not modified
        itineraries(list): :py:class:`~airnet.ingest.Itinerary` objects
        buffers(Buffers): Slack
        candidates(list): Airport codes
        runways(dict): Airport code to existing runways, :py:data:`DEFAULT_RUNWAYS` when absent
        plugin_paths(list): Extra plugin directories

    Returns:
        :py:class:`pandas.DataFrame`: Columns rank, airport, single, cumulative; ``single`` is
        the reduction of delay per flight from that airport alone and ``cumulative`` from it
        and every higher-ranked airport

    Airports are ranked by single reduction; airports without traffic rank last.
    """

    if not candidates:
        raise ValueError('At least one candidate airport is required')
    runways = runways or {}

    baseline = simulate_day(network, itineraries, buffers)
    singles = {}
    for airport in candidates:
        edited = apply_runway_addition(network, airport, runways.get(airport, DEFAULT_RUNWAYS),
                                       plugin_paths)
        singles[airport] = baseline.network_delay - \
            simulate_day(edited, itineraries, buffers).network_delay

    ranked = sorted(candidates, key=lambda airport: (not _serves(itineraries, airport),
                                                     -singles[airport], airport))

    rows = []
    edited = network
    for rank, airport in enumerate(ranked, 1):
        edited = apply_runway_addition(edited, airport, runways.get(airport, DEFAULT_RUNWAYS),
                                       plugin_paths)
        if rank == 1:
            cumulative = singles[airport]
        else:
            cumulative = baseline.network_delay - \
                simulate_day(edited, itineraries, buffers).network_delay
        rows.append((rank, airport, singles[airport], cumulative))
        LOGGER.info('Expansion %d at %s: cumulative reduction %.4f min per flight', rank,
                    airport, cumulative)

    return pd.DataFrame(rows, columns=['rank', 'airport', 'single', 'cumulative'])


# pylint: disable-next=too-many-arguments,too-many-positional-arguments
def enroute_scale_sweep(network, itineraries, buffers, factors=DEFAULT_SCALE_FACTORS,
                        plugin_paths=None, baseline=None):
    """
    Args:
        network(MultiLayerNetwork): Baseline network; not modified
        itineraries(list): :py:class:`~airnet.ingest.Itinerary` objects
        buffers(Buffers): Slack
        factors(list): Scale factors applied to every point's service rate
        plugin_paths(list): Extra plugin directories
        baseline(DelayReport): Baseline report when already simulated

    Returns:
        :py:class:`pandas.DataFrame`: Columns factor, delay, reduction per flight
    """

    if baseline is None:
        baseline = simulate_day(network, itineraries, buffers)

    rows = []
    for factor in factors:
        delay = simulate_day(apply_enroute_scale(network, float(factor), plugin_paths),
                             itineraries, buffers).network_delay
        rows.append((float(factor), delay, baseline.network_delay - delay))

    return pd.DataFrame(rows, columns=['factor', 'delay', 'reduction'])


# pylint: disable-next=too-many-arguments,too-many-positional-arguments
def compare_runway_vs_enroute(network, itineraries, buffers, airports, runways=None,
                              plugin_paths=None):
    """
    Args:
        network(MultiLayerNetwork): Baseline network; not modified
        itineraries(list): :py:class:`~airnet.ingest.Itinerary` objects
        buffers(Buffers): Slack
        airports(list): Airport codes
        runways(dict): Airport code to existing runways
        plugin_paths(list): Extra plugin directories

    Returns:
        :py:class:`pandas.DataFrame`: Columns airport, runway, enroute, difference; the first
        two are reductions of the average delay of the airport's own flights, the last
        ``enroute - runway``

    Only delay experienced by the airport's flights is counted.
    """

    runways = runways or {}
    baseline = simulate_day(network, itineraries, buffers)

    rows = []
    for airport in airports:
        if network.lookup(airport).kind != AIRPORT:
            raise ConfigError('%s is not an airport' % airport)
        before = baseline.subset_delay(airport)
        runway = simulate_day(apply_runway_addition(network, airport,
                                                    runways.get(airport, DEFAULT_RUNWAYS),
                                                    plugin_paths),
                              itineraries, buffers).subset_delay(airport)
        enroute = simulate_day(eliminate_points_for_airport(network, airport,
                                                            plugin_paths=plugin_paths),
                               itineraries, buffers).subset_delay(airport)
        rows.append((airport, before - runway, before - enroute, runway - enroute))

    return pd.DataFrame(rows, columns=['airport', 'runway', 'enroute', 'difference'])
