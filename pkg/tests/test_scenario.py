# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Test module for airnet.scenario**
"""

from airnet import scenario
from airnet.exceptions import ConfigError, NodeLookupError
from airnet.ingest import FlightRecord, Itinerary
from airnet.network import (AIRPORT, POINT, Horizon, MultiLayerNetwork, NetworkNode,
                            RouteCrossing, load_fixture_network)
from airnet.queueing import QueueParams
from airnet.routes import Route
from airnet.simulation import Buffers

from tests import TestCase


HORIZON = Horizon(0.0, 240.0, 15.0, 16)
BUFFERS = Buffers(15.0, 10.0)


def node(node_id, kind=AIRPORT, mu=4.0):
    """Queue node with zero demand over HORIZON"""
    return NetworkNode(node_id, kind, None, QueueParams(1, mu, 20), HORIZON.empty_demand())


def congested_network():
    """BBB is overloaded by traffic from AAA through P1; P2 serves CCC to DDD only"""
    routes = [Route('R1', ('AAA', 'BBB'), [[30.0, 110.0], [30.0, 116.0]], 1.0, 10, [0, 60]),
              Route('R2', ('CCC', 'DDD'), [[20.0, 110.0], [20.0, 116.0]], 1.0, 10, [0, 60])]
    return MultiLayerNetwork(
        [node('AAA', mu=40.0), node('BBB', mu=2.0), node('CCC'), node('DDD')],
        [node('P1', POINT, mu=4.0), node('P2', POINT, mu=2.0)], routes,
        [RouteCrossing('R1', 'P1', 30.0), RouteCrossing('R2', 'P2', 30.0)], HORIZON)


def itineraries():
    """Eighteen single flights from AAA to BBB"""
    return [Itinerary(None, [FlightRecord('F%02d' % idx, 'AAA', 'BBB', (240.0 + 5 * idx) * 60,
                                          (300.0 + 5 * idx) * 60, None, None, None)])
            for idx in range(18)]


class TestEdits(TestCase):
    """Tests for capacity edits"""

    def test_runway(self):
        """One more runway scales the rate by (n + 1) / n"""
        fixture = load_fixture_network()
        edited = scenario.apply_runway_addition(fixture, 'CTU', 2)
        self.assertEqual(edited.lookup('CTU').params.mu, 19.5)
        self.assertEqual(fixture.lookup('CTU').params.mu, 13.0)
        self.assertEqual(scenario.apply_runway_addition(fixture, 'PEK', 3).lookup('PEK').params.mu,
                         24.0)

        with self.assertRaises(NodeLookupError):
            scenario.apply_runway_addition(fixture, 'ZZZ', 2)
        with self.assertRaises(NodeLookupError):
            scenario.apply_runway_addition(fixture, '2', 2)
        with self.assertRaises(ValueError):
            scenario.apply_runway_addition(fixture, 'CTU', 0)

    def test_enroute_scale(self):
        """Point rates scale everywhere or per point"""
        fixture = load_fixture_network()
        halved = scenario.apply_enroute_scale(fixture, 0.5)
        self.assertEqual(halved.lookup('2').params.mu, 10.0)
        self.assertEqual(halved.lookup('PEK').params.mu, 18.0)

        doubled = scenario.apply_enroute_scale(fixture, {'2': 2.0})
        self.assertEqual(doubled.lookup('2').params.mu, 40.0)
        self.assertEqual(doubled.lookup('3').params.mu, 12.0)

        with self.assertRaises(NodeLookupError):
            scenario.apply_enroute_scale(fixture, {'PEK': 2.0})
        with self.assertRaises(ValueError):
            scenario.apply_enroute_scale(fixture, 0.0)

    def test_eliminate(self):
        """Only points on the airport's routes are relieved"""
        net = congested_network()
        edited = scenario.eliminate_points_for_airport(net, 'BBB')
        self.assertEqual(edited.lookup('P1').params.mu, 400.0)
        self.assertEqual(edited.lookup('P2').params.mu, 2.0)
        self.assertEqual(net.lookup('P1').params.mu, 4.0)

        with self.assertRaises(NodeLookupError):
            scenario.eliminate_points_for_airport(net, 'P1')


class TestScenarioSpec(TestCase):
    """Tests for ScenarioSpec"""

    def test_validation(self):
        """Magnitudes are checked"""
        with self.assertRaises(ConfigError):
            scenario.ScenarioSpec('s', [('runway', 'CTU', 1.5)])
        with self.assertRaises(ConfigError):
            scenario.ScenarioSpec('s', [('enroute_scale', None, 0.0)])

    def test_record(self):
        """Records are parsed, malformed ones raise ConfigError"""
        spec = scenario.ScenarioSpec.from_record(
            {'scenario_id': 'ctu', 'edits': [{'kind': 'runway', 'target': 'CTU',
                                              'magnitude': 2}],
             'subset': ['CTU']})
        self.assertEqual(spec.edits, [scenario.Edit('runway', 'CTU', 2.0)])
        self.assertEqual(spec.to_record()['subset'], ['CTU'])

        with self.assertRaises(ConfigError):
            scenario.ScenarioSpec.from_record({'edits': []})
        with self.assertRaises(ConfigError):
            scenario.ScenarioSpec.from_record({'scenario_id': 's', 'edits': [{'kind': 'x'}]})

    def test_apply(self):
        """Edits apply in order and describe themselves"""
        spec = scenario.ScenarioSpec('ctu', [('runway', 'CTU', 2), ('enroute_scale', '2', 2.0)])
        edited, descriptions = spec.apply(load_fixture_network())
        self.assertEqual(descriptions[0], 'runway at CTU: 52 -> 78 per hour')
        self.assertEqual(edited.lookup('CTU').params.mu, 19.5)
        self.assertEqual(edited.lookup('2').params.mu, 40.0)

    def test_unknown_kind(self):
        """Unknown edit kinds raise ConfigError"""
        spec = scenario.ScenarioSpec('s', [('widen', 'CTU', 1.0)])
        with self.assertRaises(ConfigError):
            spec.apply(load_fixture_network())


class TestRunScenario(TestCase):
    """Tests for scenario evaluation"""

    def test_runway_reduces_delay(self):
        """More arrival capacity lowers delay"""
        spec = scenario.ScenarioSpec('bbb', [('runway', 'BBB', 2)], subset=['BBB'])
        result = scenario.run_scenario(congested_network(), itineraries(), BUFFERS, spec)

        self.assertGreater(result.baseline.network_delay, 0.0)
        self.assertGreater(result.network_delta, 0.0)
        self.assertEqual(result.subset_delta('BBB'), result.network_delta)
        self.assertEqual(result.descriptions, ['runway at BBB: 8 -> 12 per hour'])

        frame = result.to_frame()
        self.assertEqual(list(frame.columns), ['scenario', 'scope', 'metric', 'baseline',
                                               'scenario_value', 'delta'])
        self.assertEqual(list(frame['scope'][:2]), ['network', 'flights:BBB'])
        self.assertAlmostEqual(frame['delta'][0], result.network_delta)

    def test_baseline_reused(self):
        """A given baseline is not re-simulated"""
        spec = scenario.ScenarioSpec('noop', [('enroute_scale', None, 1.0)])
        first = scenario.run_scenario(congested_network(), itineraries(), BUFFERS, spec)
        second = scenario.run_scenario(congested_network(), itineraries(), BUFFERS, spec,
                                       baseline=first.baseline)
        self.assertIs(second.baseline, first.baseline)
        self.assertEqual(second.network_delta, 0.0)


class TestSweeps(TestCase):
    """Tests for the sensitivity sweeps"""

    def test_expansions(self):
        """Airports without traffic rank last and the first row is its own cumulative"""
        frame = scenario.rank_cumulative_expansions(congested_network(), itineraries(), BUFFERS,
                                                    ['CCC', 'BBB'])
        self.assertEqual(list(frame['airport']), ['BBB', 'CCC'])
        self.assertEqual(frame['cumulative'][0], frame['single'][0])
        self.assertEqual(frame['single'][1], 0.0)
        self.assertGreater(frame['single'][0], 0.0)

        with self.assertRaises(ValueError):
            scenario.rank_cumulative_expansions(congested_network(), itineraries(), BUFFERS, [])

    def test_enroute_sweep(self):
        """Scale factor one leaves delay unchanged"""
        frame = scenario.enroute_scale_sweep(congested_network(), itineraries(), BUFFERS,
                                             (0.5, 1.0, 4.0))
        self.assertEqual(list(frame.columns), ['factor', 'delay', 'reduction'])
        self.assertEqual(list(frame['factor']), [0.5, 1.0, 4.0])
        self.assertEqual(frame['reduction'][1], 0.0)

    def test_compare(self):
        """Runway and en-route relief are compared on the airport's flights"""
        frame = scenario.compare_runway_vs_enroute(congested_network(), itineraries(), BUFFERS,
                                                   ['BBB'])
        row = frame.iloc[0]
        self.assertEqual(row['airport'], 'BBB')
        self.assertGreater(row['runway'], 0.0)
        self.assertAlmostEqual(row['difference'], row['enroute'] - row['runway'])

        with self.assertRaises(ConfigError):
            scenario.compare_runway_vs_enroute(congested_network(), itineraries(), BUFFERS,
                                               ['P1'])
