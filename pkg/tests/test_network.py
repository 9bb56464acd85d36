# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Test module for airnet.network**
"""

import warnings

import numpy as np

from airnet import network
from airnet.exceptions import (FormatError, HorizonError, InsufficientDataError,
                               NodeLookupError, TruncationWarning)
from airnet.ingest import FlightRecord, TrackPoint, Trajectory
from airnet.queueing import QueueParams
from airnet.routes import Route

from tests import TestCase


HORIZON = network.Horizon(0.0, 240.0, 15.0, 8)


def flight(flight_id, origin, destination, dep, arr, registration=None):
    """Schedule record with times in minutes"""
    return FlightRecord(flight_id, origin, destination, dep * 60.0, arr * 60.0, None, None,
                        registration)


def straight_route(route_id='R1', od_pair=('AAA', 'BBB'), usage_prob=1.0, minutes=60.0):
    """Route along 30N from 110E to 116E"""
    centroid = np.column_stack((np.full(7, 30.0), np.linspace(110.0, 116.0, 7)))
    return Route(route_id, od_pair, centroid, usage_prob, 10, np.linspace(0.0, minutes, 7))


def node(node_id, kind=network.AIRPORT, location=None, radius=0.0, mu=4.0, k=1):
    """Queue node with zero demand over HORIZON"""
    return network.NetworkNode(node_id, kind, location, QueueParams(k, mu, 20),
                               HORIZON.empty_demand(), radius)


def small_network(routes=None, points=None):
    """Two airports and one point 12 NM north of the route"""
    routes = [straight_route()] if routes is None else routes
    points = [node('P1', network.POINT, (30.2, 113.0))] if points is None else points
    return network.MultiLayerNetwork(
        [node('AAA', location=(30.0, 110.0)), node('BBB', location=(30.0, 116.0))], points,
        routes, network.attach_points_to_routes(routes, points), HORIZON)


class TestHorizon(TestCase):
    """Tests for Horizon"""

    def test_defaults(self):
        """Default day runs from 04:00 for 24 hours"""
        horizon = network.Horizon()
        self.assertEqual(horizon.t0, 240.0)
        self.assertEqual(horizon.t_end, 1680.0)
        self.assertEqual(horizon.index(1680.0), 95)
        self.assertEqual(horizon.slot_start(4), 300.0)

    def test_invalid(self):
        """Non-positive lengths raise ValueError"""
        with self.assertRaises(ValueError):
            network.Horizon(dt=0.0)
        with self.assertRaises(ValueError):
            network.Horizon(m=0)

    def test_contains(self):
        """Horizon is half-open"""
        self.assertTrue(HORIZON.contains(240.0))
        self.assertFalse(HORIZON.contains(360.0))
        with self.assertRaises(HorizonError):
            HORIZON.index(200.0)

    def test_for_schedule(self):
        """Day start is the midnight before the first departure, shifted by t0"""
        day = 1704067200.0
        schedule = [FlightRecord('F1', 'AAA', 'BBB', day + 6 * 3600.0, day + 8 * 3600.0,
                                 None, None, None)]
        self.assertEqual(network.Horizon.for_schedule(schedule).day_start, day)

        # 02:00 on the next calendar day still belongs to the first simulated day
        schedule = [FlightRecord('F1', 'AAA', 'BBB', day + 26 * 3600.0, day + 27 * 3600.0,
                                 None, None, None)]
        self.assertEqual(network.Horizon.for_schedule(schedule).day_start, day)
        self.assertEqual(network.Horizon.for_schedule([]).day_start, 0.0)

    def test_minutes(self):
        """Timestamps convert to minutes after day start"""
        horizon = network.Horizon(day_start=3600.0)
        self.assertEqual(horizon.minutes(3600.0 + 900.0), 15.0)
        self.assertEqual(network.Horizon.from_record(horizon.to_record()), horizon)


class TestFixtures(TestCase):
    """Tests for the bundled fixture network"""

    def test_load(self):
        """Published airports and points load with their rates and orders"""
        fixture = network.load_fixture_network()
        self.assertEqual(len(fixture.airports), 56)
        self.assertEqual(len(fixture.points), 30)

        pek = fixture.lookup('PEK')
        self.assertEqual(pek.params.mu, 18.0)
        self.assertEqual(pek.params.k, 3)
        self.assertEqual(pek.kind, network.AIRPORT)

        point = fixture.lookup('2')
        self.assertEqual(point.params.mu, 20.0)
        self.assertEqual(point.params.k, 2)
        self.assertIsNone(point.location)
        self.assertEqual(point.demand.total, 0.0)

    def test_missing(self):
        """Unreadable fixtures raise FormatError"""
        with self.assertRaises(FormatError):
            network.load_fixture_network(airports_path='/nonexistent/airports.csv')
        with self.assertRaises(FormatError):
            network.load_fixture_network(airports_path=network.POINT_FIXTURE)


class TestServiceRate(TestCase):
    """Tests for service rate estimation"""

    def test_coverage(self):
        """Rate is the smallest count covering the requested share"""
        counts = np.arange(1, 11)
        self.assertEqual(network.estimate_service_rate(counts, 0.9), 9)
        self.assertEqual(network.estimate_service_rate(counts, 0.5), 5)

    def test_monotone(self):
        """Higher coverage never lowers the rate"""
        counts = np.random.default_rng(3).integers(0, 30, 200)
        rates = [network.estimate_service_rate(counts, coverage)
                 for coverage in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99)]
        self.assertEqual(rates, sorted(rates))

    def test_exclude(self):
        """Excluded sub-periods of every day are ignored"""
        counts = [50, 50, 1, 2, 50, 50, 3, 4]
        self.assertEqual(network.estimate_service_rate(counts, 0.9, (0, 1), 4), 4)

    def test_invalid(self):
        """Bad coverage or no data raise"""
        with self.assertRaises(ValueError):
            network.estimate_service_rate([1, 2], 1.0)
        with self.assertRaises(InsufficientDataError):
            network.estimate_service_rate([], 0.9)

    def test_airport_throughput(self):
        """Actual operations are binned from the first observed sub-period"""
        schedule = [FlightRecord('F1', 'AAA', 'BBB', 0.0, 0.0, 600.0, 3000.0, None),
                    FlightRecord('F2', 'BBB', 'AAA', 0.0, 0.0, 1200.0, 4000.0, None),
                    FlightRecord('F3', 'AAA', 'BBB', 0.0, 0.0, None, None, None)]
        counts = network.estimate_airport_throughput(schedule, 'AAA')
        self.assertEqual(list(counts), [1, 0, 0, 0, 1])
        self.assertEqual(len(network.estimate_airport_throughput(schedule, 'ZZZ')), 0)

    def test_enroute_throughput(self):
        """Passages are counted at the closest approach"""
        def trajectory(flight_id, start, lat):
            points = [TrackPoint(flight_id, start + 600.0 * step, lat, 110.0 + step, None,
                                 None, 'AAA', 'BBB', None) for step in range(7)]
            return Trajectory(flight_id, ('AAA', 'BBB'), points)

        trajectories = [trajectory('F1', 0.0, 30.0), trajectory('F2', 900.0, 30.0),
                        trajectory('F3', 0.0, 33.0)]
        point = node('P1', network.POINT, (30.2, 113.0))
        counts = network.estimate_enroute_throughput(trajectories, point)
        self.assertEqual(list(counts), [1, 1])


class TestAttach(TestCase):
    """Tests for attach_points_to_routes"""

    def test_corridor(self):
        """Points inside the corridor or their radius are crossed at the right offset"""
        points = [node('NEAR', network.POINT, (30.2, 113.0)),
                  node('FAR', network.POINT, (31.0, 113.0)),
                  node('WIDE', network.POINT, (31.0, 114.0), radius=80.0),
                  node('LOST', network.POINT)]
        crossings = network.attach_points_to_routes([straight_route()], points)
        self.assertEqual([crossing.point_id for crossing in crossings], ['NEAR', 'WIDE'])
        self.assertAlmostEqual(crossings[0].mean_offset, 30.0, delta=0.01)
        self.assertAlmostEqual(crossings[1].mean_offset, 40.0, delta=0.01)

    def test_between_vertices(self):
        """Offsets are interpolated along the closest segment"""
        centroid = np.column_stack((np.full(7, 30.0), np.linspace(110.0, 116.0, 7)))
        route = Route('R1', ('AAA', 'BBB'), centroid, 1.0, 10,
                      [0.0, 10.0, 20.0, 30.0, 50.0, 60.0, 70.0])
        points = [node('QUARTER', network.POINT, (30.1, 113.25)),
                  node('HALF', network.POINT, (29.9, 114.5))]
        crossings = network.attach_points_to_routes([route], points)
        offsets = {crossing.point_id: crossing.mean_offset for crossing in crossings}
        self.assertAlmostEqual(offsets['QUARTER'], 35.0, delta=0.05)
        self.assertAlmostEqual(offsets['HALF'], 55.0, delta=0.05)

    def test_invalid_corridor(self):
        """Non-positive corridor raises ValueError"""
        with self.assertRaises(ValueError):
            network.attach_points_to_routes([], [], corridor=0.0)


class TestDemand(TestCase):
    """Tests for demand estimation"""

    def test_airport(self):
        """Departures and arrivals count in their scheduled sub-periods"""
        schedule = [flight('F1', 'AAA', 'BBB', 240.0, 300.0),
                    flight('F2', 'BBB', 'AAA', 250.0, 320.0)]
        demand = network.estimate_airport_demand(schedule, 'AAA', HORIZON)
        self.assertEqual(list(demand.rates), [1, 0, 0, 0, 0, 1, 0, 0])

    def test_enroute_split(self):
        """Departures split over routes by usage probability"""
        routes = [straight_route('R1', usage_prob=0.75),
                  straight_route('R2', usage_prob=0.25, minutes=100.0)]
        net = small_network(routes)
        profiles = network.derive_enroute_demand(net, [flight('F1', 'AAA', 'BBB', 240.0, 300.0)])
        rates = profiles['P1'].rates
        self.assertAlmostEqual(rates[2], 0.75)
        self.assertAlmostEqual(rates[3], 0.25)
        self.assertAlmostEqual(rates.sum(), 1.0)

    def test_enroute_truncation(self):
        """Crossings past the horizon end stay in the last sub-period"""
        net = small_network()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            profiles = network.derive_enroute_demand(
                net, [flight('F1', 'AAA', 'BBB', 340.0, 355.0)])
        self.assertEqual(profiles['P1'].rates[7], 1.0)
        self.assertTrue(any(issubclass(item.category, TruncationWarning) for item in caught))

    def test_build(self):
        """Unknown airports and flights outside the horizon are dropped"""
        routes = [straight_route(), straight_route('R2', ('AAA', 'ZZZ'))]
        schedule = [flight('F1', 'AAA', 'BBB', 240.0, 300.0),
                    flight('F2', 'AAA', 'ZZZ', 240.0, 300.0),
                    flight('F3', 'AAA', 'BBB', 100.0, 160.0)]
        airports = [node('AAA', location=(30.0, 110.0)), node('BBB', location=(30.0, 116.0))]
        points = [node('P1', network.POINT, (30.2, 113.0))]

        net = network.build_network(airports, points, routes, schedule, HORIZON)
        self.assertEqual([route.route_id for route in net.routes], ['R1'])
        self.assertEqual(net.lookup('AAA').demand.total, 1.0)
        self.assertEqual(net.lookup('BBB').demand.total, 1.0)
        self.assertEqual(net.lookup('P1').demand.total, 1.0)
        # Inputs are left untouched
        self.assertEqual(airports[0].demand.total, 0.0)

    def test_select_day(self):
        """Only flights wholly inside the horizon are kept"""
        schedule = [flight('F1', 'AAA', 'BBB', 240.0, 300.0),
                    flight('F2', 'AAA', 'BBB', 340.0, 400.0)]
        self.assertEqual([record.flight_id for record in network.select_day(schedule, HORIZON)],
                         ['F1'])


class TestMultiLayerNetwork(TestCase):
    """Tests for MultiLayerNetwork"""

    def test_lookup(self):
        """Nodes and routes are found by identifier"""
        net = small_network()
        self.assertEqual(net.lookup('P1').kind, network.POINT)
        self.assertEqual([item.node_id for item in net.nodes], ['AAA', 'BBB', 'P1'])
        self.assertEqual(net.routes_for(('AAA', 'BBB'))[0].route_id, 'R1')
        self.assertEqual(len(net.crossings_for('R1')), 1)
        self.assertEqual(net.crossings_for('R9'), [])

        with self.assertRaises(NodeLookupError):
            net.lookup('ZZZ')
        with self.assertRaises(KeyError):
            net.route('R9')

    def test_dangling(self):
        """Unknown route endpoints or crossings raise FormatError"""
        with self.assertRaises(FormatError):
            network.MultiLayerNetwork([node('AAA')], [], [straight_route()], horizon=HORIZON)
        with self.assertRaises(FormatError):
            network.MultiLayerNetwork([node('AAA'), node('BBB')], [], [straight_route()],
                                      [network.RouteCrossing('R1', 'P9', 1.0)], HORIZON)

    def test_copy(self):
        """Copies have independent parameters and demand"""
        net = small_network()
        clone = net.copy()
        clone.lookup('AAA').params.mu = 8.0
        clone.lookup('AAA').demand.rates[0] = 5.0
        self.assertEqual(net.lookup('AAA').params.mu, 4.0)
        self.assertEqual(net.lookup('AAA').demand.rates[0], 0.0)

    def test_record(self):
        """Records rebuild an equivalent network"""
        net = small_network()
        net.lookup('P1').demand.rates[3] = 2.5
        rebuilt = network.MultiLayerNetwork.from_record(net.to_record())
        self.assertEqual(rebuilt.to_record(), net.to_record())
        self.assertEqual(rebuilt.horizon, HORIZON)

    def test_malformed_record(self):
        """Malformed records raise FormatError"""
        with self.assertRaises(FormatError):
            network.MultiLayerNetwork.from_record({'horizon': HORIZON.to_record()})

    def test_invalid_kind(self):
        """Unknown node kinds raise ValueError"""
        with self.assertRaises(ValueError):
            network.NetworkNode('X', 'runway', None, QueueParams(1, 4.0), HORIZON.empty_demand())
