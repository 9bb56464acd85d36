# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Network Submodule**

Assembles the multi-layer network of airports, en-route congestion points, and routes,
and estimates the demand and service parameters of every queue node
"""

from collections import OrderedDict, defaultdict, namedtuple
import math
import os
import warnings

import numpy as np
import pandas as pd

from airnet.exceptions import (FormatError, InsufficientDataError, NodeLookupError,
                               TruncationWarning)
from airnet.queueing import DEFAULT_CAPACITY, DemandProfile, QueueParams, index
from airnet.routes import Route
from airnet._util import LOGGER, project_nm


AIRPORT = 'airport'
POINT = 'point'

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')
AIRPORT_FIXTURE = os.path.join(DATA_DIR, 'airports.csv')
POINT_FIXTURE = os.path.join(DATA_DIR, 'enroute_points.csv')

DEFAULT_T0 = 240.0
DEFAULT_DT = 15.0
DEFAULT_SLOTS = 96
DEFAULT_CORRIDOR = 30.0
DEFAULT_COVERAGE = 0.9

RouteCrossing = namedtuple('RouteCrossing', ('route_id', 'point_id', 'mean_offset'))


class Horizon(object):
    """
    Args:
        day_start(float): Epoch seconds of the day's midnight (UTC)
        t0(float): Horizon start in minutes after ``day_start``
        dt(float): Sub-period length in minutes
        m(int): Number of sub-periods

    **Simulated day**

    Simulation times are minutes after ``day_start``. The default horizon runs from
    04:00 to 04:00 the next day in 96 sub-periods of 15 minutes.
    """

    __slots__ = ('day_start', 't0', 'dt', 'm')

    # pylint: disable-next=too-many-arguments,too-many-positional-arguments
    def __init__(self, day_start=0.0, t0=DEFAULT_T0, dt=DEFAULT_DT, m=DEFAULT_SLOTS):
        if dt <= 0 or m < 1:
            raise ValueError('Horizon needs dt > 0 and m >= 1, received %r, %r' % (dt, m))
        self.day_start = float(day_start)
        self.t0 = float(t0)
        self.dt = float(dt)
        self.m = int(m)

    def __repr__(self):
        return '%s(day_start=%r, t0=%r, dt=%r, m=%r)' % (self.__class__.__name__,
                                                         self.day_start, self.t0, self.dt,
                                                         self.m)

    def __eq__(self, other):
        return isinstance(other, Horizon) and self.to_record() == other.to_record()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    @classmethod
    def for_schedule(cls, schedule, t0=DEFAULT_T0, dt=DEFAULT_DT, m=DEFAULT_SLOTS):
        """
        Args:
            schedule(list): :py:class:`~airnet.ingest.FlightRecord` objects

        Returns:
            Horizon: Day containing the earliest scheduled departure
        """
        if not schedule:
            return cls(0.0, t0, dt, m)
        first = min(record.sched_dep for record in schedule)
        return cls(math.floor((first - t0 * 60.0) / 86400.0) * 86400.0, t0, dt, m)

    @property
    def t_end(self):
        """:py:class:`float` -- Horizon end in minutes"""
        return self.t0 + self.m * self.dt

    def minutes(self, timestamp):
        """
        Args:
            timestamp(float): Epoch seconds

        Returns:
            float: Minutes after ``day_start``
        """
        return (timestamp - self.day_start) / 60.0

    def contains(self, t):
        """Whether ``t`` minutes lies in ``[t0, t_end)``"""
        return self.t0 <= t < self.t_end

    def index(self, t):
        """
        Sub-period of ``t`` minutes; the horizon end maps to the last sub-period
        """
        return min(index(t, self.dt, self.t0, self.t_end), self.m - 1)

    def slot_start(self, slot):
        """
        Returns:
            float: Start of a sub-period in minutes
        """
        return self.t0 + slot * self.dt

    def empty_demand(self):
        """
        Returns:
            :py:class:`~airnet.queueing.DemandProfile`: Zero demand over the horizon
        """
        return DemandProfile.zeros(self.m, self.dt, self.t0)

    def to_record(self):
        """
        Returns:
            dict: JSON-compatible representation
        """
        return {'day_start': self.day_start, 't0': self.t0, 'dt': self.dt, 'm': self.m}

    @classmethod
    def from_record(cls, record):
        """Inverse of :py:meth:`to_record`"""
        return cls(record['day_start'], record['t0'], record['dt'], record['m'])


class NetworkNode(object):
    """
    Args:
        node_id(str): Airport code or point identifier
        kind(str): :py:data:`AIRPORT` or :py:data:`POINT`
        location(tuple): (lat, lon), or :py:data:`None` when unknown
        params(QueueParams): Service parameters
        demand(DemandProfile): Demand profile
        radius(float): Extent in nautical miles, points only

    **Single-server queue node**

    An airport serves arrivals and departures as one stream.
    """

    __slots__ = ('node_id', 'kind', 'location', 'params', 'demand', 'radius')

    # pylint: disable-next=too-many-arguments,too-many-positional-arguments
    def __init__(self, node_id, kind, location, params, demand, radius=0.0):
        if kind not in (AIRPORT, POINT):
            raise ValueError("kind must be '%s' or '%s', received %r" % (AIRPORT, POINT, kind))
        self.node_id = str(node_id)
        self.kind = kind
        self.location = None if location is None else tuple(float(value) for value in location)
        self.params = params
        self.demand = demand
        self.radius = float(radius)

    def __repr__(self):
        return '%s(%r, %s, mu=%s, k=%d)' % (self.__class__.__name__, self.node_id, self.kind,
                                            self.params.mu, self.params.k)

    def copy(self):
        """
        Returns:
            NetworkNode: Copy with independent parameters and demand
        """
        return NetworkNode(self.node_id, self.kind, self.location, self.params.copy(),
                           self.demand.copy(), self.radius)

    def to_record(self):
        """
        Returns:
            dict: JSON-compatible representation
        """
        mu = self.params.mu
        return {'node_id': self.node_id, 'kind': self.kind,
                'location': None if self.location is None else list(self.location),
                'radius': self.radius, 'k': self.params.k,
                'mu': mu if isinstance(mu, float) else [float(value) for value in mu],
                'capacity': self.params.capacity,
                'demand': [float(value) for value in self.demand.rates]}


class MultiLayerNetwork(object):
    """
    Args:
        airports(list): Airport :py:class:`NetworkNode` objects
        points(list): En-route point :py:class:`NetworkNode` objects
        routes(list): :py:class:`~airnet.routes.Route` objects
        crossings(list): :py:class:`RouteCrossing` tuples
        horizon(Horizon): Simulated day

    **Airports, en-route congestion points, and the routes linking them**

    Raises:
        FormatError: A crossing or route references an unknown node or route
    """

    __slots__ = ('_airports', '_points', '_routes', 'crossings', 'horizon', '_by_route')

    # pylint: disable-next=too-many-arguments,too-many-positional-arguments
    def __init__(self, airports, points, routes=(), crossings=(), horizon=None):
        self._airports = OrderedDict((node.node_id, node) for node in airports)
        self._points = OrderedDict((node.node_id, node) for node in points)
        self._routes = OrderedDict((route.route_id, route) for route in routes)
        self.crossings = sorted(crossings, key=lambda crossing: (crossing.route_id,
                                                                 crossing.mean_offset,
                                                                 crossing.point_id))
        self.horizon = horizon or Horizon()

        self._by_route = defaultdict(list)
        for crossing in self.crossings:
            self._by_route[crossing.route_id].append(crossing)

        self.validate()

    def __repr__(self):
        return '%s(airports=%d, points=%d, routes=%d, crossings=%d)' % (
            self.__class__.__name__, len(self._airports), len(self._points),
            len(self._routes), len(self.crossings))

    @property
    def airports(self):
        """:py:class:`list` -- Airport nodes"""
        return list(self._airports.values())

    @property
    def points(self):
        """:py:class:`list` -- En-route point nodes"""
        return list(self._points.values())

    @property
    def routes(self):
        """:py:class:`list` -- Routes"""
        return list(self._routes.values())

    @property
    def nodes(self):
        """:py:class:`list` -- Airport nodes followed by point nodes"""
        return self.airports + self.points

    def validate(self):
        """
        Raises:
            FormatError: Dangling crossing or route endpoint
        """

        for crossing in self.crossings:
            if crossing.route_id not in self._routes or crossing.point_id not in self._points:
                raise FormatError('Crossing %s/%s references an unknown route or point' %
                                  (crossing.route_id, crossing.point_id))
        for route in self._routes.values():
            for code in route.od_pair:
                if code not in self._airports:
                    raise FormatError('Route %s references unknown airport %s' %
                                      (route.route_id, code))

    def lookup(self, node_id):
        """
        Args:
            node_id(str): Airport code or point identifier

        Returns:
            NetworkNode: The node

        Raises:
            NodeLookupError: No such node
        """
        node_id = str(node_id)
        node = self._airports.get(node_id) or self._points.get(node_id)
        if node is None:
            raise NodeLookupError('Unknown node %s' % node_id,
                                  friendly='no airport or point named %s' % node_id)
        return node

    def route(self, route_id):
        """
        Raises:
            NodeLookupError: No such route
        """
        try:
            return self._routes[route_id]
        except KeyError:
            raise NodeLookupError('Unknown route %s' % route_id) from None

    def routes_for(self, od_pair):
        """
        Returns:
            list: Routes of an OD pair
        """
        od_pair = tuple(od_pair)
        return [route for route in self._routes.values() if route.od_pair == od_pair]

    def crossings_for(self, route_id):
        """
        Returns:
            list: Crossings of a route ordered by offset
        """
        return list(self._by_route.get(route_id, ()))

    def copy(self):
        """
        Returns:
            MultiLayerNetwork: Copy with independent node parameters and demand
        """
        return MultiLayerNetwork([node.copy() for node in self._airports.values()],
                                 [node.copy() for node in self._points.values()],
                                 self._routes.values(), self.crossings, self.horizon)

    def to_record(self):
        """
        Returns:
            dict: JSON-compatible representation of the whole network
        """
        return {'horizon': self.horizon.to_record(),
                'airports': [node.to_record() for node in self._airports.values()],
                'points': [node.to_record() for node in self._points.values()],
                'routes': [route.to_record() for route in self._routes.values()],
                'crossings': [crossing._asdict() for crossing in self.crossings]}

    @classmethod
    def from_record(cls, record):
        """
        Args:
            record(dict): Output of :py:meth:`to_record`

        Returns:
            MultiLayerNetwork: Rebuilt network

        Raises:
            FormatError: Malformed record
        """

        try:
            horizon = Horizon.from_record(record['horizon'])

            def node(item):
                return NetworkNode(item['node_id'], item['kind'], item['location'],
                                   QueueParams(item['k'], item['mu'], item['capacity']),
                                   DemandProfile(item['demand'], horizon.dt, horizon.t0),
                                   item.get('radius', 0.0))

            return cls([node(item) for item in record['airports']],
                       [node(item) for item in record['points']],
                       [Route.from_record(item) for item in record['routes']],
                       [RouteCrossing(item['route_id'], item['point_id'],
                                      float(item['mean_offset']))
                        for item in record['crossings']],
                       horizon)
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError('Malformed network record: %s' % e) from None


def _closest_approach(centroid, lat, lon):
    """
    Distance in nautical miles from a location to a polyline, the segment reaching it,
    and the fraction along that segment
    """

    x, y = project_nm(centroid[:, 0], centroid[:, 1], lat, lon)
    start = np.column_stack((x[:-1], y[:-1]))
    delta = np.column_stack((np.diff(x), np.diff(y)))

    squared = np.einsum('ij,ij->i', delta, delta)
    with np.errstate(invalid='ignore', divide='ignore'):
        fraction = np.where(squared > 0, -np.einsum('ij,ij->i', start, delta) / squared, 0.0)
    fraction = np.clip(fraction, 0.0, 1.0)

    nearest = start + fraction[:, None] * delta
    distance = np.hypot(nearest[:, 0], nearest[:, 1])
    segment = int(np.argmin(distance))
    return float(distance[segment]), segment, float(fraction[segment])


def attach_points_to_routes(routes, points, corridor=DEFAULT_CORRIDOR):
    """
    Args:
        routes(list): :py:class:`~airnet.routes.Route` objects
        points(list): Objects with ``point_id`` or ``node_id``, a (lat, lon) ``centroid``
            or ``location``, and a ``radius``
        corridor(float): Half-width in nautical miles

    Returns:
        list: :py:class:`RouteCrossing` tuples ordered by route and offset

    A route crosses a point when its centroid polyline passes within the corridor or the
    point radius, whichever is larger. The offset is the route's mean elapsed time at the
    closest approach.
    """

    if corridor <= 0:
        raise ValueError('corridor must be positive, received %r' % corridor)

    located = []
    for point in points:
        location = getattr(point, 'centroid', None) or getattr(point, 'location', None)
        point_id = getattr(point, 'point_id', None) or getattr(point, 'node_id')
        if location is None:
            LOGGER.debug('Point %s has no location; not attached', point_id)
            continue
        located.append((point_id, location, max(corridor, getattr(point, 'radius', 0.0))))

    crossings = []
    for route in routes:
        if len(route.centroid) < 2:
            continue
        for point_id, (lat, lon), reach in located:
            distance, segment, fraction = _closest_approach(route.centroid, lat, lon)
            if distance > reach:
                continue
            elapsed = route.elapsed
            offset = elapsed[segment] + fraction * (elapsed[segment + 1] - elapsed[segment])
            crossings.append(RouteCrossing(route.route_id, str(point_id), max(float(offset), 0.0)))

    crossings.sort(key=lambda crossing: (crossing.route_id, crossing.mean_offset,
                                         crossing.point_id))
    LOGGER.info('Attached %d route crossings over %d routes and %d points', len(crossings),
                len(routes), len(located))
    return crossings


def select_day(schedule, horizon):
    """
    Args:
        schedule(list): :py:class:`~airnet.ingest.FlightRecord` objects
        horizon(Horizon): Simulated day

    Returns:
        list: Flights departing and arriving within the horizon
    """

    kept = [record for record in schedule
            if horizon.contains(horizon.minutes(record.sched_dep)) and
            horizon.contains(horizon.minutes(record.sched_arr))]
    if len(kept) < len(schedule):
        LOGGER.info('Kept %d of %d flights inside the horizon', len(kept), len(schedule))
    return kept


def estimate_airport_demand(schedule, airport, horizon):
    """
    Args:
        schedule(list): :py:class:`~airnet.ingest.FlightRecord` objects
        airport(str): Airport code
        horizon(Horizon): Simulated day

    Returns:
        :py:class:`~airnet.queueing.DemandProfile`: Scheduled departures plus arrivals
        per sub-period

    Raises:
        HorizonError: A scheduled time of the airport lies outside the horizon
    """

    demand = horizon.empty_demand()
    for record in schedule:
        if record.origin == airport:
            demand.rates[horizon.index(horizon.minutes(record.sched_dep))] += 1
        if record.destination == airport:
            demand.rates[horizon.index(horizon.minutes(record.sched_arr))] += 1
    return demand


def estimate_service_rate(counts, coverage=DEFAULT_COVERAGE, exclude=None,
                          slots_per_day=DEFAULT_SLOTS):
    """
    Args:
        counts(array): Operations served per sub-period over the observation period
        coverage(float): Fraction of sub-periods the rate must cover
        exclude(tuple): (first, last) sub-period of each day left out, inclusive,
            or :py:data:`None`
        slots_per_day(int): Sub-periods per day, used with ``exclude``

    Returns:
        int: Smallest count covering at least ``coverage`` of the sub-periods

    Raises:
        InsufficientDataError: No sub-periods remain
    """

    if not 0 < coverage < 1:
        raise ValueError('coverage must lie in (0, 1), received %r' % coverage)

    counts = np.asarray(counts, dtype=float)
    if exclude is not None:
        first, last = exclude
        position = np.arange(len(counts)) % slots_per_day
        counts = counts[(position < first) | (position > last)]
    if not len(counts):
        raise InsufficientDataError('No throughput observations to estimate a service rate')

    ordered = np.sort(counts)
    rank = int(math.ceil(coverage * len(ordered) - 1e-9))
    return int(ordered[max(rank, 1) - 1])


def _bin_counts(minutes, dt):
    if not len(minutes):
        return np.zeros(0, dtype=int)
    slots = np.floor(np.asarray(minutes, dtype=float) / dt).astype(int)
    return np.bincount(slots - slots.min())


def estimate_airport_throughput(schedule, airport, dt=DEFAULT_DT):
    """
    Args:
        schedule(list): :py:class:`~airnet.ingest.FlightRecord` objects with actual times
        airport(str): Airport code
        dt(float): Sub-period length in minutes

    Returns:
        :py:class:`numpy.ndarray`: Actual departures plus arrivals per sub-period, from the
        first to the last observed sub-period
    """

    minutes = [record.actual_dep / 60.0 for record in schedule
               if record.origin == airport and record.actual_dep is not None]
    minutes += [record.actual_arr / 60.0 for record in schedule
                if record.destination == airport and record.actual_arr is not None]
    return _bin_counts(minutes, dt)


def estimate_enroute_throughput(trajectories, point, corridor=DEFAULT_CORRIDOR, dt=DEFAULT_DT):
    """
    Args:
        trajectories(list): :py:class:`~airnet.ingest.Trajectory` objects
        point(object): Point with ``centroid`` or ``location`` and ``radius``
        corridor(float): Half-width in nautical miles
        dt(float): Sub-period length in minutes

    Returns:
        :py:class:`numpy.ndarray`: Passages per sub-period, from the first to the last
        observed sub-period

    A trajectory passes the point when it comes within the corridor or the point radius;
    the passage time is interpolated at the closest approach.
    """

    lat, lon = getattr(point, 'centroid', None) or point.location
    reach = max(corridor, getattr(point, 'radius', 0.0))

    passages = []
    for traj in trajectories:
        if len(traj) < 2:
            continue
        distance, segment, fraction = _closest_approach(traj.coordinates, lat, lon)
        if distance <= reach:
            stamps = traj.timestamps
            passages.append((stamps[segment] + fraction * (stamps[segment + 1] -
                                                           stamps[segment])) / 60.0)

    return _bin_counts(passages, dt)


def derive_enroute_demand(network, schedule):
    """
    Args:
        network(MultiLayerNetwork): Network with routes and crossings
        schedule(list): :py:class:`~airnet.ingest.FlightRecord` objects of the day

    Returns:
        dict: Point identifier to :py:class:`~airnet.queueing.DemandProfile`

    Departures of an OD pair are split over its routes by usage probability and appear at
    each crossed point in the sub-period of departure sub-period start plus offset. Demand
    past the horizon end is kept in the last sub-period with a
    :py:exc:`~airnet.exceptions.TruncationWarning`.
    """

    horizon = network.horizon
    profiles = {node.node_id: horizon.empty_demand() for node in network.points}

    departures = defaultdict(lambda: np.zeros(horizon.m))
    for record in schedule:
        departures[record.od_pair][horizon.index(horizon.minutes(record.sched_dep))] += 1

    truncated = 0.0
    for od_pair in sorted(departures):
        counts = departures[od_pair]
        for route in network.routes_for(od_pair):
            for crossing in network.crossings_for(route.route_id):
                rates = profiles[crossing.point_id].rates
                for slot in np.flatnonzero(counts):
                    passage = horizon.slot_start(slot) + crossing.mean_offset
                    if passage >= horizon.t_end:
                        truncated += counts[slot] * route.usage_prob
                    rates[horizon.index(min(passage, horizon.t_end))] += \
                        counts[slot] * route.usage_prob

    if truncated:
        warnings.warn('%.3f expected crossings past the horizon end kept in the last '
                      'sub-period' % truncated, TruncationWarning)

    return profiles


def _read_fixture(path, columns):
    try:
        frame = pd.read_csv(path, dtype={'code': str, 'point_id': str})
    except (OSError, pd.errors.ParserError) as e:
        raise FormatError('Unable to read fixture %s: %s' % (path, e),
                          friendly='fixture %s could not be read' % path) from None

    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise FormatError('Fixture %s is missing column(s) %s' % (path, ', '.join(missing)))
    return frame


def _fixture_nodes(frame, id_column, kind, horizon, capacity):
    nodes = []
    for row in frame.itertuples(index=False):
        record = row._asdict()
        try:
            location = None if pd.isna(record['lat']) or pd.isna(record['lon']) else \
                (record['lat'], record['lon'])
            nodes.append(NetworkNode(record[id_column], kind, location,
                                     QueueParams(int(record['k']), float(record['mu']),
                                                 capacity),
                                     horizon.empty_demand(),
                                     0.0 if pd.isna(record.get('radius', 0.0))
                                     else record.get('radius', 0.0)))
        except (TypeError, ValueError) as e:
            raise FormatError('Malformed fixture row for %s: %s' % (record[id_column], e)) \
                from None
    return nodes


def load_fixture_network(airports_path=AIRPORT_FIXTURE, points_path=POINT_FIXTURE,
                         horizon=None, capacity=DEFAULT_CAPACITY):
    """
    Args:
        airports_path(str): Airport fixture with columns code, lat, lon, mu, k
        points_path(str): Point fixture with columns point_id, lat, lon, radius, mu, k
        horizon(Horizon): Simulated day
        capacity(int): Queue state truncation for every node

    Returns:
        MultiLayerNetwork: Nodes with the published service rates (per 15 minutes) and
        Erlang orders, no routes, and zero demand

    Raises:
        FormatError: Missing or malformed fixture
    """

    horizon = horizon or Horizon()
    airports = _fixture_nodes(_read_fixture(airports_path, ('code', 'lat', 'lon', 'mu', 'k')),
                              'code', AIRPORT, horizon, capacity)
    points = _fixture_nodes(_read_fixture(points_path, ('point_id', 'lat', 'lon', 'mu', 'k')),
                            'point_id', POINT, horizon, capacity)

    LOGGER.info('Loaded fixture network: %d airports, %d points', len(airports), len(points))
    return MultiLayerNetwork(airports, points, horizon=horizon)


def build_network(airports, points, routes, schedule, horizon, corridor=DEFAULT_CORRIDOR):
    """
    Args:
        airports(list): Airport :py:class:`NetworkNode` objects
        points(list): Point :py:class:`NetworkNode` objects
        routes(list): :py:class:`~airnet.routes.Route` objects
        schedule(list): :py:class:`~airnet.ingest.FlightRecord` objects
        horizon(Horizon): Simulated day
        corridor(float): Route-point incidence half-width in nautical miles

    Returns:
        MultiLayerNetwork: Network with crossings and demand estimated from the schedule

    Flights outside the horizon or between airports missing from ``airports`` are ignored.
    Routes with an unknown airport are dropped.
    """

    codes = {node.node_id for node in airports}
    routes = [route for route in routes if set(route.od_pair) <= codes]
    schedule = [record for record in select_day(schedule, horizon)
                if record.origin in codes and record.destination in codes]

    network = MultiLayerNetwork([node.copy() for node in airports],
                                [node.copy() for node in points], routes,
                                attach_points_to_routes(routes, points, corridor), horizon)
    initialize_demand(network, schedule)
    return network


def initialize_demand(network, schedule):
    """
    Args:
        network(MultiLayerNetwork): Network to update in place
        schedule(list): :py:class:`~airnet.ingest.FlightRecord` objects of the day

    Sets every node's demand profile from the schedule
    """

    for node in network.airports:
        node.demand = estimate_airport_demand(schedule, node.node_id, network.horizon)
    for point_id, demand in derive_enroute_demand(network, schedule).items():
        network.lookup(point_id).demand = demand
