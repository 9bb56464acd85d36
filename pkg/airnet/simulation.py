# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Simulation Submodule**

Runs the day loop: queue evaluation at every node, delay propagation along aircraft
itineraries, and demand updates, sub-period by sub-period

Times are minutes after the horizon's ``day_start``. Every node time stored on a flight is
the time the flight joins that node's queue; the expected wait there is stored beside it.
"""

from collections import OrderedDict, defaultdict, namedtuple
import warnings

import numpy as np
import pandas as pd

from airnet.exceptions import DivergenceError, HorizonError, TruncationWarning
from airnet.network import AIRPORT, POINT, initialize_demand
from airnet.queueing import QueueEngine
from airnet._util import LOGGER


DEFAULT_A_BUFFER = 15.0
DEFAULT_E_BUFFER = 10.0
MAX_ITERATIONS = 50

UNPROCESSED = 'unprocessed'
PROCESSED = 'processed'

DEPARTURE = 'departure'
CROSSING = 'crossing'
ARRIVAL = 'arrival'

PropagationDecision = namedtuple('PropagationDecision',
                                 ('departure_push', 'arrival_push', 'propagate'))
NodeDelay = namedtuple('NodeDelay', ('node_id', 'kind', 'local', 'propagated', 'traffic'))


class Buffers(object):
    """
    Args:
        a_buffer(float): Ground turnaround slack in minutes
        e_buffer(float): Flight-time slack in minutes

    **Slack absorbing delay before it propagates, the same for all flights**
    """

    __slots__ = ('a_buffer', 'e_buffer')

    def __init__(self, a_buffer=DEFAULT_A_BUFFER, e_buffer=DEFAULT_E_BUFFER):
        if a_buffer < 0 or e_buffer < 0:
            raise ValueError('Buffers must be non-negative, received %r, %r' %
                             (a_buffer, e_buffer))
        self.a_buffer = float(a_buffer)
        self.e_buffer = float(e_buffer)

    def __repr__(self):
        return '%s(a_buffer=%r, e_buffer=%r)' % (self.__class__.__name__, self.a_buffer,
                                                 self.e_buffer)


class Leg(object):
    """
    Args:
        node_id(str): Node the flight queues at
        role(str): ``departure``, ``crossing``, or ``arrival``
        scheduled(float): Scheduled queue entry time
        anchor(float): Time the leg's demand was booked at
        booked_slot(int): Sub-period holding the leg's demand
        weight(float): Expected number of operations, the route usage probability
            for crossings
        route_id(str): Route of a crossing

    **One node visit of a flight**
    """

    __slots__ = ('node_id', 'role', 'scheduled', 'adjusted', 'wait', 'anchor', 'booked_slot',
                 'weight', 'route_id')

    # pylint: disable-next=too-many-arguments,too-many-positional-arguments
    def __init__(self, node_id, role, scheduled, anchor, booked_slot, weight=1.0, route_id=None):
        self.node_id = node_id
        self.role = role
        self.scheduled = float(scheduled)
        self.adjusted = float(scheduled)
        self.wait = 0.0
        self.anchor = float(anchor)
        self.booked_slot = int(booked_slot)
        self.weight = float(weight)
        self.route_id = route_id

    def __repr__(self):
        return '%s(%r, %s, scheduled=%.2f, adjusted=%.2f, wait=%.2f)' % (
            self.__class__.__name__, self.node_id, self.role, self.scheduled, self.adjusted,
            self.wait)

    @property
    def delay(self):
        """:py:class:`float` -- Adjusted minus scheduled entry time"""
        return self.adjusted - self.scheduled

    @property
    def passage(self):
        """:py:class:`float` -- Entry time plus expected wait"""
        return self.adjusted + self.wait

    @property
    def demand_time(self):
        """:py:class:`float` -- Booking time shifted by the leg's delay"""
        return self.anchor + self.delay


class FlightEvent(object):
    """
    Args:
        flight(FlightRecord): Scheduled flight
        legs(list): :py:class:`Leg` objects: departure, crossings by offset, arrival

    **Scheduled and adjusted times of one flight at every node it visits**
    """

    __slots__ = ('flight', 'legs', 'status', 'departure_delay', 'enroute_wait', 'decision')

    def __init__(self, flight, legs):
        self.flight = flight
        self.legs = list(legs)
        self.status = UNPROCESSED
        self.departure_delay = 0.0
        self.enroute_wait = 0.0
        self.decision = PropagationDecision(0.0, 0.0, False)

    def __repr__(self):
        return '%s(%r, %s, legs=%d, delay=%.2f)' % (self.__class__.__name__, self.flight_id,
                                                     self.status, len(self.legs),
                                                     self.arrival_delay)

    @property
    def flight_id(self):
        """:py:class:`str` -- Flight identifier"""
        return self.flight.flight_id

    @property
    def departure(self):
        """:py:class:`Leg` -- Origin airport leg"""
        return self.legs[0]

    @property
    def arrival(self):
        """:py:class:`Leg` -- Destination airport leg"""
        return self.legs[-1]

    @property
    def crossings(self):
        """:py:class:`list` -- En-route legs"""
        return self.legs[1:-1]

    @property
    def processed(self):
        """:py:class:`bool` -- Whether the flight's times are final"""
        return self.status == PROCESSED

    @property
    def completion(self):
        """:py:class:`float` -- Adjusted arrival queue entry"""
        return self.arrival.adjusted

    @property
    def arrival_delay(self):
        """:py:class:`float` -- Time past scheduled arrival at which the flight is on the ground"""
        return self.arrival.passage - self.arrival.scheduled

    def times(self):
        """
        Returns:
            tuple: Adjusted entry time and wait of every leg
        """
        return tuple((leg.adjusted, leg.wait) for leg in self.legs)

    def retime(self, departure_push, buffers, wait_of, until=None):
        """
        Args:
            departure_push(float): Minutes the departure is held by the inbound aircraft
            buffers(Buffers): Slack
            wait_of(callable): ``wait_of(node_id, t)`` expected wait in minutes
            until(float): Legs entering at or after this time get no wait yet

        Recompute every leg from the departure push. Crossings of a route are delayed by the
        departure delay plus the waits at earlier points of that route; the en-route wait is
        the usage-weighted sum of the route totals.
        """

        def wait(leg):
            if until is not None and leg.adjusted >= until:
                return 0.0
            return wait_of(leg.node_id, leg.adjusted)

        origin = self.departure
        origin.adjusted = origin.scheduled + departure_push
        origin.wait = wait(origin)
        self.departure_delay = departure_push + origin.wait

        upstream = defaultdict(float)
        weights = {}
        for leg in self.crossings:
            leg.adjusted = leg.scheduled + self.departure_delay + upstream[leg.route_id]
            leg.wait = wait(leg)
            upstream[leg.route_id] += leg.wait
            weights[leg.route_id] = leg.weight
        self.enroute_wait = sum(weights[route_id] * upstream[route_id]
                                for route_id in sorted(upstream))

        arrival_push = dpa_significant(0.0, self.departure_delay, self.enroute_wait,
                                       buffers).arrival_push
        self.decision = PropagationDecision(departure_push, arrival_push,
                                            departure_push > 0 or arrival_push > 0)

        destination = self.arrival
        destination.adjusted = destination.scheduled + arrival_push
        destination.wait = wait(destination)


def build_events(network, itineraries):
    """
    Args:
        network(MultiLayerNetwork): Network with routes and crossings
        itineraries(list): :py:class:`~airnet.ingest.Itinerary` objects

    Returns:
        list: One list of :py:class:`FlightEvent` objects per itinerary

    Each flight visits its origin, every crossing of every route of its OD pair weighted
    by usage probability, and its destination. Demand of a crossing is booked at its
    departure sub-period start plus the crossing offset.

    Raises:
        HorizonError: A scheduled time lies outside the horizon
    """

    horizon = network.horizon
    chains = []
    for itinerary in itineraries:
        chain = []
        for flight in itinerary.flights:
            departure = horizon.minutes(flight.sched_dep)
            arrival = horizon.minutes(flight.sched_arr)
            for value in (departure, arrival):
                if not horizon.contains(value):
                    raise HorizonError('Flight %s time %.2f outside horizon [%.2f, %.2f)' %
                                       (flight.flight_id, value, horizon.t0, horizon.t_end))

            slot = horizon.index(departure)
            legs = [Leg(flight.origin, DEPARTURE, departure, departure, slot)]

            crossings = []
            for route in network.routes_for(flight.od_pair):
                for crossing in network.crossings_for(route.route_id):
                    anchor = horizon.slot_start(slot) + crossing.mean_offset
                    crossings.append(Leg(crossing.point_id, CROSSING,
                                         departure + crossing.mean_offset, anchor,
                                         horizon.index(min(anchor, horizon.t_end)),
                                         route.usage_prob, route.route_id))
            crossings.sort(key=lambda leg: (leg.scheduled, leg.route_id, leg.node_id))
            legs.extend(crossings)

            legs.append(Leg(flight.destination, ARRIVAL, arrival, arrival,
                            horizon.index(arrival)))
            chain.append(FlightEvent(flight, legs))
        chains.append(chain)
    return chains


def dpa_significant(predecessor_delay, departure_delay, enroute_wait, buffers):
    """
    Args:
        predecessor_delay(float): Arrival delay of the aircraft's previous flight
        departure_delay(float): Departure delay of this flight
        enroute_wait(float): Expected en-route waiting of this flight
        buffers(Buffers): Slack

    Returns:
        PropagationDecision: ``departure_push`` is the inbound delay beyond the turnaround
        slack, ``arrival_push`` the departure and en-route delay beyond the flight-time slack,
        and ``propagate`` whether either is positive

    Arrivals are never earlier than scheduled.
    """

    departure_push = max(0.0, predecessor_delay - buffers.a_buffer)
    arrival_push = max(0.0, departure_delay + enroute_wait - buffers.e_buffer)
    return PropagationDecision(departure_push, arrival_push,
                               departure_push > 0 or arrival_push > 0)


def _ready(chain, end):
    """Whether the chain's next unprocessed flight is scheduled to depart before ``end``"""
    for event in chain:
        if not event.processed:
            return event.departure.scheduled < end
    return False


def _touches(chain, node_ids):
    """Whether an unprocessed flight of the chain visits any of ``node_ids``"""
    return any(leg.node_id in node_ids for event in chain if not event.processed
               for leg in event.legs)


def _no_wait(node_id, t):  # pylint: disable=unused-argument
    return 0.0


# pylint: disable-next=too-many-arguments,too-many-positional-arguments
def adjust_itinerary(events, t_star, buffers, wait_of=None, pushes=None, until=None):
    """
    Args:
        events(list): :py:class:`FlightEvent` objects of one aircraft in order
        t_star(float): Flights completing before this time are left untouched
        buffers(Buffers): Slack
        wait_of(callable): ``wait_of(node_id, t)`` expected wait, zero when omitted
        pushes(dict): Flight id to departure push, overriding the inbound aircraft
        until(float): Stop at the first flight whose departure would be at or after this time
            and defer waits of legs entering at or after it

    Returns:
        list: Flights that were recomputed

    Processed flights are never changed. A flight's departure push is its inbound arrival
    delay beyond the turnaround slack unless given in ``pushes``.
    """

    wait_of = wait_of or _no_wait
    pushes = pushes or {}
    retimed = []
    predecessor = None

    for event in events:
        if event.processed or event.completion < t_star:
            predecessor = event
            continue

        if event.flight_id in pushes:
            push = float(pushes[event.flight_id])
        else:
            inbound = predecessor.arrival_delay if predecessor is not None else 0.0
            push = dpa_significant(inbound, 0.0, 0.0, buffers).departure_push

        if until is not None and event.departure.scheduled + push >= until:
            break

        event.retime(push, buffers, wait_of, until)
        retimed.append(event)
        predecessor = event

    return retimed


def update_demand(network, events):
    """
    Args:
        network(MultiLayerNetwork): Network whose demand profiles are updated in place
        events(list): :py:class:`FlightEvent` objects

    Returns:
        dict: Node id to the earliest sub-period whose demand changed

    Each leg's weight moves from the sub-period it is booked in to the sub-period of its
    booking time shifted by the leg's delay. Demand past the horizon end stays in the
    last sub-period with a :py:exc:`~airnet.exceptions.TruncationWarning`.
    """

    horizon = network.horizon
    changed = {}
    truncated = 0.0

    for event in events:
        for leg in event.legs:
            when = leg.demand_time
            slot = horizon.index(min(when, horizon.t_end))
            if slot == leg.booked_slot:
                continue
            if when >= horizon.t_end:
                truncated += leg.weight

            rates = network.lookup(leg.node_id).demand.rates
            rates[leg.booked_slot] = max(rates[leg.booked_slot] - leg.weight, 0.0)
            rates[slot] += leg.weight

            earliest = min(slot, leg.booked_slot)
            changed[leg.node_id] = min(changed.get(leg.node_id, earliest), earliest)
            leg.booked_slot = slot

    if truncated:
        warnings.warn('%.3f operations delayed past the horizon end kept in the last '
                      'sub-period' % truncated, TruncationWarning)
    return changed


def _mean(values, weights=None):
    if weights is None:
        return float(np.mean(values))
    return float(np.average(values, weights=weights))


def decompose_delays(events, network, buffers):
    """
    Args:
        events(list): Processed :py:class:`FlightEvent` objects
        network(MultiLayerNetwork): Simulated network
        buffers(Buffers): Slack

    Returns:
        DelayReport: Local and propagated delay per node, flight delays, network average

    At an airport, local delay is the mean expected wait of arriving flights and propagated
    delay the mean arrival push. At a point, local delay is the mean expected wait less the
    flight-time slack, floored at 0, and propagated delay the mean entry delay; both are
    weighted by route usage. Nodes without traffic report :py:data:`None`.
    """

    visits = defaultdict(list)
    for event in events:
        for leg in event.legs:
            if leg.role != DEPARTURE:
                visits[leg.node_id].append(leg)

    nodes = OrderedDict()
    for node in network.nodes:
        legs = visits.get(node.node_id, [])
        if node.kind == AIRPORT:
            legs = [leg for leg in legs if leg.role == ARRIVAL]
            if legs:
                local = _mean([leg.wait for leg in legs])
                propagated = _mean([leg.adjusted - leg.scheduled for leg in legs])
            else:
                local = propagated = None
            traffic = float(len(legs))
        else:
            weights = [leg.weight for leg in legs]
            traffic = float(sum(weights))
            if traffic > 0:
                local = max(_mean([leg.wait for leg in legs], weights) - buffers.e_buffer, 0.0)
                propagated = _mean([leg.adjusted - leg.scheduled for leg in legs], weights)
            else:
                local = propagated = None
        nodes[node.node_id] = NodeDelay(node.node_id, node.kind, local, propagated, traffic)

    flight_delays = OrderedDict((event.flight_id, event.arrival_delay) for event in events)
    network_delay = _mean(list(flight_delays.values())) if flight_delays else 0.0

    return DelayReport(events, nodes, flight_delays, network_delay, buffers)


class DelayReport(object):
    """
    Args:
        events(list): Processed :py:class:`FlightEvent` objects
        nodes(dict): Node id to :py:class:`NodeDelay`
        flight_delays(dict): Flight id to arrival delay in minutes
        network_delay(float): Average arrival delay per flight
        buffers(Buffers): Slack the day was simulated with

    **Delay decomposition of a simulated day**
    """

    __slots__ = ('events', 'nodes', 'flight_delays', 'network_delay', 'buffers')

    # pylint: disable-next=too-many-arguments,too-many-positional-arguments
    def __init__(self, events, nodes, flight_delays, network_delay, buffers):
        self.events = list(events)
        self.nodes = nodes
        self.flight_delays = flight_delays
        self.network_delay = float(network_delay)
        self.buffers = buffers

    def __repr__(self):
        return '%s(flights=%d, nodes=%d, network_delay=%.4f)' % (
            self.__class__.__name__, len(self.flight_delays), len(self.nodes),
            self.network_delay)

    def node_table(self):
        """
        Returns:
            :py:class:`pandas.DataFrame`: Columns node, kind, local, propagated, flights;
            absent metrics are NaN
        """
        return pd.DataFrame([(item.node_id, item.kind, item.local, item.propagated, item.traffic)
                             for item in self.nodes.values()],
                            columns=['node', 'kind', 'local', 'propagated', 'flights'])

    def flight_table(self):
        """
        Returns:
            :py:class:`pandas.DataFrame`: One row per flight and node visited with columns
            flight, node, role, weight, scheduled, adjusted, local, propagated
        """
        return pd.DataFrame([(event.flight_id, leg.node_id, leg.role, leg.weight, leg.scheduled,
                              leg.adjusted, leg.wait, leg.delay)
                             for event in self.events for leg in event.legs],
                            columns=['flight', 'node', 'role', 'weight', 'scheduled',
                                     'adjusted', 'local', 'propagated'])

    def top_nodes(self, count=5):
        """
        Returns:
            list: :py:class:`NodeDelay` with the largest local delay, absent metrics skipped
        """
        present = [item for item in self.nodes.values() if item.local is not None]
        return sorted(present, key=lambda item: (-item.local, item.node_id))[:count]

    def subset_delay(self, airport):
        """
        Args:
            airport(str): Airport code

        Returns:
            float: Average arrival delay of flights from or to the airport, 0 when none
        """
        delays = [event.arrival_delay for event in self.events
                  if airport in (event.flight.origin, event.flight.destination)]
        return _mean(delays) if delays else 0.0


def simulate_day(network, itineraries, buffers=None, wait_model=None,
                 max_iterations=MAX_ITERATIONS):
    """
    Args:
        network(MultiLayerNetwork): Network; not modified
        itineraries(list): :py:class:`~airnet.ingest.Itinerary` objects of the day
        buffers(Buffers): Slack, defaults when omitted
        wait_model(callable): ``wait_model(node_id, t)`` replacing the queue engines
        max_iterations(int): Propagation passes allowed per sub-period

    Returns:
        DelayReport: Decomposed delays of the day

    Node demand is initialized from the itineraries. In each sub-period, flights that have
    departed and are not yet processed are retimed and their moved operations rebooked,
    until no rebooking touches the current or an earlier sub-period. Flights whose arrival
    precedes the sub-period end are then processed and never change again.

    Raises:
        DivergenceError: A sub-period did not settle within ``max_iterations`` passes
        HorizonError: A scheduled time lies outside the horizon
    """

    buffers = buffers or Buffers()
    network = network.copy()
    horizon = network.horizon

    chains = build_events(network, itineraries)
    events = [event for chain in chains for event in chain]
    initialize_demand(network, [event.flight for event in events])

    engines = {node.node_id: QueueEngine(node.params, node.demand) for node in network.nodes}
    if wait_model is None:
        def wait_model(node_id, t):
            return engines[node_id].wait_at(t)

    LOGGER.info('Simulating %d flights in %d itineraries over %d sub-periods', len(events),
                len(chains), horizon.m)

    pending = list(chains)
    for slot in range(horizon.m):
        start, end = horizon.slot_start(slot), horizon.slot_start(slot + 1)
        ready = [chain for chain in pending if _ready(chain, end)]
        candidates, retimed = ready, {}

        for iteration in range(1, max_iterations + 1):
            active = []
            for chain in candidates:
                active.extend(adjust_itinerary(chain, start, buffers, wait_model, until=end))
            retimed.update(dict.fromkeys(active))

            moved = update_demand(network, active)
            for node_id, earliest in moved.items():
                engines[node_id].invalidate(earliest)

            if not any(earliest <= slot for earliest in moved.values()):
                break
            LOGGER.debug('Sub-period %d pass %d: rebooked demand at %d nodes', slot, iteration,
                         len(moved))
            # Waits only changed at rebooked nodes
            candidates = [chain for chain in ready if _touches(chain, moved)]
        else:
            raise DivergenceError(
                'Sub-period %d did not settle within %d passes' % (slot, max_iterations),
                state={'slot': slot, 'iterations': max_iterations, 'moved': moved,
                       'active': [event.flight_id for event in active]})

        for event in retimed:
            if event.completion < end:
                event.status = PROCESSED
        pending = [chain for chain in pending if not all(event.processed for event in chain)]

    # Flights held past the horizon end
    leftover = [event for chain in pending for event in chain if not event.processed]
    for chain in pending:
        adjust_itinerary(chain, horizon.t0, buffers, wait_model)
    update_demand(network, leftover)
    for event in leftover:
        event.status = PROCESSED

    report = decompose_delays(events, network, buffers)
    LOGGER.info('Simulated %d flights: %.4f min average delay per flight', len(events),
                report.network_delay)
    return report


def network_summary(report):
    """
    Args:
        report(DelayReport): Simulation report

    Returns:
        :py:class:`pandas.DataFrame`: Average local and propagated delay over airports and
        over en-route points with traffic, indexed by node kind
    """

    rows = []
    for kind in (AIRPORT, POINT):
        present = [item for item in report.nodes.values()
                   if item.kind == kind and item.local is not None]
        rows.append((kind,
                     _mean([item.local for item in present]) if present else np.nan,
                     _mean([item.propagated for item in present]) if present else np.nan,
                     len(present)))

    return pd.DataFrame(rows, columns=['kind', 'local', 'propagated', 'nodes']).set_index('kind')
