# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Capacity edit plugins**

Each edit returns an edited copy of the network
"""

from airnet.exceptions import NodeLookupError
from airnet.network import AIRPORT, POINT
from airnet._plugins import ScenarioEdit
from airnet._util import LOGGER


ELIMINATION_MULTIPLIER = 100.0


def _airport(network, target):
    node = network.lookup(target)
    if node.kind != AIRPORT:
        raise NodeLookupError('%s is not an airport' % target)
    return node


def _scale(node, factor):
    node.params = node.params.copy(mu=node.params.mu * factor)


class RunwayAddition(ScenarioEdit):
    """
    One more independent runway at an airport with ``magnitude`` runways:
    service rate times (n + 1) / n
    """

    _alias_ = 'runway'

    def apply(self, network, target, magnitude):
        runways = int(magnitude)
        if runways != magnitude or runways < 1:
            raise ValueError('Runway count must be an integer of at least 1, received %r' %
                             magnitude)

        edited = network.copy()
        node = _airport(edited, target)
        before = node.params.mu
        _scale(node, (runways + 1.0) / runways)
        LOGGER.info('Runway addition at %s: %s -> %s per sub-period', target, before,
                    node.params.mu)
        return edited

    def describe(self, network, target, magnitude):
        node = _airport(network, target)
        hours = 60.0 / network.horizon.dt
        return 'runway at %s: %g -> %g per hour' % (target, node.params.mu * hours,
                                                    node.params.mu * hours *
                                                    (magnitude + 1.0) / magnitude)


class EnrouteScale(ScenarioEdit):
    """
    Point service rate times ``magnitude``, at one point or at every point
    when ``target`` is :py:data:`None`
    """

    _alias_ = 'enroute_scale'

    def apply(self, network, target, magnitude):
        if magnitude <= 0:
            raise ValueError('Scale factor must be positive, received %r' % magnitude)

        edited = network.copy()
        if target is None:
            nodes = edited.points
        else:
            nodes = [edited.lookup(target)]
            if nodes[0].kind != POINT:
                raise NodeLookupError('%s is not an en-route point' % target)

        for node in nodes:
            _scale(node, magnitude)
        return edited


class PointElimination(ScenarioEdit):
    """
    Effectively unbounded capacity, service rate times ``magnitude``, at every point
    crossed by a route to or from the target airport
    """

    _alias_ = 'eliminate'

    def apply(self, network, target, magnitude):
        if magnitude <= 0:
            raise ValueError('Multiplier must be positive, received %r' % magnitude)

        _airport(network, target)
        edited = network.copy()

        points = sorted({crossing.point_id
                         for route in edited.routes if target in route.od_pair
                         for crossing in edited.crossings_for(route.route_id)})
        for point_id in points:
            _scale(edited.lookup(point_id), magnitude)

        LOGGER.info('Eliminated congestion at %d points for %s', len(points), target)
        return edited
