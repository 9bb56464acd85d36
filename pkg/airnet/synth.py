# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Synthetic Data Submodule**

Generates seeded track and schedule files with a ground-truth manifest

Flights of an OD pair follow one of several route bundles. A bundle's centerline bows
sideways from the straight line between the airports; bundles of one OD pair are spaced
``separation`` nautical miles apart at mid-route. Each flight is displaced from its
centerline by Gaussian cross-track noise. Outlier flights bow much further out.
"""

from collections import OrderedDict, defaultdict, namedtuple
import io
import json
import math
import os

import numpy as np
import pandas as pd

from airnet.ingest import SCHEDULE_COLUMNS, TRACK_COLUMNS
from airnet.network import Horizon
from airnet._util import LOGGER, project_nm, unproject_nm


DAY_START = 1704067200.0  # 2024-01-01 00:00 UTC

SynthDay = namedtuple('SynthDay', ('tracks', 'schedule', 'manifest'))


class SynthSpec(object):
    """
    Args:
        airports(dict): Airport code to (lat, lon)
        bundles(dict): OD pair to number of route bundles
        flights(int): Flights per day over all OD pairs, outliers excluded
        chain_lengths(list): Flights per aircraft, drawn uniformly
        seed(int): Random seed
        spread(float): Cross-track standard deviation in nautical miles
        separation(float): Mid-route distance between neighboring bundles in nautical miles
        speed(float): Ground speed in knots
        outliers(int): Extra outlier flights per OD pair
        points(dict): Point id to (lat, lon); the manifest records bundle crossing offsets
        horizon(Horizon): Simulated day
        first_departure(float): Earliest departure in minutes after midnight
        last_departure(float): Latest departure in minutes after midnight
        turnaround(float): Minimum ground time between chained flights in minutes
        sample_interval(float): Seconds between track points
        weights(dict): Airport code to relative traffic weight; chain starts and destinations
            are drawn in proportion to it, uniformly when omitted

    **Description of a synthetic day**
    """

    __slots__ = ('airports', 'bundles', 'flights', 'chain_lengths', 'seed', 'spread',
                 'separation', 'speed', 'outliers', 'points', 'horizon', 'first_departure',
                 'last_departure', 'turnaround', 'sample_interval', 'weights')

    # pylint: disable-next=too-many-arguments,too-many-locals
    def __init__(self, airports, bundles, flights=20, chain_lengths=(1,), seed=0, spread=5.0,
                 separation=80.0, speed=480.0, outliers=0, points=None, horizon=None,
                 first_departure=360.0, last_departure=1200.0, turnaround=45.0,
                 sample_interval=60.0, weights=None):

        self.airports = OrderedDict((code, tuple(airports[code])) for code in sorted(airports))
        self.bundles = OrderedDict((tuple(od), int(bundles[od])) for od in sorted(bundles))
        for od_pair, count in self.bundles.items():
            if count < 1 or not set(od_pair) <= set(self.airports):
                raise ValueError('Invalid bundle entry %r: %r' % (od_pair, count))

        self.flights = int(flights)
        self.chain_lengths = tuple(int(length) for length in chain_lengths)
        self.seed = int(seed)
        self.spread = float(spread)
        self.separation = float(separation)
        self.speed = float(speed)
        self.outliers = int(outliers)
        self.points = OrderedDict(sorted((points or {}).items()))
        self.horizon = horizon or Horizon(DAY_START)
        self.first_departure = float(first_departure)
        self.last_departure = float(last_departure)
        self.turnaround = float(turnaround)
        self.sample_interval = float(sample_interval)
        self.weights = None
        if weights is not None:
            self.weights = OrderedDict((code, float(weights.get(code, 0.0)))
                                       for code in self.airports)
            if any(value < 0 for value in self.weights.values()) or \
                    not sum(self.weights.values()) > 0:
                raise ValueError('Traffic weights must be non-negative with a positive sum')

    def __repr__(self):
        return '%s(airports=%d, od_pairs=%d, flights=%d, seed=%d)' % (
            self.__class__.__name__, len(self.airports), len(self.bundles), self.flights,
            self.seed)


class _Geometry(object):
    """
    Straight OD line in a local plane about its midpoint
    """

    __slots__ = ('lat0', 'lon0', 'start', 'direction', 'normal', 'length')

    def __init__(self, origin, destination):
        self.lat0 = (origin[0] + destination[0]) / 2.0
        self.lon0 = (origin[1] + destination[1]) / 2.0
        x0, y0 = project_nm(origin[0], origin[1], self.lat0, self.lon0)
        x1, y1 = project_nm(destination[0], destination[1], self.lat0, self.lon0)
        self.start = np.array([float(x0), float(y0)])
        delta = np.array([float(x1 - x0), float(y1 - y0)])
        self.length = float(np.hypot(*delta))
        self.direction = delta / self.length
        self.normal = np.array([-self.direction[1], self.direction[0]])

    def path(self, lateral, fractions):
        """Positions (lat, lon) at fractions of the way, bowed sideways by ``lateral`` NM"""
        bow = np.sin(np.pi * fractions)
        plane = self.start + np.outer(fractions * self.length, self.direction) + \
            np.outer(np.atleast_1d(lateral) * bow, self.normal)
        lat, lon = unproject_nm(plane[:, 0], plane[:, 1], self.lat0, self.lon0)
        return np.column_stack((lat, lon))


def _bundle_offset(bundle, count, separation):
    return (bundle - (count - 1) / 2.0) * separation


def _path_minutes(path, speed):
    """Cumulative flying minutes along a (lat, lon) polyline"""
    x, y = project_nm(path[:, 0], path[:, 1], path[0, 0], path[0, 1])
    steps = np.hypot(np.diff(x), np.diff(y))
    return np.concatenate(([0.0], np.cumsum(steps))) / speed * 60.0


def _crossing_offsets(spec, geometry, offset, dense=2001):
    """Minutes from departure to the closest approach to each crossing point"""
    if not spec.points:
        return {}
    fractions = np.linspace(0.0, 1.0, dense)
    path = geometry.path(offset, fractions)
    minutes = _path_minutes(path, spec.speed)
    offsets = {}
    for point_id, (lat, lon) in spec.points.items():
        x, y = project_nm(path[:, 0], path[:, 1], lat, lon)
        nearest = int(np.argmin(np.hypot(x, y)))
        offsets[str(point_id)] = round(float(minutes[nearest]), 3)
    return offsets


def _plan_aircraft(spec, rng):
    """
    Chains of (od_pair, bundle or None, departure minute) per aircraft
    """

    outgoing = defaultdict(list)
    for od_pair in spec.bundles:
        outgoing[od_pair[0]].append(od_pair)

    durations = {od_pair: _Geometry(spec.airports[od_pair[0]],
                                    spec.airports[od_pair[1]]).length / spec.speed * 60.0
                 for od_pair in spec.bundles}
    served = defaultdict(int)
    chains = []
    total = 0
    origins = sorted(outgoing)

    def pick(candidates, codes):
        if spec.weights is None:
            return candidates[int(rng.integers(len(candidates)))]
        weights = np.array([spec.weights[code] for code in codes])
        if not weights.sum() > 0:
            return candidates[int(rng.integers(len(candidates)))]
        return candidates[int(rng.choice(len(candidates), p=weights / weights.sum()))]

    while total < spec.flights and origins:
        length = int(rng.choice(spec.chain_lengths))
        where = pick(origins, origins)
        departure = float(rng.integers(int(spec.first_departure), int(spec.last_departure) + 1))
        chain = []
        while len(chain) < length and total < spec.flights and outgoing[where]:
            if departure > spec.last_departure:
                break
            od_pair = pick(outgoing[where], [od[1] for od in outgoing[where]])
            chain.append((od_pair, served[od_pair] % spec.bundles[od_pair], departure))
            served[od_pair] += 1
            total += 1
            departure = math.ceil(departure + durations[od_pair] + spec.turnaround +
                                  float(rng.integers(0, 31)))
            where = od_pair[1]
        if chain:
            chains.append(chain)

    for od_pair in spec.bundles:
        for _ in range(spec.outliers):
            departure = float(rng.integers(int(spec.first_departure),
                                           int(spec.last_departure) + 1))
            chains.append([(od_pair, None, departure)])

    return chains


def generate_day(spec):
    """
    Args:
        spec(SynthSpec): Day description

    Returns:
        SynthDay: ``tracks`` and ``schedule`` as :py:class:`pandas.DataFrame` in the ingest
        formats and ``manifest``, a JSON-compatible dict of ground truth: bundle counts and
        flights per bundle for each OD pair, outlier flight ids, crossing offsets of bundle
        centerlines at the crossing points, and scheduled demand per airport and sub-period

    The same spec gives identical output.
    """

    rng = np.random.default_rng(spec.seed)
    horizon = spec.horizon
    geometries = {od_pair: _Geometry(spec.airports[od_pair[0]], spec.airports[od_pair[1]])
                  for od_pair in spec.bundles}

    track_rows, schedule_rows = [], []
    split = {od_pair: [0] * count for od_pair, count in spec.bundles.items()}
    outlier_ids = []

    for number, chain in enumerate(_plan_aircraft(spec, rng)):
        registration = 'B-%04d' % number
        for leg, (od_pair, bundle, departure) in enumerate(chain):
            flight_id = 'SY%04d%d' % (number, leg)
            geometry = geometries[od_pair]
            count = spec.bundles[od_pair]

            if bundle is None:
                side = 1.0 if rng.random() < 0.5 else -1.0
                lateral = side * (spec.separation * (count + 1.5) + rng.uniform(0, 100.0))
                outlier_ids.append(flight_id)
            else:
                lateral = _bundle_offset(bundle, count, spec.separation) + \
                    rng.normal(0.0, spec.spread)
                split[od_pair][bundle] += 1

            fractions = np.linspace(0.0, 1.0, 401)
            dense = geometry.path(lateral, fractions)
            minutes = _path_minutes(dense, spec.speed)
            duration = float(minutes[-1])

            seconds = np.arange(0.0, duration * 60.0, spec.sample_interval)
            seconds = np.append(seconds, duration * 60.0)
            lat = np.interp(seconds / 60.0, minutes, dense[:, 0])
            lon = np.interp(seconds / 60.0, minutes, dense[:, 1])

            start = horizon.day_start + departure * 60.0
            for stamp, point_lat, point_lon in zip(seconds, lat, lon):
                track_rows.append((flight_id, int(round(start + stamp)),
                                   round(float(point_lat), 6), round(float(point_lon), 6),
                                   30000, int(spec.speed), od_pair[0], od_pair[1],
                                   registration))

            arrival = start + math.ceil(duration) * 60.0
            schedule_rows.append((flight_id, od_pair[0], od_pair[1], int(start), int(arrival),
                                  int(start), int(round(start + duration * 60.0)),
                                  registration))

    tracks = pd.DataFrame(track_rows, columns=list(TRACK_COLUMNS))
    schedule = pd.DataFrame(schedule_rows, columns=list(SCHEDULE_COLUMNS))
    tracks.sort_values(['flight_id', 'timestamp'], inplace=True, kind='mergesort')
    schedule.sort_values(['sched_dep', 'flight_id'], inplace=True, kind='mergesort')
    tracks.reset_index(drop=True, inplace=True)
    schedule.reset_index(drop=True, inplace=True)

    manifest = _manifest(spec, geometries, split, outlier_ids, schedule)
    LOGGER.info('Generated %d flights, %d track points', len(schedule), len(tracks))
    return SynthDay(tracks, schedule, manifest)


def _manifest(spec, geometries, split, outlier_ids, schedule):

    horizon = spec.horizon
    demand = OrderedDict()
    for code in spec.airports:
        rates = np.zeros(horizon.m, dtype=int)
        for column, key in (('sched_dep', 'origin'), ('sched_arr', 'destination')):
            for stamp in schedule.loc[schedule[key] == code, column]:
                rates[horizon.index(horizon.minutes(stamp))] += 1
        demand[code] = [int(value) for value in rates]

    crossings = OrderedDict()
    for od_pair, count in spec.bundles.items():
        for bundle in range(count):
            offsets = _crossing_offsets(spec, geometries[od_pair],
                                        _bundle_offset(bundle, count, spec.separation))
            crossings['%s-%s/%d' % (od_pair + (bundle,))] = offsets

    return {'seed': spec.seed,
            'horizon': horizon.to_record(),
            'bundles': OrderedDict(('%s-%s' % od_pair, count)
                                   for od_pair, count in spec.bundles.items()),
            'split': OrderedDict(('%s-%s' % od_pair, counts) for od_pair, counts in split.items()),
            'outliers': sorted(outlier_ids),
            'crossings': crossings,
            'demand': demand}


def write_day(day, directory):
    """
    Args:
        day(SynthDay): Generated day
        directory(str): Output directory, created when missing

    Returns:
        tuple: Paths of the track file, schedule file, and manifest
    """

    if not os.path.isdir(directory):
        os.makedirs(directory)

    paths = (os.path.join(directory, 'tracks.csv'), os.path.join(directory, 'schedule.csv'),
             os.path.join(directory, 'manifest.json'))
    day.tracks.to_csv(paths[0], index=False, lineterminator='\n')
    day.schedule.to_csv(paths[1], index=False, lineterminator='\n')
    with io.open(paths[2], 'w', encoding='utf-8', newline='\n') as handle:
        json.dump(day.manifest, handle, sort_keys=True, indent=1)
        handle.write('\n')

    return paths
