# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Ingest Submodule**

Parses tracking and schedule files, assembles per-flight trajectories,
and chains flights into per-aircraft itineraries
"""

from collections import Counter, defaultdict, namedtuple

import numpy as np
import pandas as pd
from scipy.interpolate import interp1d

from airnet.exceptions import AmbiguityError, DegenerateTrajectoryError, FormatError
from airnet._util import LOGGER, great_circle_nm


TRACK_COLUMNS = {'flight_id': 'flight_id', 'timestamp': 'timestamp', 'lat': 'lat', 'lon': 'lon',
                 'alt': 'alt', 'speed': 'speed', 'origin': 'origin',
                 'destination': 'destination', 'registration': 'registration'}
TRACK_MANDATORY = ('flight_id', 'timestamp', 'lat', 'lon', 'origin', 'destination')

SCHEDULE_COLUMNS = {'flight_id': 'flight_id', 'origin': 'origin', 'destination': 'destination',
                    'sched_dep': 'sched_dep', 'sched_arr': 'sched_arr',
                    'actual_dep': 'actual_dep', 'actual_arr': 'actual_arr',
                    'registration': 'registration'}
SCHEDULE_MANDATORY = ('flight_id', 'origin', 'destination', 'sched_dep', 'sched_arr')

EPOCH = pd.Timestamp('1970-01-01', tz='UTC')

RowError = namedtuple('RowError', ('line', 'column', 'value', 'reason'))
ParseResult = namedtuple('ParseResult', ('records', 'errors'))


class TrackPoint(namedtuple('TrackPoint', ('flight_id', 'timestamp', 'latitude', 'longitude',
                                           'altitude', 'speed', 'origin', 'destination',
                                           'registration'))):
    """
    One surveillance report. ``timestamp`` is seconds since the epoch (UTC),
    ``altitude`` feet and ``speed`` knots.
    """

    __slots__ = ()

    @property
    def od_pair(self):
        """:py:class:`tuple` -- (origin, destination)"""
        return (self.origin, self.destination)


class FlightRecord(namedtuple('FlightRecord', ('flight_id', 'origin', 'destination', 'sched_dep',
                                               'sched_arr', 'actual_dep', 'actual_arr',
                                               'registration'))):
    """
    One scheduled flight. Times are seconds since the epoch (UTC);
    ``actual_dep`` and ``actual_arr`` may be :py:data:`None`.
    """

    __slots__ = ()

    @property
    def od_pair(self):
        """:py:class:`tuple` -- (origin, destination)"""
        return (self.origin, self.destination)


class Trajectory(object):
    """
    Args:
        flight_id(str): Flight identifier
        od_pair(tuple): (origin, destination)
        points(list): :py:class:`TrackPoint` objects sorted by time

    **Time-ordered surveillance points of one flight**
    """

    __slots__ = ('flight_id', 'od_pair', 'points')

    def __init__(self, flight_id, od_pair, points):
        self.flight_id = flight_id
        self.od_pair = tuple(od_pair)
        self.points = tuple(points)

    def __repr__(self):
        return '%s(%r, %r, <%d points>)' % (self.__class__.__name__, self.flight_id,
                                           self.od_pair, len(self.points))

    def __len__(self):
        return len(self.points)

    @property
    def departure_time(self):
        """:py:class:`float` -- Timestamp of the first point"""
        return self.points[0].timestamp

    @property
    def timestamps(self):
        """:py:class:`numpy.ndarray` -- Point timestamps"""
        return np.array([point.timestamp for point in self.points], dtype=float)

    @property
    def coordinates(self):
        """:py:class:`numpy.ndarray` -- (n, 2) array of latitude, longitude"""
        return np.array([(point.latitude, point.longitude) for point in self.points], dtype=float)


class Itinerary(object):
    """
    Args:
        registration(str): Aircraft registration
        flights(list): :py:class:`FlightRecord` objects in departure order

    **Chain of flights flown by one aircraft**
    """

    __slots__ = ('registration', 'flights')

    def __init__(self, registration, flights):
        self.registration = registration
        self.flights = tuple(flights)

    def __repr__(self):
        return '%s(%r, %r)' % (self.__class__.__name__, self.registration,
                               [flight.flight_id for flight in self.flights])

    def __len__(self):
        return len(self.flights)


def _read_table(source, columns, mandatory, delimiter):
    """
    Read delimited text as strings and check the mandatory columns exist

    Returns the frame and a mapping of field name to the header actually present
    """

    try:
        frame = pd.read_csv(source, sep=delimiter, dtype=str, keep_default_na=False,
                            encoding='utf-8', skipinitialspace=True)
    except pd.errors.EmptyDataError:
        frame = pd.DataFrame()

    missing = [columns.get(field, field) for field in mandatory
               if columns.get(field, field) not in frame.columns]
    if missing:
        raise FormatError('Missing mandatory column(s): %s' % ', '.join(missing),
                          friendly='input is missing column(s) %s' % ', '.join(missing))

    present = {field: header for field, header in columns.items() if header in frame.columns}
    return frame, present


def parse_times(series):
    """
    Args:
        series(:py:class:`pandas.Series`): Strings holding epoch seconds or ISO-8601 times

    Returns:
        :py:class:`pandas.Series`: Seconds since the epoch in UTC, NaN where unparseable

    The format is detected per column: if every non-empty value is numeric the column is
    read as epoch seconds, otherwise as ISO-8601. Naive ISO times are taken as UTC.
    """

    stripped = series.astype(str).str.strip()
    filled = stripped != ''
    numeric = pd.to_numeric(stripped.where(filled), errors='coerce')

    if filled.any() and numeric[filled].notna().all():
        return numeric.astype(float)

    stamps = pd.to_datetime(stripped.where(filled), errors='coerce', utc=True)
    return ((stamps - EPOCH) / pd.Timedelta(seconds=1)).astype(float)


def _row_errors(frame, mask, column, reason):
    """Build RowError records for rows selected by mask"""

    # Line 1 is the header
    return [RowError(int(idx) + 2, column, frame.at[idx, column], reason)
            for idx in frame.index[mask]]


def parse_tracks(source, columns=None, delimiter=','):
    """
    Args:
        source: Path or file-like object with delimited text and a header row
        columns(dict): Field name to header name overrides
        delimiter(str): Field delimiter

    Returns:
        ParseResult: ``records`` is a list of :py:class:`TrackPoint`,
        ``errors`` a list of :py:class:`RowError`

    Rows with an unparseable or out-of-range coordinate or time are reported in
    ``errors`` and produce no point.
    """

    colmap = dict(TRACK_COLUMNS, **(columns or {}))
    frame, present = _read_table(source, colmap, TRACK_MANDATORY, delimiter)

    lat = pd.to_numeric(frame[present['lat']], errors='coerce')
    lon = pd.to_numeric(frame[present['lon']], errors='coerce')
    stamp = parse_times(frame[present['timestamp']])

    errors = []
    bad_lat = ~lat.between(-90.0, 90.0)
    bad_lon = ~lon.between(-180.0, 180.0) & ~bad_lat
    bad_time = ~np.isfinite(stamp) & ~bad_lat & ~bad_lon
    errors.extend(_row_errors(frame, bad_lat, present['lat'], 'latitude not in [-90, 90]'))
    errors.extend(_row_errors(frame, bad_lon, present['lon'], 'longitude not in [-180, 180]'))
    errors.extend(_row_errors(frame, bad_time, present['timestamp'], 'unparseable time'))

    optional = {}
    for field in ('alt', 'speed'):
        if field in present:
            optional[field] = pd.to_numeric(frame[present[field]], errors='coerce')
        else:
            optional[field] = pd.Series(np.nan, index=frame.index)

    registration = frame[present['registration']] if 'registration' in present else \
        pd.Series('', index=frame.index)

    records = []
    for idx in frame.index[~(bad_lat | bad_lon | bad_time)]:
        records.append(TrackPoint(frame.at[idx, present['flight_id']].strip(),
                                  float(stamp[idx]), float(lat[idx]), float(lon[idx]),
                                  float(optional['alt'][idx]), float(optional['speed'][idx]),
                                  frame.at[idx, present['origin']].strip(),
                                  frame.at[idx, present['destination']].strip(),
                                  registration[idx].strip()))

    errors.sort()
    LOGGER.info('Parsed %d track points, %d row errors', len(records), len(errors))
    return ParseResult(records, errors)


def parse_schedule(source, columns=None, delimiter=','):
    """
    Args:
        source: Path or file-like object with delimited text and a header row
        columns(dict): Field name to header name overrides
        delimiter(str): Field delimiter

    Returns:
        ParseResult: ``records`` is a list of :py:class:`FlightRecord`,
        ``errors`` a list of :py:class:`RowError`

    Rows whose scheduled times are unparseable or not increasing are reported in ``errors``.
    Empty actual times become :py:data:`None`.
    """

    colmap = dict(SCHEDULE_COLUMNS, **(columns or {}))
    frame, present = _read_table(source, colmap, SCHEDULE_MANDATORY, delimiter)

    times = {}
    for field in ('sched_dep', 'sched_arr', 'actual_dep', 'actual_arr'):
        if field in present and len(frame):
            times[field] = parse_times(frame[present[field]])
        else:
            times[field] = pd.Series(np.nan, index=frame.index, dtype=float)

    bad_dep = ~np.isfinite(times['sched_dep'])
    bad_arr = ~np.isfinite(times['sched_arr']) & ~bad_dep
    bad_order = ~(bad_dep | bad_arr) & ~(times['sched_dep'] < times['sched_arr'])

    errors = _row_errors(frame, bad_dep, present['sched_dep'], 'unparseable time')
    errors.extend(_row_errors(frame, bad_arr, present['sched_arr'], 'unparseable time'))
    errors.extend(_row_errors(frame, bad_order, present['sched_arr'],
                              'scheduled arrival not after departure'))

    registration = frame[present['registration']] if 'registration' in present else \
        pd.Series('', index=frame.index)

    def _optional(field, idx):
        value = times[field][idx]
        return float(value) if np.isfinite(value) else None

    records = []
    for idx in frame.index[~(bad_dep | bad_arr | bad_order)]:
        records.append(FlightRecord(frame.at[idx, present['flight_id']].strip(),
                                    frame.at[idx, present['origin']].strip(),
                                    frame.at[idx, present['destination']].strip(),
                                    float(times['sched_dep'][idx]),
                                    float(times['sched_arr'][idx]),
                                    _optional('actual_dep', idx), _optional('actual_arr', idx),
                                    registration[idx].strip()))

    errors.sort()
    LOGGER.info('Parsed %d schedule records, %d row errors', len(records), len(errors))
    return ParseResult(records, errors)


def assemble_trajectories(points, min_points=10, max_gap=1800.0):
    """
    Args:
        points(list): :py:class:`TrackPoint` objects in any order
        min_points(int): Minimum points per trajectory
        max_gap(float): Largest time gap in seconds inside one trajectory

    Returns:
        list: :py:class:`Trajectory` objects ordered by OD pair, flight, and start time

    Points are grouped by flight and OD pair and sorted by time. Repeated timestamps keep
    a single point. A gap larger than ``max_gap`` starts a new trajectory.
    """

    if min_points < 2:
        raise ValueError('min_points must be at least 2, received %r' % min_points)

    groups = defaultdict(list)
    for point in points:
        groups[(point.origin, point.destination, point.flight_id)].append(point)

    trajectories = []
    for (origin, destination, flight_id), members in sorted(groups.items()):

        # Full-tuple sort makes duplicate handling independent of input order
        members.sort(key=lambda point: (point.timestamp, tuple(str(field) for field in point)))

        segments = [[members[0]]]
        for point in members[1:]:
            delta = point.timestamp - segments[-1][-1].timestamp
            if delta <= 0:
                continue
            if delta > max_gap:
                segments.append([])
            segments[-1].append(point)

        for segment in segments:
            if len(segment) >= min_points:
                trajectories.append(Trajectory(flight_id, (origin, destination), segment))

        LOGGER.debug('Flight %s %s-%s: %d segment(s)', flight_id, origin, destination,
                     len(segments))

    LOGGER.info('Assembled %d trajectories from %d points', len(trajectories), len(points))
    return trajectories


def _arc_parameterization(traj):
    """
    Returns coordinates, timestamps, and cumulative great-circle distance
    with zero-length steps removed
    """

    coords = traj.coordinates
    stamps = traj.timestamps
    if len(coords) < 2:
        raise DegenerateTrajectoryError('Trajectory %s has fewer than 2 points' % traj.flight_id)

    steps = great_circle_nm(coords[:-1, 0], coords[:-1, 1], coords[1:, 0], coords[1:, 1])
    keep = np.concatenate(([True], steps > 0))
    cumulative = np.concatenate(([0.0], np.cumsum(steps)))[keep]

    if cumulative[-1] <= 0:
        raise DegenerateTrajectoryError('Trajectory %s has zero length' % traj.flight_id,
                                        friendly='degenerate trajectory %s' % traj.flight_id)

    return coords[keep], stamps[keep], cumulative


def resample_trajectory(traj, m=50):
    """
    Args:
        traj(Trajectory): Trajectory with at least two distinct positions
        m(int): Number of resampled points

    Returns:
        :py:class:`numpy.ndarray`: Vector (lat1, lon1, ..., lat_m, lon_m)

    Points are interpolated at equal fractions of great-circle arc length.
    The first and last original points are preserved exactly.
    """

    if m < 2:
        raise ValueError('m must be at least 2, received %r' % m)

    coords, _, cumulative = _arc_parameterization(traj)
    targets = np.linspace(0.0, cumulative[-1], m)
    resampled = interp1d(cumulative, coords, axis=0, assume_sorted=True)(targets)
    resampled[0] = coords[0]
    resampled[-1] = coords[-1]

    return resampled.reshape(-1)


def resample_elapsed(traj, m=50):
    """
    Args:
        traj(Trajectory): Trajectory with at least two distinct positions
        m(int): Number of resampled points

    Returns:
        :py:class:`numpy.ndarray`: Minutes since the first point at the same arc-length
        fractions used by :py:func:`resample_trajectory`
    """

    _, stamps, cumulative = _arc_parameterization(traj)
    targets = np.linspace(0.0, cumulative[-1], m)
    elapsed = interp1d(cumulative, stamps - traj.departure_time, assume_sorted=True)(targets)
    return elapsed / 60.0


def build_itineraries(records):
    """
    Args:
        records(list): :py:class:`FlightRecord` objects

    Returns:
        list: :py:class:`Itinerary` objects ordered by registration and first departure

    Flights of one registration are sorted by scheduled departure and chained while
    each flight departs from where the previous one arrived, no earlier than its
    scheduled arrival. Records without a registration form single-flight itineraries.

    Raises:
        AmbiguityError: Two flights of one registration share a scheduled departure
    """

    keys = Counter((record.registration, record.sched_dep) for record in records
                   if record.registration)
    offenders = sorted(key for key, count in keys.items() if count > 1)
    if offenders:
        raise AmbiguityError('Duplicate (registration, sched_dep): %s' %
                             ', '.join('%s@%s' % key for key in offenders),
                             offenders=offenders)

    groups = defaultdict(list)
    for record in records:
        key = (record.registration,) if record.registration else \
            ('', record.flight_id, record.sched_dep)
        groups[key].append(record)

    itineraries = []
    for key, flights in groups.items():
        registration = key[0]
        flights.sort(key=lambda record: (record.sched_dep, record.flight_id))
        chain = [flights[0]]
        for flight in flights[1:]:
            previous = chain[-1]
            if previous.destination != flight.origin or previous.sched_arr > flight.sched_dep:
                itineraries.append(Itinerary(registration, chain))
                chain = []
            chain.append(flight)
        itineraries.append(Itinerary(registration, chain))

    itineraries.sort(key=lambda itin: (itin.registration, itin.flights[0].sched_dep,
                                     itin.flights[0].flight_id))
    LOGGER.info('Built %d itineraries from %d flights', len(itineraries), len(records))
    return itineraries


def filter_min_traffic(items, minimum=1.0, days=1.0):
    """
    Args:
        items(list): Objects with an ``od_pair`` attribute (flights or trajectories)
        minimum(float): Minimum average count per day for an OD pair to be kept
        days(float): Length of the observation period in days

    Returns:
        list: Items of OD pairs meeting the minimum, original order preserved
    """

    if days <= 0:
        raise ValueError('days must be positive, received %r' % days)

    counts = Counter(item.od_pair for item in items)
    kept = {od for od, count in counts.items() if count / float(days) >= minimum}
    LOGGER.info('Traffic filter kept %d of %d OD pairs', len(kept), len(counts))
    return [item for item in items if item.od_pair in kept]
