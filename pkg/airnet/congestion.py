# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Congestion Map Submodule**

Scores airspace grids by traffic load, route count, and direction entropy,
selects hot grids, and clusters them into en-route congestion points
"""

from collections import Counter, namedtuple
from itertools import combinations
import math
import warnings

import numpy as np
import pandas as pd
from scipy.stats import entropy as _entropy

from airnet.exceptions import InsufficientDataError, SelectionWarning
from airnet.routes import NOISE, Route, dbscan
from airnet._plugins import get_plugin
from airnet._util import LOGGER, NM_PER_DEGREE, great_circle_nm, pairwise_great_circle_nm


DEFAULT_WEIGHTS = (1.0, 1.0, 2.0)
GRID_SIZE_RANGE = (20.0, 100.0)

# Neighbor offsets (row, col) and the side they lie on
SIDES = {(1, 0): 'N', (-1, 0): 'S', (0, 1): 'E', (0, -1): 'W'}

SensitivityReport = namedtuple('SensitivityReport',
                               ('settings', 'selections', 'jaccard', 'intersection',
                                'sensitive'))


class GridSystem(object):
    """
    Args:
        bbox(tuple): (lat_min, lon_min, lat_max, lon_max) in degrees
        cell(float): Grid side in nautical miles

    **Regular tiling of a bounding box by square cells**

    Longitudes are scaled by the cosine of the middle latitude. Row 0 is the southern edge,
    column 0 the western edge. The last row and column may be partial.
    """

    __slots__ = ('lat_min', 'lon_min', 'lat_max', 'lon_max', 'cell', 'nm_per_lon', 'rows',
                 'cols')

    def __init__(self, bbox, cell):

        lat_min, lon_min, lat_max, lon_max = (float(value) for value in bbox)
        if cell <= 0:
            raise ValueError('cell must be positive, received %r' % cell)
        if lat_max <= lat_min or lon_max <= lon_min:
            raise ValueError('Degenerate bounding box %r' % (bbox,))

        self.lat_min, self.lon_min, self.lat_max, self.lon_max = lat_min, lon_min, lat_max, lon_max
        self.cell = float(cell)
        self.nm_per_lon = NM_PER_DEGREE * math.cos(math.radians((lat_min + lat_max) / 2.0))

        height, width = self.to_nm(lat_max, lon_max)
        self.rows = max(int(math.ceil(height / self.cell - 1e-9)), 1)
        self.cols = max(int(math.ceil(width / self.cell - 1e-9)), 1)

    def __repr__(self):
        return '%s((%r, %r, %r, %r), %r)' % (self.__class__.__name__, self.lat_min, self.lon_min,
                                             self.lat_max, self.lon_max, self.cell)

    def to_nm(self, lat, lon):
        """
        Returns:
            tuple: (north, east) offsets from the south-west corner in nautical miles
        """
        return ((np.asarray(lat, dtype=float) - self.lat_min) * NM_PER_DEGREE,
                (np.asarray(lon, dtype=float) - self.lon_min) * self.nm_per_lon)

    def locate(self, lat, lon):
        """
        Args:
            lat(float): Latitude
            lon(float): Longitude

        Returns:
            tuple: (row, col), or :py:data:`None` outside the box

        A point on a boundary between cells belongs to the lower-index cell.
        """

        north, east = self.to_nm(lat, lon)
        if north < -1e-9 or east < -1e-9 or \
                north > self.rows * self.cell + 1e-9 or east > self.cols * self.cell + 1e-9:
            return None
        if lat > self.lat_max or lon > self.lon_max:
            return None

        row = max(int(math.ceil(north / self.cell)) - 1, 0)
        col = max(int(math.ceil(east / self.cell)) - 1, 0)
        return (min(row, self.rows - 1), min(col, self.cols - 1))

    def bounds(self, index):
        """
        Returns:
            tuple: (lat_lo, lon_lo, lat_hi, lon_hi) of a cell
        """
        row, col = index
        dlat = self.cell / NM_PER_DEGREE
        dlon = self.cell / self.nm_per_lon
        return (self.lat_min + row * dlat, self.lon_min + col * dlon,
                min(self.lat_min + (row + 1) * dlat, self.lat_max),
                min(self.lon_min + (col + 1) * dlon, self.lon_max))

    def traverse(self, polyline):
        """
        Args:
            polyline(array): (n, 2) latitude, longitude vertices

        Returns:
            list: (row, col) cells visited in order, 4-connected, consecutive duplicates removed

        Cells outside the box are included so that entry and exit sides can be determined.
        A diagonal step through a cell corner passes the column neighbor first.
        """

        coords = np.asarray(polyline, dtype=float).reshape(-1, 2)
        north, east = self.to_nm(coords[:, 0], coords[:, 1])
        v, u = north / self.cell, east / self.cell

        cells = [(int(math.floor(v[0])), int(math.floor(u[0])))]
        for idx in range(1, len(coords)):
            for cell in _walk(u[idx - 1], v[idx - 1], u[idx], v[idx]):
                if cell != cells[-1]:
                    cells.append(cell)
        return cells

    def contains(self, index):
        """Whether a (row, col) index lies inside the box"""
        return 0 <= index[0] < self.rows and 0 <= index[1] < self.cols


def _walk(u0, v0, u1, v1):
    """
    Cells crossed by a segment in cell units, excluding the starting cell
    """

    col, row = int(math.floor(u0)), int(math.floor(v0))
    col_end, row_end = int(math.floor(u1)), int(math.floor(v1))
    du, dv = u1 - u0, v1 - v0

    step_col = 1 if du > 0 else -1
    step_row = 1 if dv > 0 else -1
    tmax_col = ((col + (du > 0)) - u0) / du if du else math.inf
    tmax_row = ((row + (dv > 0)) - v0) / dv if dv else math.inf
    tdelta_col = abs(1.0 / du) if du else math.inf
    tdelta_row = abs(1.0 / dv) if dv else math.inf

    cells = []
    for _ in range(abs(col_end - col) + abs(row_end - row)):
        if row == row_end or (col != col_end and tmax_col <= tmax_row):
            col += step_col
            tmax_col += tdelta_col
        else:
            row += step_row
            tmax_row += tdelta_row
        cells.append((row, col))
    return cells


class Grid(object):
    """
    Args:
        index(tuple): (row, col)
        bounds(tuple): (lat_lo, lon_lo, lat_hi, lon_hi)
        system(GridSystem): Tiling the grid belongs to

    **One airspace cell and its congestion metrics**
    """

    __slots__ = ('index', 'bounds', 'system', 'traffic_load', 'route_count', 'entropy', 'score',
                 'standardized')

    def __init__(self, index, bounds, system=None):
        self.index = tuple(index)
        self.bounds = tuple(bounds)
        self.system = system
        self.traffic_load = 0.0
        self.route_count = 0
        self.entropy = 0.0
        self.score = 0.0
        self.standardized = (0.0, 0.0, 0.0)

    def __repr__(self):
        return '%s(%r, T=%g, R=%d, E=%.4f, score=%.4f)' % (
            self.__class__.__name__, self.index, self.traffic_load, self.route_count,
            self.entropy, self.score)

    @property
    def center(self):
        """:py:class:`tuple` -- (lat, lon) of the cell center"""
        lat_lo, lon_lo, lat_hi, lon_hi = self.bounds
        return ((lat_lo + lat_hi) / 2.0, (lon_lo + lon_hi) / 2.0)

    def copy(self):
        """
        Returns:
            Grid: Independent copy sharing the grid system
        """
        grid = Grid(self.index, self.bounds, self.system)
        for attr in ('traffic_load', 'route_count', 'entropy', 'score', 'standardized'):
            setattr(grid, attr, getattr(self, attr))
        return grid


class DirectionHistogram(object):
    """
    **Traffic load per direction label of one grid**

    A label joins the side a route enters from and the side it leaves through,
    for example ``'WE'`` for a route crossing from west to east.
    """

    __slots__ = ('loads',)

    def __init__(self, loads=None):
        self.loads = Counter(loads or {})

    def __repr__(self):
        return '%s(%r)' % (self.__class__.__name__, dict(sorted(self.loads.items())))

    def add(self, label, load):
        """Add load to a direction label"""
        self.loads[label] += load

    @property
    def total(self):
        """:py:class:`float` -- Directional traffic total"""
        return float(sum(self.loads.values()))

    @property
    def n_directions(self):
        """:py:class:`int` -- Number of labels with positive load"""
        return sum(1 for load in self.loads.values() if load > 0)

    @property
    def probabilities(self):
        """:py:class:`numpy.ndarray` -- Load share per label, labels sorted"""
        loads = np.array([self.loads[label] for label in sorted(self.loads)], dtype=float)
        total = loads.sum()
        return loads / total if total > 0 else loads


def grid_partition(bbox, cell=20.0):
    """
    Args:
        bbox(tuple): (lat_min, lon_min, lat_max, lon_max) in degrees
        cell(float): Grid side in nautical miles

    Returns:
        list: :py:class:`Grid` objects in row-major order
    """

    if not GRID_SIZE_RANGE[0] <= cell <= GRID_SIZE_RANGE[1]:
        LOGGER.debug('Grid size %g NM is outside the usual range %g-%g NM', cell,
                     *GRID_SIZE_RANGE)

    system = GridSystem(bbox, cell)
    grids = [Grid((row, col), system.bounds((row, col)), system)
             for row in range(system.rows) for col in range(system.cols)]
    LOGGER.info('Partitioned airspace into %d x %d grids of %g NM', system.rows, system.cols,
                cell)
    return grids


def _side(cell, neighbor):
    return SIDES.get((neighbor[0] - cell[0], neighbor[1] - cell[1]))


def accumulate_grid_metrics(routes, grids, days=1.0, loads=None):
    """
    Args:
        routes(list): :py:class:`~airnet.routes.Route` objects
        grids(list): :py:class:`Grid` objects from :py:func:`grid_partition`
        days(float): Observation period; a route's load is its member count per day
        loads(dict): Route id to traffic load, overriding the member-count load

    Returns:
        dict: Grid index to :py:class:`DirectionHistogram`

    Sets ``traffic_load``, ``route_count``, and ``entropy`` of each grid. A route counts once
    per grid it intersects. Each pass through a grid adds the route's load to the label
    of its entry and exit sides; a pass that starts or ends inside the grid adds no label.
    """

    if not grids:
        return {}

    system = grids[0].system
    by_index = {grid.index: grid for grid in grids}
    histograms = {grid.index: DirectionHistogram() for grid in grids}
    for grid in grids:
        grid.traffic_load, grid.route_count = 0.0, 0

    for route in routes:
        load = loads[route.route_id] if loads and route.route_id in loads else \
            route.member_count / float(days)
        cells = system.traverse(route.centroid)

        for cell in set(cells):
            if cell in by_index:
                by_index[cell].traffic_load += load
                by_index[cell].route_count += 1

        for pos, cell in enumerate(cells):
            if cell not in by_index or pos == 0 or pos == len(cells) - 1:
                continue
            entry, leave = _side(cell, cells[pos - 1]), _side(cell, cells[pos + 1])
            if entry and leave:
                histograms[cell].add(entry + leave, load)

    for grid in grids:
        grid.entropy = grid_entropy(histograms[grid.index])

    LOGGER.info('Accumulated %d routes over %d grids', len(routes), len(grids))
    return histograms


def routes_from_trajectories(trajectories, m=50):
    """
    Args:
        trajectories(list): :py:class:`~airnet.ingest.Trajectory` objects
        m(int): Resample count

    Returns:
        list: One single-member :py:class:`~airnet.routes.Route` per trajectory

    Used to accumulate grid metrics from raw trajectories instead of mined routes.
    """

    from airnet.ingest import resample_trajectory  # pylint: disable=import-outside-toplevel

    return [Route('%s#%d' % (traj.flight_id, idx), traj.od_pair,
                  resample_trajectory(traj, m), 1.0, 1)
            for idx, traj in enumerate(trajectories)]


def grid_entropy(hist):
    """
    Args:
        hist(DirectionHistogram): Direction loads of a grid

    Returns:
        float: Base-2 entropy of the direction shares, 0 for an empty histogram
    """

    probabilities = hist.probabilities
    probabilities = probabilities[probabilities > 0]
    if len(probabilities) <= 1:
        return 0.0
    return float(_entropy(probabilities, base=2))


def _standardize(values):
    values = np.asarray(values, dtype=float)
    span = values.max() - values.min()
    if span <= 0:
        return np.zeros_like(values)
    return (values - values.min()) / span


def score_grids(grids, weights=DEFAULT_WEIGHTS):
    """
    Args:
        grids(list): :py:class:`Grid` objects with metrics
        weights(tuple): (w1, w2, w3) for load, route count, and entropy

    Returns:
        list: The same grids with ``score`` and ``standardized`` set

    Each metric is min-max standardized across the grids; a constant metric
    standardizes to 0.
    """

    if not any(grid.traffic_load > 0 for grid in grids):
        raise InsufficientDataError('No grid carries traffic')

    columns = [_standardize([getattr(grid, attr) for grid in grids])
               for attr in ('traffic_load', 'route_count', 'entropy')]
    scores = np.dot(np.asarray(weights, dtype=float), np.vstack(columns))

    for pos, grid in enumerate(grids):
        grid.standardized = tuple(float(column[pos]) for column in columns)
        grid.score = float(scores[pos])

    return grids


def select_hot_grids(grids, mode='threshold', value=0.6, weights=DEFAULT_WEIGHTS,
                     plugin_paths=None):
    """
    Args:
        grids(list): Scored :py:class:`Grid` objects
        mode(str): Selector plugin, ``threshold`` or ``top_n``
        value(float): Threshold on score divided by the weight sum, or grid count
        weights(tuple): Weights the scores were computed with
        plugin_paths(list): Extra plugin directories

    Returns:
        list: Selected grids, highest score first

    For ``top_n``, grids tied with the n-th score are all selected.
    """

    hot = get_plugin('hot_grid_selector', mode, plugin_paths).select(grids, value, weights)
    if not hot:
        warnings.warn('No hot grids selected with %s %s' % (mode, value), SelectionWarning)
    LOGGER.info('Selected %d hot grids with %s %s', len(hot), mode, value)
    return hot


class CongestionPoint(object):
    """
    Args:
        point_id(str): Identifier
        member_grids(list): (row, col) indices of member grids
        centroid(tuple): (lat, lon)
        radius(float): Largest member-center distance to the centroid in nautical miles
        load(float): Traffic load summed over member grids

    **Cluster of hot grids acting as one queue node**
    """

    __slots__ = ('point_id', 'member_grids', 'centroid', 'radius', 'load')

    # pylint: disable-next=too-many-arguments,too-many-positional-arguments
    def __init__(self, point_id, member_grids, centroid, radius, load=0.0):
        self.point_id = str(point_id)
        self.member_grids = [tuple(index) for index in member_grids]
        self.centroid = tuple(float(value) for value in centroid)
        self.radius = float(radius)
        self.load = float(load)

    def __repr__(self):
        return '%s(%r, grids=%d, centroid=(%.4f, %.4f), radius=%.1f)' % (
            self.__class__.__name__, self.point_id, len(self.member_grids),
            self.centroid[0], self.centroid[1], self.radius)

    def to_record(self):
        """
        Returns:
            dict: JSON-compatible representation
        """
        return {'point_id': self.point_id, 'member_grids': [list(idx) for idx in self.member_grids],
                'centroid': list(self.centroid), 'radius': self.radius, 'load': self.load}

    @classmethod
    def from_record(cls, record):
        """Inverse of :py:meth:`to_record`"""
        return cls(record['point_id'], record['member_grids'], record['centroid'],
                   record['radius'], record.get('load', 0.0))


def _make_point(point_id, members):
    centers = np.array([grid.center for grid in members])
    weights = np.array([grid.traffic_load for grid in members], dtype=float)
    if weights.sum() <= 0:
        weights = np.ones(len(members))

    centroid = np.average(centers, axis=0, weights=weights)
    radius = float(np.max(great_circle_nm(centers[:, 0], centers[:, 1],
                                          centroid[0], centroid[1])))
    return CongestionPoint(point_id, [grid.index for grid in members], centroid, radius,
                           weights.sum() if weights.sum() else 0.0)


def cluster_hot_grids(hot, epsilon=50.0, minpt=2):
    """
    Args:
        hot(list): Hot :py:class:`Grid` objects
        epsilon(float): Clustering radius in nautical miles between grid centers
        minpt(int): DBSCAN minimum neighborhood size

    Returns:
        list: :py:class:`CongestionPoint` objects numbered from ``'1'``, highest score first

    Noise grids become singleton points.
    """

    if epsilon <= 0:
        raise ValueError('epsilon must be positive, received %r' % epsilon)
    if not hot:
        return []

    distances = pairwise_great_circle_nm([grid.center for grid in hot])
    labeling = dbscan(distances, epsilon, minpt, metric='precomputed')

    groups = [[hot[idx] for idx in labeling.members(cluster)]
              for cluster in range(labeling.n_clusters)]
    groups.extend([hot[idx]] for idx in np.flatnonzero(labeling.labels == NOISE))
    groups.sort(key=lambda members: (-max(grid.score for grid in members),
                                     min(grid.index for grid in members)))

    points = [_make_point(str(pos + 1), members) for pos, members in enumerate(groups)]
    LOGGER.info('Clustered %d hot grids into %d congestion points', len(hot), len(points))
    return points


def sensitivity_sweep(grids, omega3_values, base=DEFAULT_WEIGHTS[:2], mode='top_n', value=75,
                      plugin_paths=None):
    """
    Args:
        grids(list): :py:class:`Grid` objects with metrics
        omega3_values(list): Entropy weights to try
        base(tuple): (w1, w2) kept fixed
        mode(str): Selector plugin
        value(float): Selector parameter
        plugin_paths(list): Extra plugin directories

    Returns:
        SensitivityReport: ``selections`` maps each entropy weight to selected indices,
        ``jaccard`` is a :py:class:`pandas.DataFrame` of pairwise similarities,
        ``intersection`` the indices selected under every weight, and
        ``sensitive`` the indices selected under some but not all weights

    The input grids are not modified.
    """

    settings = [float(value3) for value3 in omega3_values]
    if len(settings) < 2:
        raise ValueError('At least two entropy weights are required, received %d' %
                         len(settings))

    selections = {}
    for omega3 in settings:
        weights = tuple(base) + (omega3,)
        scored = score_grids([grid.copy() for grid in grids], weights)
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', SelectionWarning)
            hot = select_hot_grids(scored, mode, value, weights, plugin_paths)
        selections[omega3] = frozenset(grid.index for grid in hot)

    jaccard = pd.DataFrame(1.0, index=settings, columns=settings)
    for first, second in combinations(settings, 2):
        union = selections[first] | selections[second]
        similarity = len(selections[first] & selections[second]) / float(len(union)) \
            if union else 1.0
        jaccard.loc[first, second] = jaccard.loc[second, first] = similarity

    intersection = frozenset.intersection(*selections.values())
    sensitive = frozenset.union(*selections.values()) - intersection

    LOGGER.info('Sensitivity sweep over %d weights: %d stable, %d weight-sensitive grids',
                len(settings), len(intersection), len(sensitive))
    return SensitivityReport(settings, selections, jaccard, intersection, sensitive)


def heatmap_records(grids):
    """
    Args:
        grids(list): Scored :py:class:`Grid` objects

    Returns:
        :py:class:`pandas.DataFrame`: Columns row, col, score
    """

    return pd.DataFrame([(grid.index[0], grid.index[1], grid.score) for grid in grids],
                        columns=['row', 'col', 'score'])
