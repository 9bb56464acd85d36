# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Route Mining Submodule**

Clusters resampled trajectories of each OD pair into operational air routes
"""

from collections import defaultdict
import warnings

import numpy as np
from sklearn.cluster import DBSCAN
from sklearn.neighbors import NearestNeighbors

from airnet.exceptions import (DegenerateTrajectoryError, FormatError, InsufficientDataError,
                               SelectionWarning)
from airnet.ingest import resample_elapsed, resample_trajectory
from airnet._util import LOGGER, project_nm


NOISE = -1

# OD pairs named in the too-few-trajectories warning
SHORT_LISTED = 10


class ClusterLabeling(object):
    """
    Args:
        labels(array): Cluster id per input vector, :py:data:`NOISE` for outliers
        epsilon(float): Neighborhood radius used
        minpt(int): Minimum neighborhood size used

    **Result of density-based clustering**
    """

    __slots__ = ('labels', 'epsilon', 'minpt')

    def __init__(self, labels, epsilon, minpt):
        self.labels = np.asarray(labels, dtype=int)
        self.epsilon = float(epsilon)
        self.minpt = int(minpt)

    def __repr__(self):
        return '%s(clusters=%d, noise=%d, epsilon=%r, minpt=%r)' % (
            self.__class__.__name__, self.n_clusters, int(np.sum(self.labels == NOISE)),
            self.epsilon, self.minpt)

    @property
    def n_clusters(self):
        """:py:class:`int` -- Number of clusters, noise excluded"""
        return int(self.labels.max()) + 1 if len(self.labels) else 0

    def members(self, cluster):
        """
        Args:
            cluster(int): Cluster id

        Returns:
            :py:class:`numpy.ndarray`: Indices of vectors in the cluster
        """
        return np.flatnonzero(self.labels == cluster)


class Route(object):
    """
    Args:
        route_id(str): Route identifier
        od_pair(tuple): (origin, destination)
        centroid(array): (m, 2) array of latitude, longitude
        usage_prob(float): Share of the OD pair's clustered trajectories
        member_count(int): Number of member trajectories
        elapsed(array): Mean minutes since departure at each centroid vertex

    **Operational air route of one OD pair**
    """

    __slots__ = ('route_id', 'od_pair', 'centroid', 'usage_prob', 'member_count', 'elapsed')

    # pylint: disable-next=too-many-arguments,too-many-positional-arguments
    def __init__(self, route_id, od_pair, centroid, usage_prob, member_count, elapsed=None):
        self.route_id = route_id
        self.od_pair = tuple(od_pair)
        self.centroid = np.asarray(centroid, dtype=float).reshape(-1, 2)
        self.usage_prob = float(usage_prob)
        self.member_count = int(member_count)
        if elapsed is None:
            elapsed = np.zeros(len(self.centroid))
        self.elapsed = np.asarray(elapsed, dtype=float)

    def __repr__(self):
        return '%s(%r, %r, usage_prob=%.4f, members=%d)' % (
            self.__class__.__name__, self.route_id, self.od_pair, self.usage_prob,
            self.member_count)

    def to_record(self):
        """
        Returns:
            dict: JSON-compatible representation
        """
        return {'route_id': self.route_id,
                'od_pair': list(self.od_pair),
                'usage_prob': self.usage_prob,
                'member_count': self.member_count,
                'centroid': [[float(lat), float(lon)] for lat, lon in self.centroid],
                'elapsed': [float(value) for value in self.elapsed]}

    @classmethod
    def from_record(cls, record):
        """
        Args:
            record(dict): Output of :py:meth:`to_record`

        Returns:
            Route: Rebuilt route
        """
        try:
            return cls(record['route_id'], record['od_pair'], record['centroid'],
                       record['usage_prob'], record['member_count'], record.get('elapsed'))
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError('Malformed route record: %s' % e) from None


def dbscan(vectors, epsilon, minpt, metric='euclidean'):
    """
    Args:
        vectors(array): Equal-length real vectors, or a square distance matrix
            when ``metric`` is ``'precomputed'``
        epsilon(float): Neighborhood radius
        minpt(int): Neighbors within ``epsilon`` (self included) needed for a core point
        metric(str or callable): Distance accepted by :py:class:`sklearn.cluster.DBSCAN`

    Returns:
        ClusterLabeling: Cluster ids contiguous from 0, :py:data:`NOISE` for outliers
    """

    if epsilon <= 0:
        raise ValueError('epsilon must be positive, received %r' % epsilon)
    if minpt < 1:
        raise ValueError('minpt must be at least 1, received %r' % minpt)

    data = np.asarray(vectors, dtype=float)
    if not len(data):
        return ClusterLabeling([], epsilon, minpt)

    labels = DBSCAN(eps=epsilon, min_samples=minpt, metric=metric).fit(data).labels_
    return ClusterLabeling(labels, epsilon, minpt)


def kdistance_curve(vectors, k):
    """
    Args:
        vectors(array): Real vectors
        k(int): Neighbor rank

    Returns:
        :py:class:`numpy.ndarray`: Distance from each vector to its k-th nearest other vector,
        sorted descending with ties kept in input order
    """

    data = np.asarray(vectors, dtype=float)
    if len(data) < k + 1:
        raise InsufficientDataError('k-distance needs at least %d vectors, received %d' %
                                    (k + 1, len(data)))

    distances, _ = NearestNeighbors(n_neighbors=k + 1).fit(data).kneighbors(data)
    kdist = distances[:, k]
    order = np.lexsort((np.arange(len(kdist)), -kdist))
    return kdist[order]


def kdistance_epsilon(vectors, k):
    """
    Args:
        vectors(array): Real vectors
        k(int): Neighbor rank, normally the clustering ``minpt``

    Returns:
        float: Distance at the knee of the sorted k-distance curve

    The knee is the point with the largest perpendicular distance below the chord joining
    the ends of the descending curve, both axes scaled to [0, 1]. A flat curve returns its
    common value.

    Raises:
        InsufficientDataError: Fewer than k + 1 vectors, or the knee is not positive
    """

    curve = kdistance_curve(vectors, k)
    if curve[0] <= 0:
        raise InsufficientDataError('All k-distances are zero; epsilon would be 0')

    span = curve[0] - curve[-1]
    if span <= 0 or len(curve) < 3:
        epsilon = float(curve[-1])
    else:
        x = np.linspace(0.0, 1.0, len(curve))
        y = (curve - curve[-1]) / span

        # Chord runs from (0, 1) to (1, 0); np.argmax keeps the first maximum
        below = 1.0 - x - y
        epsilon = float(curve[int(np.argmax(below))])

    if not epsilon > 0:
        raise InsufficientDataError('Knee of the k-distance curve is at %r' % epsilon)

    return epsilon


def _project_group(vectors):
    """
    Project resampled lat/lon vectors to nautical miles about the OD midpoint
    """

    points = vectors.reshape(len(vectors), -1, 2)
    ends = np.concatenate((points[:, 0], points[:, -1]))
    lat0, lon0 = ends.mean(axis=0)
    x, y = project_nm(points[..., 0], points[..., 1], lat0, lon0)
    return np.stack((x, y), axis=-1).reshape(len(vectors), -1)


def mine_routes(trajectories, m=50, minpt=5, epsilon_overrides=None):
    """
    Args:
        trajectories(list): :py:class:`~airnet.ingest.Trajectory` objects of any OD pairs
        m(int): Resample count per trajectory
        minpt(int): DBSCAN minimum neighborhood size, also the k-distance rank
        epsilon_overrides(dict): OD pair to fixed epsilon in nautical miles

    Returns:
        list: :py:class:`Route` objects ordered by OD pair and cluster id

    OD pairs with fewer than ``minpt`` usable trajectories, or whose k-distance curve has no
    positive knee, are skipped with a :py:exc:`~airnet.exceptions.SelectionWarning`.
    """

    epsilon_overrides = {tuple(od): eps for od, eps in (epsilon_overrides or {}).items()}

    groups = defaultdict(list)
    for traj in trajectories:
        groups[traj.od_pair].append(traj)

    routes = []
    short = []
    for od_pair in sorted(groups):

        vectors, elapsed = [], []
        for traj in groups[od_pair]:
            try:
                vectors.append(resample_trajectory(traj, m))
                elapsed.append(resample_elapsed(traj, m))
            except DegenerateTrajectoryError as e:
                LOGGER.debug('Skipping trajectory: %s', e)

        if len(vectors) < minpt:
            short.append('%s-%s' % od_pair)
            continue

        vectors = np.array(vectors)
        elapsed = np.array(elapsed)
        projected = _project_group(vectors)

        epsilon = epsilon_overrides.get(od_pair)
        if epsilon is None:
            try:
                epsilon = kdistance_epsilon(projected, minpt)
            except InsufficientDataError as e:
                warnings.warn('Skipping OD pair %s-%s: %s' % (od_pair + (e,)), SelectionWarning)
                continue

        labeling = dbscan(projected, epsilon, minpt)
        clustered = int(np.sum(labeling.labels != NOISE))

        LOGGER.debug('OD %s-%s: %d trajectories, epsilon %.3f NM, %d clusters, %d noise',
                     od_pair[0], od_pair[1], len(vectors), epsilon, labeling.n_clusters,
                     len(vectors) - clustered)

        for cluster in range(labeling.n_clusters):
            members = labeling.members(cluster)
            routes.append(Route('%s-%s-%d' % (od_pair[0], od_pair[1], cluster), od_pair,
                                vectors[members].mean(axis=0),
                                len(members) / float(clustered), len(members),
                                elapsed[members].mean(axis=0)))

    if short:
        listed = ', '.join(short[:SHORT_LISTED]) + (' ...' if len(short) > SHORT_LISTED else '')
        warnings.warn('Skipping %d OD pair(s) with fewer than %d trajectories: %s' %
                      (len(short), minpt, listed), SelectionWarning)

    LOGGER.info('Mined %d routes over %d OD pairs', len(routes), len(groups))
    return routes
