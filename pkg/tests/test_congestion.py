# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Test module for airnet.congestion**
"""

import warnings

import numpy as np

from airnet import congestion
from airnet.exceptions import ConfigError, InsufficientDataError, SelectionWarning
from airnet.ingest import Trajectory, TrackPoint
from airnet.routes import Route

from tests import TestCase


def make_grid(index, load, routes, entropy):
    """Grid with preset metrics"""
    grid = congestion.Grid(index, (0.0, 0.0, 1.0, 1.0))
    grid.traffic_load, grid.route_count, grid.entropy = load, routes, entropy
    return grid


def by_index(grids):
    """Map grid index to grid"""
    return {grid.index: grid for grid in grids}


class TestGridSystem(TestCase):
    """Tests for GridSystem"""

    def test_shape(self):
        """Rows and columns cover the box, partial cells included"""
        system = congestion.GridSystem((30.0, 110.0, 31.0, 113.0), 20.0)
        self.assertEqual(system.rows, 3)
        self.assertEqual(system.cols, 8)

    def test_locate(self):
        """Boundary points belong to the lower-index cell"""
        system = congestion.GridSystem((30.0, 110.0, 31.0, 111.0), 30.0)
        self.assertEqual(system.locate(30.5, 110.1), (0, 0))
        self.assertEqual(system.locate(30.75, 110.1), (1, 0))
        self.assertEqual(system.locate(30.0, 110.0), (0, 0))
        self.assertIsNone(system.locate(29.0, 110.1))
        self.assertIsNone(system.locate(30.5, 111.5))

    def test_traverse(self):
        """A straight east-bound line visits a row of cells in order"""
        grids = congestion.grid_partition((30.0, 110.0, 31.0, 113.0), 20.0)
        cells = by_index(grids)
        start, end = cells[(1, 0)].center, cells[(1, 3)].center
        visited = grids[0].system.traverse([start, end])
        self.assertEqual(visited, [(1, 0), (1, 1), (1, 2), (1, 3)])

    def test_invalid(self):
        """Degenerate boxes and cells are rejected"""
        with self.assertRaises(ValueError):
            congestion.GridSystem((31.0, 110.0, 30.0, 111.0), 20.0)
        with self.assertRaises(ValueError):
            congestion.GridSystem((30.0, 110.0, 31.0, 111.0), 0.0)


class TestEntropy(TestCase):
    """Tests for grid_entropy"""

    def test_value(self):
        """Shares of 1/4, 1/2, 1/4 give 1.5 bits"""
        hist = congestion.DirectionHistogram({'WE': 100, 'SN': 200, 'WN': 100})
        self.assertAlmostEqual(congestion.grid_entropy(hist), 1.5)

    def test_degenerate(self):
        """Empty and single-direction grids have zero entropy"""
        self.assertEqual(congestion.grid_entropy(congestion.DirectionHistogram()), 0.0)
        self.assertEqual(congestion.grid_entropy(congestion.DirectionHistogram({'WE': 5})), 0.0)


class TestAccumulate(TestCase):
    """Tests for accumulate_grid_metrics"""

    def setUp(self):
        super(TestAccumulate, self).setUp()
        self.grids = congestion.grid_partition((30.0, 110.0, 31.0, 111.0), 20.0)
        cells = by_index(self.grids)
        west, center = cells[(1, 0)].center, cells[(1, 1)].center
        east, south, north = cells[(1, 2)].center, cells[(0, 1)].center, cells[(2, 1)].center
        self.routes = [Route('A', ('W', 'E'), [west, east], 1.0, 1),
                       Route('B', ('S', 'N'), [south, north], 1.0, 1),
                       Route('C', ('W', 'N'), [west, center, north], 1.0, 1)]

    def test_direction_bookkeeping(self):
        """Three directions with loads 100, 200, 100 in the center grid"""
        histograms = congestion.accumulate_grid_metrics(self.routes, self.grids,
                                                        loads={'A': 100, 'B': 200, 'C': 100})
        center = by_index(self.grids)[(1, 1)]
        hist = histograms[(1, 1)]
        self.assertEqual(dict(hist.loads), {'WE': 100, 'SN': 200, 'WN': 100})
        self.assertEqual(hist.n_directions, 3)
        self.assertEqual(hist.total, 400.0)
        self.assertEqual(center.traffic_load, 400.0)
        self.assertEqual(center.route_count, 3)
        self.assertAlmostEqual(center.entropy, 1.5)

    def test_endpoints(self):
        """Grids where routes start count load but no direction"""
        histograms = congestion.accumulate_grid_metrics(self.routes, self.grids, days=2.0)
        west = by_index(self.grids)[(1, 0)]
        self.assertEqual(west.route_count, 2)
        self.assertEqual(west.traffic_load, 1.0)
        self.assertEqual(histograms[(1, 0)].total, 0.0)
        self.assertEqual(west.entropy, 0.0)

    def test_empty(self):
        """No grids give no histograms"""
        self.assertEqual(congestion.accumulate_grid_metrics(self.routes, []), {})

    def test_trajectories(self):
        """Each trajectory becomes a single-member route"""
        points = [TrackPoint('F1', 60.0 * idx, 30.0 + 0.1 * idx, 110.0, 0.0, 0.0, 'A', 'B', '')
                  for idx in range(5)]
        converted = congestion.routes_from_trajectories([Trajectory('F1', ('A', 'B'), points)],
                                                        m=5)
        self.assertEqual(len(converted), 1)
        self.assertEqual(converted[0].member_count, 1)
        self.assertEqual(converted[0].centroid.shape, (5, 2))


class TestScore(TestCase):
    """Tests for score_grids"""

    def test_maximum(self):
        """A grid at the maximum of every metric scores the weight sum"""
        grids = congestion.score_grids([make_grid((0, 0), 10.0, 4, 1.5),
                                        make_grid((0, 1), 0.0, 0, 0.0)], (1, 1, 2))
        self.assertEqual(grids[0].score, 4.0)
        self.assertEqual(grids[0].standardized, (1.0, 1.0, 1.0))
        self.assertEqual(grids[1].score, 0.0)

    def test_rescaling(self):
        """Rescaling a raw metric does not change the scores"""
        metrics = [(3.0, 2, 0.5), (7.0, 1, 1.0), (1.0, 3, 0.0)]
        first = congestion.score_grids([make_grid((0, idx), *item)
                                        for idx, item in enumerate(metrics)])
        second = congestion.score_grids([make_grid((0, idx), item[0] * 25.0, item[1], item[2])
                                         for idx, item in enumerate(metrics)])
        np.testing.assert_allclose([grid.score for grid in first],
                                   [grid.score for grid in second])

    def test_no_traffic(self):
        """Grids without traffic cannot be scored"""
        with self.assertRaises(InsufficientDataError):
            congestion.score_grids([make_grid((0, 0), 0.0, 0, 0.0)])


class TestSelect(TestCase):
    """Tests for select_hot_grids"""

    def setUp(self):
        super(TestSelect, self).setUp()
        self.grids = [make_grid((0, idx), 0.0, 0, 0.0) for idx in range(4)]
        for grid, score in zip(self.grids, (1.0, 2.0, 4.0, 2.0)):
            grid.score = score

    def test_top_n_ties(self):
        """Grids tied with the n-th score are all selected"""
        hot = congestion.select_hot_grids(self.grids, 'top_n', 2)
        self.assertEqual([grid.index for grid in hot], [(0, 2), (0, 1), (0, 3)])

    def test_threshold(self):
        """Threshold compares score over weight sum"""
        hot = congestion.select_hot_grids(self.grids, 'threshold', 0.6, (1, 1, 2))
        self.assertEqual([grid.index for grid in hot], [(0, 2)])

    def test_empty_selection(self):
        """A threshold above 1 selects nothing and warns"""
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always')
            self.assertEqual(congestion.select_hot_grids(self.grids, 'threshold', 1.5), [])
        self.assertTrue(any(issubclass(item.category, SelectionWarning) for item in caught))

    def test_unknown_mode(self):
        """Unknown selectors raise ConfigError"""
        with self.assertRaisesRegex(ConfigError, 'best'):
            congestion.select_hot_grids(self.grids, 'best', 1)


class TestCluster(TestCase):
    """Tests for cluster_hot_grids"""

    def test_points(self):
        """Adjacent grids merge and an isolated grid stands alone"""
        cells = by_index(congestion.grid_partition((30.0, 110.0, 31.0, 113.0), 20.0))
        hot = [cells[(0, 0)], cells[(0, 1)], cells[(1, 0)], cells[(2, 7)]]
        for grid, score in zip(hot, (2.0, 1.5, 1.0, 3.0)):
            grid.score = score
            grid.traffic_load = 10.0

        points = congestion.cluster_hot_grids(hot, epsilon=50.0, minpt=2)
        self.assertEqual([point.point_id for point in points], ['1', '2'])
        self.assertEqual(points[0].member_grids, [(2, 7)])
        self.assertEqual(points[0].radius, 0.0)
        self.assertEqual(sorted(points[1].member_grids), [(0, 0), (0, 1), (1, 0)])
        self.assertEqual(points[1].load, 30.0)
        self.assertGreater(points[1].radius, 0.0)

    def test_empty(self):
        """No hot grids give no points"""
        self.assertEqual(congestion.cluster_hot_grids([]), [])

    def test_record(self):
        """Points rebuild from records"""
        point = congestion.CongestionPoint('3', [(1, 2)], (30.5, 110.5), 12.0, 7.0)
        rebuilt = congestion.CongestionPoint.from_record(point.to_record())
        self.assertEqual(rebuilt.member_grids, [(1, 2)])
        self.assertEqual(rebuilt.centroid, (30.5, 110.5))


class TestSensitivity(TestCase):
    """Tests for sensitivity_sweep"""

    def test_sweep(self):
        """Entropy weight flips the top grid"""
        grids = [make_grid((0, 0), 1.0, 1, 0.0), make_grid((0, 1), 0.5, 1, 1.0),
                 make_grid((0, 2), 0.0, 0, 0.0)]
        report = congestion.sensitivity_sweep(grids, [0, 1], mode='top_n', value=1)
        self.assertEqual(report.selections[0.0], frozenset([(0, 0)]))
        self.assertEqual(report.selections[1.0], frozenset([(0, 1)]))
        self.assertEqual(report.jaccard.loc[0.0, 1.0], 0.0)
        self.assertEqual(report.jaccard.loc[1.0, 1.0], 1.0)
        self.assertEqual(report.intersection, frozenset())
        self.assertEqual(report.sensitive, frozenset([(0, 0), (0, 1)]))
        self.assertEqual(grids[0].score, 0.0)

    def test_single_value(self):
        """At least two weights are required"""
        with self.assertRaises(ValueError):
            congestion.sensitivity_sweep([make_grid((0, 0), 1.0, 1, 0.0)], [2])


class TestHeatmap(TestCase):
    """Tests for heatmap_records"""

    def test_records(self):
        """One (row, col, score) row per grid"""
        grid = make_grid((2, 3), 1.0, 1, 0.0)
        grid.score = 0.75
        frame = congestion.heatmap_records([grid])
        self.assertEqual(list(frame.columns), ['row', 'col', 'score'])
        self.assertEqual(tuple(frame.iloc[0]), (2, 3, 0.75))
