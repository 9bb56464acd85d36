# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Test module for airnet._util**
"""

import numpy as np

import airnet._util as util

from tests import TestCase


class TestCheckIterable(TestCase):
    """Tests for check_iterable"""

    def test_accepted(self):
        """None, lists, and tuples pass"""
        util.check_iterable(first=None, second=[1], third=(2,))

    def test_string(self):
        """Strings are not accepted as iterables"""
        with self.assertRaisesRegex(TypeError, "Expecting iterable for 'paths'"):
            util.check_iterable(paths='plugins')

    def test_scalar(self):
        """Non-iterables raise TypeError"""
        with self.assertRaisesRegex(TypeError, "Expecting iterable for 'count'"):
            util.check_iterable(count=3)


class TestGreatCircle(TestCase):
    """Tests for great-circle distances"""

    def test_one_degree_of_latitude(self):
        """One degree along a meridian is about 60 NM"""
        self.assertAlmostEqual(float(util.great_circle_nm(30.0, 110.0, 31.0, 110.0)),
                               60.04, places=1)

    def test_same_point(self):
        """Distance to itself is zero"""
        self.assertEqual(float(util.great_circle_nm(40.0, 116.0, 40.0, 116.0)), 0.0)

    def test_pairwise(self):
        """Pairwise matrix is symmetric with a zero diagonal"""
        matrix = util.pairwise_great_circle_nm([(30.0, 110.0), (31.0, 110.0), (30.0, 111.0)])
        self.assertEqual(matrix.shape, (3, 3))
        np.testing.assert_allclose(matrix, matrix.T)
        np.testing.assert_allclose(np.diag(matrix), 0.0, atol=1e-9)
        self.assertAlmostEqual(matrix[0, 1], 60.04, places=1)


class TestProjection(TestCase):
    """Tests for the local equirectangular projection"""

    def test_scale(self):
        """One degree north is 60 NM of y; east shrinks with latitude"""
        x, y = util.project_nm([31.0, 30.0], [110.0, 111.0], 30.0, 110.0)
        self.assertAlmostEqual(float(y[0]), 60.0)
        self.assertAlmostEqual(float(x[0]), 0.0)
        self.assertAlmostEqual(float(x[1]), 60.0 * np.cos(np.radians(30.0)))

    def test_inverse(self):
        """Unprojection restores the coordinates"""
        lat = np.array([29.5, 30.25, 31.0])
        lon = np.array([109.0, 110.5, 112.0])
        x, y = util.project_nm(lat, lon, 30.0, 110.0)
        back_lat, back_lon = util.unproject_nm(x, y, 30.0, 110.0)
        np.testing.assert_allclose(back_lat, lat)
        np.testing.assert_allclose(back_lon, lon)
