# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Utility Module**

This module contains generic functions for use in other modules
"""

from collections.abc import Iterable
import logging

import numpy as np


# Setup logger
LOGGER = logging.getLogger('airnet')
LOGGER.addHandler(logging.NullHandler())

EARTH_RADIUS_NM = 3440.065
NM_PER_DEGREE = 60.0

NoneType = type(None)


def check_iterable(**kwargs):
    """
    Args:
        kwargs: Argument names mapped to values

    Raise :py:exc:`TypeError` for any value that is not a non-string iterable or :py:data:`None`
    """

    for argname, arg in sorted(kwargs.items()):
        if not isinstance(arg, (NoneType, Iterable)) or isinstance(arg, (str, bytes)):
            raise TypeError("Expecting iterable for '%s', received %s" % (argname, type(arg)))


def great_circle_nm(lat1, lon1, lat2, lon2):
    """
    Args:
        lat1(float or array): Latitude of first point(s) in degrees
        lon1(float or array): Longitude of first point(s) in degrees
        lat2(float or array): Latitude of second point(s) in degrees
        lon2(float or array): Longitude of second point(s) in degrees

    Returns:
        float or :py:class:`numpy.ndarray`: Haversine distance in nautical miles
    """

    phi1, phi2 = np.radians(lat1), np.radians(lat2)
    dphi = phi2 - phi1
    dlmb = np.radians(np.asarray(lon2) - np.asarray(lon1))
    hav = np.sin(dphi / 2.0) ** 2 + np.cos(phi1) * np.cos(phi2) * np.sin(dlmb / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_NM * np.arcsin(np.sqrt(np.clip(hav, 0.0, 1.0)))


def pairwise_great_circle_nm(coords):
    """
    Args:
        coords(array): (n, 2) array of latitude, longitude pairs

    Returns:
        :py:class:`numpy.ndarray`: (n, n) matrix of great-circle distances in nautical miles
    """

    coords = np.asarray(coords, dtype=float).reshape(-1, 2)
    return great_circle_nm(coords[:, None, 0], coords[:, None, 1],
                           coords[None, :, 0], coords[None, :, 1])


def project_nm(lat, lon, lat0, lon0):
    """
    Args:
        lat(array): Latitudes in degrees
        lon(array): Longitudes in degrees
        lat0(float): Reference latitude
        lon0(float): Reference longitude

    Returns:
        tuple: (x, y) arrays in nautical miles east and north of the reference

    Local equirectangular projection
    """

    x = (np.asarray(lon, dtype=float) - lon0) * NM_PER_DEGREE * np.cos(np.radians(lat0))
    y = (np.asarray(lat, dtype=float) - lat0) * NM_PER_DEGREE
    return x, y


def unproject_nm(x, y, lat0, lon0):
    """
    Inverse of :py:func:`project_nm`
    """

    lat = lat0 + np.asarray(y, dtype=float) / NM_PER_DEGREE
    lon = lon0 + np.asarray(x, dtype=float) / (NM_PER_DEGREE * np.cos(np.radians(lat0)))
    return lat, lon
