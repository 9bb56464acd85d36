# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Hot-grid selection plugins**
"""

from airnet._plugins import HotGridSelector


def _ranked(grids):
    return sorted(grids, key=lambda grid: (-grid.score, grid.index))


class Threshold(HotGridSelector):
    """
    Grids whose score divided by the weight sum is larger than ``value``
    """

    _alias_ = 'threshold'

    def select(self, grids, value, weights):
        total = float(sum(weights))
        return [grid for grid in _ranked(grids) if grid.score / total > value]


class TopN(HotGridSelector):
    """
    The ``value`` highest-scoring grids, extended by grids tied with the last one
    """

    _alias_ = 'top_n'

    def select(self, grids, value, weights):
        ranked = _ranked(grids)
        count = int(value)
        if count <= 0:
            return []
        if count >= len(ranked):
            return ranked

        cutoff = ranked[count - 1].score
        return [grid for grid in ranked if grid.score >= cutoff]
