# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Scenario edit loaded from a plugin path
"""

from airnet._plugins import ScenarioEdit


class NoOp(ScenarioEdit):
    """Unchanged copy"""

    _alias_ = 'noop'

    def apply(self, network, target, magnitude):
        return network.copy()
