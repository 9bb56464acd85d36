# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Entry point for ``python -m airnet``
"""

import sys

from airnet.cli import main


sys.exit(main())
