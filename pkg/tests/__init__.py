# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Test module for airnet**
"""

from io import StringIO
import logging
import os
import unittest
from unittest import mock  # noqa: F401

from airnet._util import LOGGER


OUTPUT = StringIO()
HANDLER = logging.StreamHandler(OUTPUT)
LOGGER.addHandler(HANDLER)
LOGGER.setLevel(logging.INFO)

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'testdata')

__all__ = ['mock', 'unittest', 'OUTPUT', 'DATA_DIR', 'TestCase']


class TestCase(unittest.TestCase):
    """Simple subclass of unittest.TestCase"""

    def setUp(self):
        OUTPUT.seek(0)
        OUTPUT.truncate(0)
