# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Test module for airnet.config**
"""

from io import StringIO

from airnet.config import DEFAULTS, RunConfig
from airnet.exceptions import ConfigError

from tests import TestCase


CONFIG = u"""
# Two-day sample
tracks = data/tracks.csv
days = 2
strict = yes
omega3 = 0.5
bbox = 30, 100, 45, 125
"""


class TestRunConfig(TestCase):
    """Tests for RunConfig"""

    def test_defaults(self):
        """Every key starts at its default"""
        config = RunConfig()
        self.assertEqual(config.as_dict(), DEFAULTS)
        self.assertEqual(config.weights, (1.0, 1.0, 2.0))
        self.assertIsNone(config.bounding_box)
        self.assertIsNone(config.plugin_dirs)

    def test_load(self):
        """Values are read and coerced to the default's type"""
        config = RunConfig.load(StringIO(CONFIG))
        self.assertEqual(config.tracks, 'data/tracks.csv')
        self.assertEqual(config.days, 2.0)
        self.assertIsInstance(config.days, float)
        self.assertIs(config.strict, True)
        self.assertEqual(config.weights, (1.0, 1.0, 0.5))
        self.assertEqual(config.bounding_box, (30.0, 100.0, 45.0, 125.0))
        self.assertEqual(config.explicit, {'tracks', 'days', 'strict', 'omega3', 'bbox'})

    def test_overrides(self):
        """Overrides win over the file and None is skipped"""
        config = RunConfig.load(StringIO(CONFIG), {'days': '3', 'omega3': None, 'seed': 9})
        self.assertEqual(config.days, 3.0)
        self.assertEqual(config.omega3, 0.5)
        self.assertEqual(config.seed, 9)

    def test_errors(self):
        """Unknown keys, bad values, and malformed lines raise ConfigError"""
        with self.assertRaises(ConfigError):
            RunConfig(colour='blue')
        with self.assertRaises(ConfigError):
            RunConfig(minpt='five')
        with self.assertRaises(ConfigError):
            RunConfig(strict='perhaps')
        with self.assertRaises(ConfigError):
            RunConfig.load(StringIO(u'minpt 5\n'))
        with self.assertRaises(ConfigError):
            RunConfig.load('/nonexistent/airnet.conf')
        with self.assertRaises(ConfigError):
            _ = RunConfig(bbox='1,2,3').bounding_box

    def test_digest(self):
        """Digest ignores output location and strictness"""
        base = RunConfig().digest()
        self.assertEqual(len(base), 64)
        self.assertEqual(RunConfig(out='/tmp/elsewhere', strict=True).digest(), base)
        self.assertNotEqual(RunConfig(omega3=1.0).digest(), base)
        self.assertEqual(RunConfig(omega3='2').digest(), base)

    def test_require(self):
        """Strict mode requires keys to be set explicitly"""
        RunConfig().require('a_buffer')
        RunConfig(strict=True, a_buffer=20).require('a_buffer')
        with self.assertRaises(ConfigError) as e:
            RunConfig(strict=True, a_buffer=20).require('a_buffer', 'e_buffer')
        self.assertEqual(e.exception.friendly, 'set e_buffer explicitly (strict mode)')

    def test_plugin_dirs(self):
        """Plugin paths are split on commas"""
        self.assertEqual(RunConfig(plugin_paths='a, b,').plugin_dirs, ['a', 'b'])
