# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Test module for airnet._plugins and airnet.plugins**
"""

from collections import namedtuple
import os

from airnet import _plugins
from airnet.exceptions import ConfigError
from airnet.network import load_fixture_network

from tests import DATA_DIR, TestCase


Cell = namedtuple('Cell', ('index', 'score'))
PLUGIN_DIR = os.path.join(DATA_DIR, 'plugins')


class TestLoading(TestCase):
    """Tests for plugin access"""

    def test_builtin(self):
        """Built-in edits and selectors are loaded"""
        plugins = _plugins.get_plugins()
        for name in ('runway', 'enroute_scale', 'eliminate'):
            self.assertIn(name, plugins.scenario_edit)
        for name in ('top_n', 'threshold'):
            self.assertIn(name, plugins.hot_grid_selector)

    def test_cached(self):
        """Loaders are reused per path list"""
        plugins = _plugins.get_plugins()
        loader = _plugins._LOADERS[()]  # pylint: disable=protected-access
        self.assertEqual(_plugins.get_plugins(None), plugins)
        self.assertIs(_plugins._LOADERS[()], loader)  # pylint: disable=protected-access

        _plugins.get_plugins([PLUGIN_DIR])
        self.assertIn((PLUGIN_DIR,), _plugins._LOADERS)  # pylint: disable=protected-access
        self.assertIs(_plugins._LOADERS[()], loader)  # pylint: disable=protected-access

    def test_unknown(self):
        """Unknown plugins raise ConfigError naming the available ones"""
        with self.assertRaises(ConfigError) as e:
            _plugins.get_plugin('hot_grid_selector', 'bottom_n')
        self.assertIn('threshold, top_n', str(e.exception))
        self.assertEqual(e.exception.friendly, "unknown hot grid selector 'bottom_n'")

        with self.assertRaises(ConfigError):
            _plugins.get_plugin('runway_builder', 'runway')

    def test_paths(self):
        """Plugins load from extra directories"""
        edit = _plugins.get_plugin('scenario_edit', 'noop', [PLUGIN_DIR])
        network = load_fixture_network()
        edited = edit.apply(network, 'CTU', 1.0)
        self.assertIsNot(edited, network)
        self.assertEqual(edit.describe(network, 'CTU', 1.0), 'noop CTU 1.0')

    def test_paths_checked(self):
        """Plugin paths must be iterable"""
        with self.assertRaises(TypeError):
            _plugins.get_plugins(PLUGIN_DIR)


class TestSelectors(TestCase):
    """Tests for hot-grid selectors"""

    def setUp(self):
        super(TestSelectors, self).setUp()
        self.cells = [Cell((0, 0), 2.0), Cell((0, 1), 4.0), Cell((1, 0), 3.0),
                      Cell((1, 1), 3.0), Cell((2, 2), 1.0)]

    def test_top_n(self):
        """Ties with the last selected grid are kept"""
        selector = _plugins.get_plugin('hot_grid_selector', 'top_n')
        self.assertEqual([cell.index for cell in selector.select(self.cells, 2, (1, 1, 2))],
                         [(0, 1), (1, 0), (1, 1)])
        self.assertEqual(len(selector.select(self.cells, 10, (1, 1, 2))), 5)
        self.assertEqual(selector.select(self.cells, 0, (1, 1, 2)), [])

    def test_threshold(self):
        """Scores are compared after dividing by the weight sum"""
        selector = _plugins.get_plugin('hot_grid_selector', 'threshold')
        selected = selector.select(self.cells, 0.5, (1, 1, 2))
        self.assertEqual([cell.index for cell in selected], [(0, 1), (1, 0), (1, 1)])
        self.assertEqual(selector.select(self.cells, 1.0, (1, 1, 2)), [])
