# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Plugin Submodule**

Provides plugin parent classes and access to loaded plugins

Built-in plugins live in :py:mod:`airnet.plugins`. Additional plugins are loaded from
the ``airnet.plugins`` entry point group and from configured paths.
"""

import pluginlib

from airnet.exceptions import ConfigError
from airnet._util import LOGGER, check_iterable


PLUGIN_GROUP = 'airnet'
ENTRY_POINT = 'airnet.plugins'

_LOADERS = {}


@pluginlib.Parent('scenario_edit', group=PLUGIN_GROUP)
class ScenarioEdit(object):
    """
    **Parent of capacity edits applied by scenarios**

    Children are accessed by their ``_alias_`` and must not modify the network passed in.
    """

    @pluginlib.abstractmethod
    def apply(self, network, target, magnitude):
        """
        Args:
            network(:py:class:`~airnet.network.MultiLayerNetwork`): Network to edit
            target(str): Node identifier the edit applies to, or :py:data:`None` for all
            magnitude(float): Edit magnitude

        Returns:
            :py:class:`~airnet.network.MultiLayerNetwork`: Edited copy
        """

    def describe(self, network, target, magnitude):
        """
        Returns:
            str: One-line description of the edit
        """
        return '%s %s %s' % (self.name, target, magnitude)  # pylint: disable=no-member


@pluginlib.Parent('hot_grid_selector', group=PLUGIN_GROUP)
class HotGridSelector(object):
    """
    **Parent of hot-grid selection rules**
    """

    @pluginlib.abstractmethod
    def select(self, grids, value, weights):
        """
        Args:
            grids(list): Scored :py:class:`~airnet.congestion.Grid` objects
            value(float): Rule parameter
            weights(tuple): Score weights

        Returns:
            list: Selected grids, highest score first
        """


def get_plugins(paths=None):
    """
    Args:
        paths(list): Extra directories to search for plugins

    Returns:
        dict: Nested dictionary of plugins accessible through dot-notation
    """

    check_iterable(paths=paths)
    key = tuple(paths or ())

    if key not in _LOADERS:
        LOGGER.debug('Creating plugin loader for paths %s', key)
        _LOADERS[key] = pluginlib.PluginLoader(group=PLUGIN_GROUP, library='airnet.plugins',
                                               entry_point=ENTRY_POINT, paths=key or None)

    return _LOADERS[key].plugins


def get_plugin(plugin_type, name, paths=None):
    """
    Args:
        plugin_type(str): Parent type, ``scenario_edit`` or ``hot_grid_selector``
        name(str): Plugin alias
        paths(list): Extra directories to search for plugins

    Returns:
        object: Instance of the plugin class

    Raises:
        ConfigError: No plugin of that type and name is loaded
    """

    plugins = get_plugins(paths)
    try:
        return plugins[plugin_type][name]()
    except KeyError:
        known = ', '.join(sorted(plugins.get(plugin_type, {})))
        raise ConfigError("Unknown %s '%s' (available: %s)" % (plugin_type, name, known),
                          friendly="unknown %s '%s'" % (plugin_type.replace('_', ' '), name)
                          ) from None
