# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Configuration Submodule**

Run configuration read from a flat ``key = value`` file with command-line overrides
"""

from collections import OrderedDict
import hashlib
import io
import json

from airnet.exceptions import ConfigError
from airnet._util import LOGGER


# Key, default, description
FIELDS = (
    ('tracks', '', 'Track file'),
    ('schedule', '', 'Schedule file'),
    ('airports_fixture', '', 'Airport parameter file, bundled table when empty'),
    ('points_fixture', '', 'En-route point parameter file, bundled table when empty'),
    ('out', 'airnet-out', 'Output directory'),
    ('seed', 0, 'Random seed for synthetic data'),
    ('strict', False, 'Require buffers to be set explicitly'),
    ('plugin_paths', '', 'Comma-separated extra plugin directories'),
    ('min_points', 10, 'Minimum points per trajectory'),
    ('max_gap', 1800.0, 'Largest gap in seconds inside a trajectory'),
    ('min_traffic', 1.0, 'Minimum flights per day for an OD pair'),
    ('days', 1.0, 'Length of the observation period in days'),
    ('resample', 50, 'Points per resampled trajectory'),
    ('minpt', 5, 'Route clustering minimum neighborhood size'),
    ('bbox', '', 'lat_min,lon_min,lat_max,lon_max; derived from routes when empty'),
    ('grid_size', 20.0, 'Grid side in nautical miles'),
    ('accumulate', 'routes', "Grid metric source, 'routes' or 'trajectories'"),
    ('omega1', 1.0, 'Traffic load weight'),
    ('omega2', 1.0, 'Route count weight'),
    ('omega3', 2.0, 'Direction entropy weight'),
    ('hot_mode', 'top_n', "Hot grid selector, 'top_n' or 'threshold'"),
    ('hot_value', 75.0, 'Selector parameter'),
    ('point_epsilon', 50.0, 'Hot grid clustering radius in nautical miles'),
    ('point_minpt', 2, 'Hot grid clustering minimum neighborhood size'),
    ('corridor', 30.0, 'Route-point incidence half-width in nautical miles'),
    ('coverage', 0.9, 'Service rate coverage quantile'),
    ('dt', 15.0, 'Sub-period length in minutes'),
    ('t0', 240.0, 'Horizon start in minutes after midnight'),
    ('slots', 96, 'Sub-periods in the horizon'),
    ('capacity', 120, 'Queue state truncation'),
    ('a_buffer', 15.0, 'Ground turnaround slack in minutes'),
    ('e_buffer', 10.0, 'Flight-time slack in minutes'),
    ('scenario', '', 'Scenario file'),
)

DEFAULTS = OrderedDict((key, default) for key, default, _ in FIELDS)
DESCRIPTIONS = OrderedDict((key, description) for key, _, description in FIELDS)

TRUE_VALUES = ('1', 'true', 'yes', 'on')
FALSE_VALUES = ('0', 'false', 'no', 'off', '')

# Keys that do not change any artifact's content
UNHASHED = ('out', 'strict')


def _coerce(key, value):
    """
    Convert a value to the type of the key's default
    """

    default = DEFAULTS[key]
    if isinstance(value, type(default)) and not isinstance(value, str) or \
            isinstance(default, str) and isinstance(value, str):
        return value

    text = str(value).strip()
    try:
        if isinstance(default, bool):
            if text.lower() in TRUE_VALUES:
                return True
            if text.lower() in FALSE_VALUES:
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ConfigError("Invalid value for '%s': %r" % (key, value),
                          friendly="invalid value for '%s'" % key) from None
    return text


class RunConfig(object):
    """
    Args:
        kwargs: Configuration keys and values

    **Effective configuration of one run**

    Every key in :py:data:`FIELDS` is an attribute. Values are coerced to the type of the
    key's default.

    Raises:
        ConfigError: Unknown key or uncoercible value
    """

    __slots__ = tuple(DEFAULTS) + ('explicit',)

    def __init__(self, **kwargs):
        for key, default in DEFAULTS.items():
            setattr(self, key, default)
        self.explicit = set()
        self.update(kwargs)

    def __repr__(self):
        changed = ', '.join('%s=%r' % (key, getattr(self, key)) for key in sorted(self.explicit))
        return '%s(%s)' % (self.__class__.__name__, changed)

    def update(self, values):
        """
        Args:
            values(dict): Keys and values to set; :py:data:`None` values are skipped

        Raises:
            ConfigError: Unknown key or uncoercible value
        """

        for key in sorted(values):
            if values[key] is None:
                continue
            if key not in DEFAULTS:
                raise ConfigError("Unknown configuration key '%s'" % key,
                                  friendly="unknown configuration key '%s'" % key)
            setattr(self, key, _coerce(key, values[key]))
            self.explicit.add(key)

    @classmethod
    def load(cls, source=None, overrides=None):
        """
        Args:
            source: Path or file-like object, or :py:data:`None` for defaults only
            overrides(dict): Values taking precedence over the file

        Returns:
            RunConfig: Effective configuration

        Lines are ``key = value``; blank lines and lines starting with ``#`` are ignored.

        Raises:
            ConfigError: Unreadable file, malformed line, unknown key, or bad value
        """

        values = {}
        if source is not None:
            try:
                if isinstance(source, str):
                    with io.open(source, 'r', encoding='utf-8') as handle:
                        lines = handle.read().splitlines()
                else:
                    lines = source.read().splitlines()
            except OSError as e:
                raise ConfigError('Unable to read configuration %s: %s' % (source, e),
                                  friendly='configuration file %s not readable' % source) \
                    from None

            for number, line in enumerate(lines, 1):
                line = line.strip()
                if not line or line.startswith('#'):
                    continue
                if '=' not in line:
                    raise ConfigError('Line %d is not key = value: %r' % (number, line))
                key, value = (part.strip() for part in line.split('=', 1))
                values[key] = value

        config = cls()
        config.update(values)
        config.update(overrides or {})
        LOGGER.debug('Configuration: %r', config)
        return config

    def as_dict(self):
        """
        Returns:
            OrderedDict: Every key and its effective value
        """
        return OrderedDict((key, getattr(self, key)) for key in DEFAULTS)

    def digest(self):
        """
        Returns:
            str: SHA-256 hex digest of the canonical JSON of the configuration,
            output location and strictness excluded
        """
        content = {key: value for key, value in self.as_dict().items() if key not in UNHASHED}
        canonical = json.dumps(content, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    def require(self, *keys):
        """
        Args:
            keys(str): Keys that must have been set explicitly in strict mode

        Raises:
            ConfigError: Strict mode and a key was left at its default
        """
        if not self.strict:
            return
        missing = [key for key in keys if key not in self.explicit]
        if missing:
            raise ConfigError('Strict mode requires %s to be set' % ', '.join(missing),
                              friendly='set %s explicitly (strict mode)' % ', '.join(missing))

    @property
    def plugin_dirs(self):
        """:py:class:`list` -- Extra plugin directories, :py:data:`None` when unset"""
        dirs = [item.strip() for item in self.plugin_paths.split(',') if item.strip()]
        return dirs or None

    @property
    def weights(self):
        """:py:class:`tuple` -- (omega1, omega2, omega3)"""
        return (self.omega1, self.omega2, self.omega3)

    @property
    def bounding_box(self):
        """
        :py:class:`tuple` -- (lat_min, lon_min, lat_max, lon_max), or :py:data:`None` when unset

        Raises:
            ConfigError: Malformed box
        """
        if not self.bbox.strip():
            return None
        try:
            box = tuple(float(item) for item in self.bbox.split(','))
        except ValueError:
            box = ()
        if len(box) != 4:
            raise ConfigError('bbox must be four comma-separated numbers, received %r' %
                              self.bbox)
        return box
