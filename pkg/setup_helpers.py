# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
Functions to help with build and setup
"""

import csv
import io
import os
import re
import sys


RE_VERSION = re.compile(r'__version__\s*=\s*[\'\"](.+)[\'\"]$')
DATA_DIR = os.path.join('airnet', 'data')

# Fixture file, identifier column, required columns
FIXTURES = (
    ('airports.csv', 'code', ('code', 'lat', 'lon', 'mu', 'k')),
    ('enroute_points.csv', 'point_id', ('point_id', 'lat', 'lon', 'radius', 'mu', 'k')),
)


def get_version(filename, encoding='utf8'):
    """
    Get __version__ definition out of a source file
    """

    with io.open(filename, encoding=encoding) as sourcecode:
        for line in sourcecode:
            version = RE_VERSION.match(line)
            if version:
                return version.group(1)

    return None


def readme(filename, encoding='utf8'):
    """
    Read the contents of a file
    """

    with io.open(filename, encoding=encoding) as source:
        return source.read()


def check_fixtures(directory=DATA_DIR):
    """
    Check bundled parameter tables for missing columns, duplicate identifiers,
    and non-positive service rates or Erlang orders
    """

    rtn = 0
    for filename, id_column, columns in FIXTURES:
        path = os.path.join(directory, filename)
        with io.open(path, encoding='utf8', newline='') as handle:
            reader = csv.DictReader(handle)
            missing = [column for column in columns if column not in reader.fieldnames]
            if missing:
                print('%s: missing column(s) %s' % (path, ', '.join(missing)))
                rtn = 1
                continue

            seen = set()
            for line, row in enumerate(reader, 2):
                if row[id_column] in seen:
                    print('%s:%d: duplicate %s %s' % (path, line, id_column, row[id_column]))
                    rtn = 1
                seen.add(row[id_column])
                if float(row['mu']) <= 0 or int(row['k']) < 1:
                    print('%s:%d: invalid mu or k' % (path, line))
                    rtn = 1

    return rtn


if __name__ == '__main__':

    # Do nothing if no arguments were given
    if len(sys.argv) < 2:
        sys.exit(0)

    if sys.argv[1] == 'fixtures':
        sys.exit(check_fixtures(*sys.argv[2:3]))

    # Unknown option
    sys.stderr.write('Unknown option: %s' % sys.argv[1])
    sys.exit(1)
