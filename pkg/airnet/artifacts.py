# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Artifact Submodule**

Reads and writes JSON and delimited-text artifacts stamped with the producing
configuration's digest
"""

import io
import json
import os
import warnings

import pandas as pd

from airnet.exceptions import FormatError, HashMismatchWarning


HASH_PREFIX = '# config_hash: '
FLOAT_FORMAT = '%.6f'


def _check_hash(path, found, expected):
    if expected is not None and found != expected:
        warnings.warn('%s was produced under configuration %s, current is %s' %
                      (path, found, expected), HashMismatchWarning)


def write_json(path, kind, payload, config_hash):
    """
    Args:
        path(str): Output file
        kind(str): Artifact kind, checked on reading
        payload(dict): JSON-compatible content
        config_hash(str): Digest of the producing configuration

    Keys are sorted so equal content gives identical bytes.
    """

    directory = os.path.dirname(path)
    if directory and not os.path.isdir(directory):
        os.makedirs(directory)

    with io.open(path, 'w', encoding='utf-8', newline='\n') as handle:
        json.dump({'kind': kind, 'config_hash': config_hash, 'payload': payload}, handle,
                  sort_keys=True, indent=1, allow_nan=False)
        handle.write('\n')


def read_json(path, kind, expected_hash=None):
    """
    Args:
        path(str): Artifact file
        kind(str): Expected artifact kind
        expected_hash(str): Digest of the current configuration, not checked when omitted

    Returns:
        dict: Payload

    Raises:
        FormatError: Unreadable file or wrong kind
    """

    try:
        with io.open(path, 'r', encoding='utf-8') as handle:
            document = json.load(handle)
    except (OSError, ValueError) as e:
        raise FormatError('Unable to read %s: %s' % (path, e),
                          friendly='artifact %s could not be read' % path) from None

    if not isinstance(document, dict) or document.get('kind') != kind:
        raise FormatError('%s is not a %s artifact' % (path, kind))

    _check_hash(path, document.get('config_hash'), expected_hash)
    return document['payload']


def write_table(path, frame, config_hash):
    """
    Args:
        path(str): Output file
        frame(:py:class:`pandas.DataFrame`): Table
        config_hash(str): Digest of the producing configuration

    The first line is a ``# config_hash:`` comment; floats are written with six decimals.
    """

    directory = os.path.dirname(path)
    if directory and not os.path.isdir(directory):
        os.makedirs(directory)

    with io.open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write('%s%s\n' % (HASH_PREFIX, config_hash))
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def read_table(path, expected_hash=None):
    """
    Args:
        path(str): Table written by :py:func:`write_table`
        expected_hash(str): Digest of the current configuration, not checked when omitted

    Returns:
        :py:class:`pandas.DataFrame`: Table

    Raises:
        FormatError: Unreadable file or missing hash line
    """

    try:
        with io.open(path, 'r', encoding='utf-8') as handle:
            first = handle.readline().rstrip('\n')
            if not first.startswith(HASH_PREFIX):
                raise FormatError('%s has no configuration hash line' % path)
            frame = pd.read_csv(handle)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FormatError('Unable to read %s: %s' % (path, e),
                          friendly='table %s could not be read' % path) from None

    _check_hash(path, first[len(HASH_PREFIX):], expected_hash)
    return frame
