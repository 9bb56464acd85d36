# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Exceptions Submodule**

Provides exception and warning classes
"""


class AirnetError(Exception):
    """
    **Base exception class for Airnet exceptions**

    All Airnet exceptions are derived from this class.

    Subclass of :py:exc:`Exception`

    **Custom Instance Attributes**

        .. py:attribute:: friendly
            :annotation: = None

            :py:class:`str` -- Optional friendly output
    """

    def __init__(self, *args, **kwargs):
        super(AirnetError, self).__init__(*args)
        self.friendly = kwargs.get('friendly', None)


class FormatError(AirnetError):
    """
    **Input, fixture, or artifact does not have the expected layout**

    Subclass of :py:exc:`AirnetError`
    """


class ConfigError(AirnetError):
    """
    **Invalid configuration key or value**

    Subclass of :py:exc:`AirnetError`
    """


class DegenerateTrajectoryError(AirnetError):
    """
    **Trajectory has zero length and can not be resampled**

    Subclass of :py:exc:`AirnetError`
    """


class AmbiguityError(AirnetError):
    """
    **Records can not be ordered unambiguously**

    Subclass of :py:exc:`AirnetError`

    **Custom Instance Attributes**

        .. py:attribute:: offenders
            :annotation: = ()

            :py:class:`tuple` -- Keys of the conflicting records
    """

    def __init__(self, *args, **kwargs):
        super(AmbiguityError, self).__init__(*args, **kwargs)
        self.offenders = tuple(kwargs.get('offenders', ()))


class InsufficientDataError(AirnetError):
    """
    **Not enough observations for the requested estimate**

    Subclass of :py:exc:`AirnetError`
    """


class HorizonError(AirnetError, ValueError):
    """
    **Time lies outside the simulation horizon**

    Subclass of :py:exc:`AirnetError` and :py:exc:`ValueError`
    """


class NodeLookupError(AirnetError, KeyError):
    """
    **Unknown airport, en-route point, or route**

    Subclass of :py:exc:`AirnetError` and :py:exc:`KeyError`
    """

    def __str__(self):
        # KeyError quotes its argument
        return Exception.__str__(self)


class NumericalError(AirnetError):
    """
    **Base class for numerical failures**

    The command line interface exits with status 2 for these.

    Subclass of :py:exc:`AirnetError`
    """


class TruncationOverflowError(NumericalError):
    """
    **Arrival weights vanish below the queue capacity**

    Subclass of :py:exc:`NumericalError`
    """


class IntegrationError(NumericalError):
    """
    **Explicit time step is too large for a stable integration**

    Subclass of :py:exc:`NumericalError`
    """


class DivergenceError(NumericalError):
    """
    **Delay propagation did not settle within the iteration guard**

    Subclass of :py:exc:`NumericalError`

    **Custom Instance Attributes**

        .. py:attribute:: state
            :annotation: = {}

            :py:class:`dict` -- Diagnostic state at the time of failure
    """

    def __init__(self, *args, **kwargs):
        super(DivergenceError, self).__init__(*args, **kwargs)
        self.state = dict(kwargs.get('state', None) or {})


class AirnetWarning(UserWarning):
    """
    Base warning for Airnet

    Subclass of :py:exc:`UserWarning`
    """


class TruncationWarning(AirnetWarning):
    """
    Warning for mass clipped at the queue capacity or at the end of the horizon

    Subclass of :py:exc:`AirnetWarning`
    """


class SelectionWarning(AirnetWarning):
    """
    Warning for empty selections and skipped groups

    Subclass of :py:exc:`AirnetWarning`
    """


class HashMismatchWarning(AirnetWarning):
    """
    Warning for an artifact produced under a different configuration

    Subclass of :py:exc:`AirnetWarning`
    """
