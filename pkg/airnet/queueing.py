# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Queue Engine Submodule**

Transient solution of the single-server queue with nonstationary Poisson arrivals
and Erlang-k service, sampled at epochs inside every sub-period

The engine carries the distribution of outstanding service phases, so waits at every
epoch are those of the exact truncated queue. Times are minutes. Demand rates and service
rates are operations per sub-period.
"""

from bisect import bisect_right
from functools import lru_cache
import math
import warnings

import numpy as np
import pandas as pd
from scipy.stats import poisson

from airnet.exceptions import (HorizonError, InsufficientDataError, IntegrationError,
                               TruncationOverflowError, TruncationWarning)
from airnet._util import LOGGER


DEFAULT_CAPACITY = 120
DEFAULT_DT = 15.0
TERMINAL_BOUND = 1e-6
MAX_ERLANG_ORDER = 20

# Arrival weights summing below this over states 0..N carry no usable information
ALPHA_FLOOR = 1e-12

# Poisson tail mass dropped when uniformizing one sub-period
JUMP_TAIL = 1e-12

# Reference integration step as a fraction of the mean time between transitions
ORACLE_STEP = 0.25

# Empty queues without arrivals stay empty
EMPTY_TOLERANCE = 1e-15


def index(t, dt=DEFAULT_DT, t0=0.0, t_end=None):
    """
    Args:
        t(float): Time in minutes
        dt(float): Sub-period length in minutes
        t0(float): Horizon start
        t_end(float): Horizon end, unbounded when :py:data:`None`

    Returns:
        int: Sub-period containing ``t``; sub-periods are half-open ``[start, end)``

    Raises:
        HorizonError: ``t`` lies outside ``[t0, t_end]``
    """

    if t < t0 or (t_end is not None and t > t_end):
        raise HorizonError('Time %r outside horizon [%r, %r]' % (t, t0, t_end))
    return int(math.floor((t - t0) / dt))


class QueueParams(object):
    """
    Args:
        k(int): Erlang order of the service time
        mu(float or array): Service rate per sub-period, scalar or one value per sub-period
        capacity(int): Largest number in system kept in the state vector

    **Service parameters of one queue**
    """

    __slots__ = ('k', 'mu', 'capacity')

    def __init__(self, k, mu, capacity=DEFAULT_CAPACITY):

        if int(k) != k or k < 1:
            raise ValueError('Erlang order must be an integer of at least 1, received %r' % k)
        if int(capacity) != capacity or capacity < 1:
            raise ValueError('capacity must be an integer of at least 1, received %r' % capacity)

        mu = np.asarray(mu, dtype=float)
        if np.any(mu <= 0) or not np.all(np.isfinite(mu)):
            raise ValueError('Service rate must be positive and finite, received %r' % (mu,))

        self.k = int(k)
        self.mu = float(mu) if mu.ndim == 0 else mu
        self.capacity = int(capacity)

    def __repr__(self):
        mu = self.mu if isinstance(self.mu, float) else '<%d rates>' % len(self.mu)
        return '%s(k=%d, mu=%s, capacity=%d)' % (self.__class__.__name__, self.k, mu,
                                                 self.capacity)

    def mu_at(self, slot):
        """
        Args:
            slot(int): Sub-period

        Returns:
            float: Service rate in effect, the last value for slots past the array
        """
        if isinstance(self.mu, float):
            return self.mu
        return float(self.mu[min(slot, len(self.mu) - 1)])

    def copy(self, mu=None):
        """
        Args:
            mu(float or array): Replacement service rate

        Returns:
            QueueParams: Copy, optionally with a new service rate
        """
        return QueueParams(self.k, self.mu if mu is None else mu, self.capacity)


class DemandProfile(object):
    """
    Args:
        rates(array): Expected operations per sub-period
        dt(float): Sub-period length in minutes
        t0(float): Horizon start in minutes

    **Piecewise-constant demand over a horizon of** ``len(rates)`` **sub-periods**

    Rates are real-valued expectations, not counts.
    """

    __slots__ = ('rates', 'dt', 't0')

    def __init__(self, rates, dt=DEFAULT_DT, t0=0.0):

        rates = np.array(rates, dtype=float).reshape(-1)
        if np.any(rates < 0) or not np.all(np.isfinite(rates)):
            raise ValueError('Demand rates must be finite and non-negative')
        if dt <= 0:
            raise ValueError('dt must be positive, received %r' % dt)

        self.rates = rates
        self.dt = float(dt)
        self.t0 = float(t0)

    def __repr__(self):
        return '%s(<%d rates, total %g>, dt=%r, t0=%r)' % (
            self.__class__.__name__, len(self.rates), self.total, self.dt, self.t0)

    @classmethod
    def zeros(cls, m, dt=DEFAULT_DT, t0=0.0):
        """
        Returns:
            DemandProfile: Profile of ``m`` empty sub-periods
        """
        return cls(np.zeros(m), dt, t0)

    @property
    def m(self):
        """:py:class:`int` -- Number of sub-periods"""
        return len(self.rates)

    @property
    def t_end(self):
        """:py:class:`float` -- Horizon end in minutes"""
        return self.t0 + self.m * self.dt

    @property
    def total(self):
        """:py:class:`float` -- Demand summed over the horizon"""
        return float(self.rates.sum())

    def index(self, t):
        """
        Sub-period of ``t``; the horizon end maps to the last sub-period
        """
        return min(index(t, self.dt, self.t0, self.t_end), self.m - 1)

    def slot_start(self, slot):
        """
        Returns:
            float: Start time of a sub-period in minutes
        """
        return self.t0 + slot * self.dt

    def copy(self):
        """
        Returns:
            DemandProfile: Independent copy
        """
        return DemandProfile(self.rates.copy(), self.dt, self.t0)


class QueueState(object):
    """
    Args:
        time(float): Epoch time in minutes
        probabilities(array): Probability of 0..N in system
        phases(array): Probability of 0..kN service phases outstanding, when known

    **Distribution of the number in system at one epoch**

    A state without ``phases`` is read as every customer in service having just started.
    """

    __slots__ = ('time', 'probabilities', 'phases')

    def __init__(self, time, probabilities, phases=None):
        self.time = float(time)
        self.probabilities = np.asarray(probabilities, dtype=float)
        self.phases = None if phases is None else np.asarray(phases, dtype=float)

    def __repr__(self):
        return '%s(time=%r, p0=%.6f, capacity=%d)' % (self.__class__.__name__, self.time,
                                                      self.p0, self.capacity)

    @property
    def p0(self):
        """:py:class:`float` -- Probability the queue is empty"""
        return float(self.probabilities[0])

    @property
    def capacity(self):
        """:py:class:`int` -- Largest state"""
        return len(self.probabilities) - 1


class WaitCurve(object):
    """
    Args:
        times(array): Sample times in minutes, ascending
        waits(array): Expected waiting time in minutes at each sample
        lengths(array): Expected queue length at each sample
        final(QueueState): Distribution at the last sample, if available

    **Expected wait and queue length sampled over a horizon**

    Sampling between samples uses the last sample at or before the requested time.
    """

    __slots__ = ('times', 'waits', 'lengths', 'final')

    def __init__(self, times, waits, lengths, final=None):
        self.times = np.asarray(times, dtype=float)
        self.waits = np.asarray(waits, dtype=float)
        self.lengths = np.asarray(lengths, dtype=float)
        self.final = final

    def __repr__(self):
        return '%s(<%d samples>, max wait %.3f)' % (self.__class__.__name__, len(self.times),
                                                    self.waits.max() if len(self.waits) else 0)

    def __len__(self):
        return len(self.times)

    def _position(self, t):
        return max(int(np.searchsorted(self.times, t, side='right')) - 1, 0)

    def wait_at(self, t):
        """
        Args:
            t(float): Time in minutes

        Returns:
            float: Expected wait at the last sample at or before ``t``
        """
        return float(self.waits[self._position(t)])

    def length_at(self, t):
        """
        Args:
            t(float): Time in minutes

        Returns:
            float: Expected queue length at the last sample at or before ``t``
        """
        return float(self.lengths[self._position(t)])

    def to_frame(self):
        """
        Returns:
            :py:class:`pandas.DataFrame`: Columns time, wait, length
        """
        return pd.DataFrame({'time': self.times, 'wait': self.waits, 'length': self.lengths})


def init_state(capacity, t0=0.0, k=1):
    """
    Args:
        capacity(int): Largest number in system
        t0(float): Start time
        k(int): Erlang order, sizing the phase distribution

    Returns:
        QueueState: Empty queue
    """

    if capacity < 1:
        raise ValueError('capacity must be at least 1, received %r' % capacity)

    probabilities = np.zeros(int(capacity) + 1)
    probabilities[0] = 1.0
    phases = np.zeros(int(k) * int(capacity) + 1)
    phases[0] = 1.0
    return QueueState(t0, probabilities, phases)


@lru_cache(maxsize=4096)
def arrival_weights(ratio, capacity):
    """
    Args:
        ratio(float): Expected arrivals during one epoch
        capacity(int): Largest number in system

    Returns:
        :py:class:`numpy.ndarray`: Poisson probabilities of 0..capacity arrivals, read-only

    Raises:
        TruncationOverflowError: The probabilities vanish over 0..capacity
    """

    alpha = poisson.pmf(np.arange(capacity + 1), ratio)
    if alpha.sum() < ALPHA_FLOOR:
        raise TruncationOverflowError(
            'Arrival ratio %g overflows capacity %d' % (ratio, capacity),
            friendly='demand far exceeds capacity %d; increase capacity' % capacity)
    alpha.setflags(write=False)
    return alpha


def epoch_length(k, mu, dt=DEFAULT_DT):
    """
    Returns:
        float: Minutes between epochs, ``((k + 1) / k) / mu`` in sub-period units
    """
    return (k + 1.0) / k * dt / mu


@lru_cache(maxsize=256)
def _epoch_offsets(k, mu):
    """Epoch offsets inside one sub-period as fractions of it, followed by its end"""
    tau = epoch_length(k, mu, 1.0)
    count = max(int(math.ceil(1.0 / tau - 1e-9)), 1)
    return tuple(float(item) for item in np.arange(count) * tau) + (1.0,)


@lru_cache(maxsize=2048)
def _jump_weights(rate, offsets):
    """Poisson weights of uniformized jumps, one row per offset"""
    offsets = np.asarray(offsets, dtype=float)
    terms = int(poisson.ppf(1.0 - JUMP_TAIL, rate * offsets.max())) + 2
    weights = poisson.pmf(np.arange(terms), rate * offsets[:, None])
    weights.setflags(write=False)
    return weights


@lru_cache(maxsize=64)
def _phase_measures(k, capacity):
    """
    Per phase state: outstanding work in mean service times, number waiting,
    and whether the queue is full
    """

    phases = np.arange(k * capacity + 1)
    in_system = -(-phases // k)
    measures = np.column_stack((phases / float(k), np.maximum(in_system - 1, 0),
                                in_system == capacity)).astype(float)
    measures.setflags(write=False)
    return measures


def _fold(phases, k):
    """Phase distribution to the distribution of the number in system"""
    return np.concatenate(([phases[0]], phases[1:].reshape(-1, k).sum(axis=1)))


def _phase_vector(state, params):
    size = params.k * params.capacity + 1
    if state.phases is not None and len(state.phases) == size:
        return state.phases
    if state.capacity != params.capacity:
        raise ValueError('State capacity %d does not match %d' %
                         (state.capacity, params.capacity))
    phases = np.zeros(size)
    phases[np.arange(params.capacity + 1) * params.k] = state.probabilities
    return phases


def _propagate(phases, lam, mu, k, offsets):
    """
    Phase distributions after each offset, in sub-periods, of constant arrival rate ``lam``
    and service rate ``mu`` per sub-period

    Uniformization at rate ``lam + k * mu``: every jump is a phase completion or an arrival
    of ``k`` phases, blocked when the queue is full.
    """

    size = len(phases)
    if lam == 0 and phases[0] >= 1.0 - EMPTY_TOLERANCE:
        return np.tile(phases, (len(offsets), 1))

    rate = lam + k * mu
    down, up = k * mu / rate, lam / rate
    limit = size - 1 - k
    index = np.arange(size)
    stay = 1.0 - up * (index <= limit) - down * (index > 0)

    weights = _jump_weights(rate, offsets)
    vectors = np.zeros((weights.shape[1], size))
    vectors[0] = phases
    top = int(np.flatnonzero(phases > 1e-30)[-1])

    for n in range(1, len(vectors)):
        current, following = vectors[n - 1], vectors[n]
        np.multiply(current[:top + 1], stay[:top + 1], out=following[:top + 1])
        following[:top] += down * current[1:top + 1]
        if up:
            source = min(top, limit)
            if source >= 0:
                following[k:source + k + 1] += up * current[:source + 1]
            top = min(top + k, size - 1)

    result = weights @ vectors
    result /= result.sum(axis=1, keepdims=True)
    return result


def step_epoch(state, params, demand):
    """
    Args:
        state(QueueState): Current state
        params(QueueParams): Service parameters
        demand(DemandProfile): Demand profile

    Returns:
        QueueState: State one epoch later, or at the end of the state's sub-period when that
        comes first

    The arrival and service rates of the state's sub-period hold for the whole epoch.

    Raises:
        HorizonError: The state lies at or past the horizon end
        TruncationOverflowError: Arrivals during one epoch overflow the state space
    """

    if state.time >= demand.t_end:
        raise HorizonError('Epoch %r at or past horizon end %r' % (state.time, demand.t_end))

    k = params.k
    slot = demand.index(state.time)
    mu, lam = params.mu_at(slot), float(demand.rates[slot])
    arrival_weights(lam * epoch_length(k, mu, 1.0), params.capacity)

    end = min(state.time + epoch_length(k, mu, demand.dt), demand.slot_start(slot + 1))
    phases = _propagate(_phase_vector(state, params), lam, mu, k,
                        ((end - state.time) / demand.dt,))[0]
    return QueueState(end, _fold(phases, k), phases)


def expected_queue_length(state):
    """
    Args:
        state(QueueState): Queue state

    Returns:
        float: Expected number waiting, the one in service excluded
    """

    probabilities = state.probabilities
    return float(np.dot(np.arange(len(probabilities)), probabilities) - (1.0 - probabilities[0]))


def expected_wait(state, mu, dt=DEFAULT_DT):
    """
    Args:
        state(QueueState): Queue state
        mu(float): Service rate per sub-period
        dt(float): Sub-period length in minutes

    Returns:
        float: Expected wait in minutes, queue length over service rate
    """

    if mu <= 0:
        raise ValueError('Service rate must be positive, received %r' % mu)
    return expected_queue_length(state) * dt / mu


def virtual_wait(state, params, mu, dt=DEFAULT_DT):
    """
    Args:
        state(QueueState): Queue state
        params(QueueParams): Service parameters
        mu(float): Service rate per sub-period
        dt(float): Sub-period length in minutes

    Returns:
        float: Expected wait in minutes of an arrival at the state's time: the remaining
        phases of the one in service plus full services of those waiting
    """

    if mu <= 0:
        raise ValueError('Service rate must be positive, received %r' % mu)
    work = np.dot(_phase_vector(state, params), _phase_measures(params.k, params.capacity)[:, 0])
    return float(work) * dt / mu


class QueueEngine(object):
    """
    Args:
        params(QueueParams): Service parameters
        demand(DemandProfile): Demand profile, read live

    **Incrementally stepped queue of one node**

    Sub-periods are computed on demand, each from the phase distribution at its start, with
    samples at every epoch inside it. When the demand profile changes, call
    :py:meth:`invalidate` with the earliest changed sub-period; it and later sub-periods are
    recomputed when next requested.
    """

    __slots__ = ('params', 'demand', 'times', 'waits', 'lengths', '_starts', '_first',
                 '_terminal_warned')

    def __init__(self, params, demand):
        self.params = params
        self.demand = demand
        self._terminal_warned = False
        self.reset()

    def __repr__(self):
        return '%s(%r, sub-periods=%d)' % (self.__class__.__name__, self.params,
                                          len(self._first))

    def reset(self):
        """Return to the empty state at the horizon start"""
        self.times = []
        self.waits = []
        self.lengths = []
        self._starts = [init_state(self.params.capacity, self.demand.t0, self.params.k).phases]
        self._first = []

    @property
    def computed(self):
        """:py:class:`int` -- Number of sub-periods computed"""
        return len(self._first)

    def _compute(self, slot):
        params, demand = self.params, self.demand
        k = params.k
        mu, lam = params.mu_at(slot), float(demand.rates[slot])
        arrival_weights(lam * epoch_length(k, mu, 1.0), params.capacity)

        offsets = _epoch_offsets(k, mu)
        vectors = _propagate(self._starts[slot], lam, mu, k, offsets)
        measures = vectors @ _phase_measures(k, params.capacity)

        if not self._terminal_warned and measures[:, 2].max() > TERMINAL_BOUND:
            self._terminal_warned = True
            warnings.warn('Terminal-state probability %.3g exceeds %g in sub-period %d' %
                          (measures[:, 2].max(), TERMINAL_BOUND, slot), TruncationWarning)

        # The last row is the next sub-period's start, sampled only at the horizon end
        count = len(offsets) if slot == demand.m - 1 else len(offsets) - 1
        start = demand.slot_start(slot)
        self._first.append(len(self.times))
        self.times.extend(start + offset * demand.dt for offset in offsets[:count])
        self.waits.extend((measures[:count, 0] * demand.dt / mu).tolist())
        self.lengths.extend(measures[:count, 1].tolist())
        self._starts.append(vectors[-1])

    def advance(self, until):
        """
        Compute every sub-period up to the one containing ``until``, the whole horizon
        when ``until`` lies at or past its end
        """
        demand = self.demand
        target = demand.m - 1 if until >= demand.t_end else demand.index(max(until, demand.t0))
        while len(self._first) <= target:
            self._compute(len(self._first))

    def invalidate(self, slot):
        """
        Args:
            slot(int): Earliest sub-period whose demand changed

        Samples of ``slot`` and later sub-periods are discarded.
        """

        slot = max(int(slot), 0)
        if slot >= len(self._first):
            return
        cut = self._first[slot]
        for attr in ('times', 'waits', 'lengths'):
            del getattr(self, attr)[cut:]
        del self._first[slot:]
        del self._starts[slot + 1:]

    def wait_at(self, t):
        """
        Args:
            t(float): Time in minutes

        Returns:
            float: Expected wait in minutes at the last epoch at or before ``t``
        """
        self.advance(t)
        return self.waits[max(bisect_right(self.times, t) - 1, 0)]

    def length_at(self, t):
        """
        Args:
            t(float): Time in minutes

        Returns:
            float: Expected queue length at the last epoch at or before ``t``
        """
        self.advance(t)
        return self.lengths[max(bisect_right(self.times, t) - 1, 0)]

    def curve(self):
        """
        Returns:
            WaitCurve: Samples at every epoch across the horizon
        """
        self.advance(self.demand.t_end)
        phases = self._starts[-1]
        final = QueueState(self.demand.t_end, _fold(phases, self.params.k), phases)
        return WaitCurve(self.times, self.waits, self.lengths, final)


def run_profile(params, demand):
    """
    Args:
        params(QueueParams): Service parameters
        demand(DemandProfile): Demand profile

    Returns:
        WaitCurve: Expected wait and queue length at every epoch, starting empty
    """

    curve = QueueEngine(params, demand).curve()
    LOGGER.debug('Sampled %d epochs over %d sub-periods', len(curve), demand.m)
    return curve


def _generator(lam, mu, k, capacity):
    """
    Transition rates of the phase-expanded queue

    State 0 is empty; (n, s) with n in system and s phases left on the one in service
    sits at 1 + (n - 1) * k + (s - 1).
    """

    size = 1 + capacity * k
    rates = np.zeros((size, size))
    phase = k * mu

    def pos(n, s):
        return 1 + (n - 1) * k + (s - 1)

    rates[0, pos(1, k)] = lam
    for n in range(1, capacity + 1):
        for s in range(1, k + 1):
            here = pos(n, s)
            if n < capacity:
                rates[here, pos(n + 1, s)] += lam
            if s > 1:
                rates[here, pos(n, s - 1)] += phase
            elif n > 1:
                rates[here, pos(n - 1, k)] += phase
            else:
                rates[here, 0] += phase

    rates[np.diag_indices(size)] = -rates.sum(axis=1)
    return rates


def _runge_kutta(probabilities, scaled):
    """One classical fourth-order step; ``scaled`` is the generator times the step"""
    first = probabilities @ scaled
    second = (probabilities + 0.5 * first) @ scaled
    third = (probabilities + 0.5 * second) @ scaled
    fourth = (probabilities + third) @ scaled
    return probabilities + (first + 2.0 * second + 2.0 * third + fourth) / 6.0


def ck_oracle(params, demand, dt=None):
    """
    Args:
        params(QueueParams): Service parameters
        demand(DemandProfile): Demand profile
        dt(float): Largest integration step in minutes, chosen for accuracy when omitted

    Returns:
        WaitCurve: Exact expected virtual wait and queue length at each integration step;
        ``final`` holds the distribution of the number in system at the horizon end

    Reference solution integrating the full forward equations of the phase-expanded
    queue with explicit fourth-order Runge-Kutta steps. Intended for small state spaces.

    Raises:
        IntegrationError: ``dt`` is too large for a stable explicit step
    """

    k, capacity = params.k, params.capacity
    measures = _phase_measures(k, capacity)

    probabilities = init_state(capacity, demand.t0, k).phases
    times, waits, lengths = [demand.t0], [0.0], [0.0]
    generators = {}

    for slot in range(demand.m):
        lam = demand.rates[slot] / demand.dt
        mu = params.mu_at(slot) / demand.dt
        fastest = lam + k * mu

        if dt is None:
            steps = int(math.ceil(demand.dt * fastest / ORACLE_STEP))
        else:
            if dt * fastest > 1.0:
                raise IntegrationError(
                    'Step %g min unstable for total rate %g per min' % (dt, fastest))
            steps = int(math.ceil(demand.dt / dt))
        steps = max(steps, 1)
        step = demand.dt / steps

        key = (lam, mu, step)
        if key not in generators:
            generators[key] = _generator(lam, mu, k, capacity) * step
        scaled = generators[key]

        start = demand.slot_start(slot)
        for count in range(1, steps + 1):
            probabilities = _runge_kutta(probabilities, scaled)
            times.append(start + count * step)
            waits.append(float(probabilities @ measures[:, 0]) / mu)
            lengths.append(float(probabilities @ measures[:, 1]))

    return WaitCurve(times, waits, lengths,
                     QueueState(times[-1], _fold(probabilities, k), probabilities))


def estimate_erlang_order(service_times, max_order=MAX_ERLANG_ORDER):
    """
    Args:
        service_times(array): Observed service times
        max_order(int): Upper bound returned for nearly deterministic service

    Returns:
        int: Erlang order matching the squared coefficient of variation,
        ``round(mean ** 2 / variance)``, at least 1

    Moment-matching estimate for nodes without a published order.

    Raises:
        InsufficientDataError: Fewer than two observations or a non-positive mean
    """

    values = np.asarray(service_times, dtype=float)
    if len(values) < 2:
        raise InsufficientDataError('Erlang order needs at least 2 service times')

    mean, variance = values.mean(), values.var(ddof=1)
    if mean <= 0:
        raise InsufficientDataError('Service times must have a positive mean')
    if variance <= 0:
        return int(max_order)

    return int(min(max(round(mean ** 2 / variance), 1), max_order))
