# Copyright 2025 - 2026 Airnet Developers, All Rights Reserved

# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.

"""
**Airnet Command-Line Submodule**

Pipeline driver: each subcommand reads upstream artifacts from the output directory,
runs one stage, and writes its own artifacts there

Exit status is 0 on success, 1 for input, configuration, and lookup errors, and
2 for numerical failures.
"""

import argparse
from collections import Counter
import io
import json
import logging
import os
import sys
import warnings

import numpy as np
import pandas as pd

from airnet import __version__
from airnet.artifacts import read_json, read_table, write_json, write_table
from airnet.config import DEFAULTS, DESCRIPTIONS, RunConfig
from airnet.congestion import (accumulate_grid_metrics, cluster_hot_grids, CongestionPoint,
                               grid_partition, heatmap_records, routes_from_trajectories,
                               score_grids, select_hot_grids, sensitivity_sweep)
from airnet.exceptions import AirnetError, AirnetWarning, ConfigError, NumericalError
from airnet.ingest import (assemble_trajectories, build_itineraries, filter_min_traffic,
                           parse_schedule, parse_tracks)
from airnet.network import (AIRPORT, AIRPORT_FIXTURE, build_network,
                            estimate_airport_throughput, estimate_enroute_throughput,
                            estimate_service_rate, Horizon,
                            load_fixture_network, MultiLayerNetwork, NetworkNode, POINT,
                            POINT_FIXTURE, select_day)
from airnet.queueing import QueueParams
from airnet.routes import mine_routes, Route
from airnet.scenario import (compare_runway_vs_enroute, DEFAULT_RUNWAYS, enroute_scale_sweep,
                             rank_cumulative_expansions, run_scenario, ScenarioSpec)
from airnet.simulation import Buffers, network_summary, simulate_day
from airnet.synth import generate_day, SynthSpec, write_day
from airnet._util import LOGGER


EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

ROUTES = 'routes.json'
CONGESTION = 'congestion.json'
HEATMAP = 'heatmap.csv'
NETWORK = 'network.json'
NODES = 'nodes.csv'
FLIGHTS = 'flights.csv'
SUMMARY = 'summary.json'
SCENARIO = 'scenario.csv'
TRACKS = 'tracks.csv'
SCHEDULE = 'schedule.csv'

DEFAULT_OMEGA3_VALUES = '0,0.5,1,1.5,2,2.5,3'


def _path(config, name):
    return os.path.join(config.out, name)


def _input(config, key, fallback):
    """
    Input file named by a configuration key, or the output directory's copy
    """

    path = getattr(config, key) or _path(config, fallback)
    if not os.path.isfile(path):
        raise ConfigError('Input file for %s not found: %s' % (key, path),
                          friendly='%s file not found: %s' % (key, path))
    return path


def _report_row_errors(errors, path):
    if errors:
        LOGGER.warning('%s: skipped %d malformed row(s), first at line %d (%s: %s)', path,
                       len(errors), errors[0].line, errors[0].column, errors[0].reason)


def _read_trajectories(config):
    path = _input(config, 'tracks', TRACKS)
    result = parse_tracks(path)
    _report_row_errors(result.errors, path)
    return assemble_trajectories(result.records, config.min_points, config.max_gap)


def _read_schedule(config):
    path = _input(config, 'schedule', SCHEDULE)
    result = parse_schedule(path)
    _report_row_errors(result.errors, path)
    return result.records


def _read_routes(config):
    payload = read_json(_path(config, ROUTES), 'routes', config.digest())
    return [Route.from_record(record) for record in payload['routes']]


def _read_network(config):
    return MultiLayerNetwork.from_record(read_json(_path(config, NETWORK), 'network',
                                                   config.digest()))


def _buffers(config):
    config.require('a_buffer', 'e_buffer')
    return Buffers(config.a_buffer, config.e_buffer)


def _itineraries(config, network):
    """
    Itineraries of the scheduled flights inside the horizon between known airports
    """

    codes = {node.node_id for node in network.airports}
    schedule = [record for record in select_day(_read_schedule(config), network.horizon)
                if record.origin in codes and record.destination in codes]
    return build_itineraries(schedule)


def _echo(text=''):
    print(text)


def _format_table(frame):
    return frame.to_string(float_format=lambda value: '%.4f' % value)


def cmd_synth(config, args):
    """
    Write a synthetic day over the first airports of the airport fixture

    Every chosen airport is linked in both directions to every other one. Aircraft start and
    fly to airports in proportion to their service rates, so no airport carries more than its
    share of the day's traffic.
    """

    fixture = load_fixture_network(config.airports_fixture or AIRPORT_FIXTURE,
                                   config.points_fixture or POINT_FIXTURE)
    chosen = [node for node in fixture.airports if node.location is not None][:args.airports]
    if len(chosen) < 2:
        raise ConfigError('At least two located airports are required, received %d' %
                          len(chosen))

    airports = {node.node_id: node.location for node in chosen}
    bundles = {(origin, destination): args.bundles
               for origin in airports for destination in airports if origin != destination}
    weights = {node.node_id: float(node.params.mu_at(0)) for node in chosen}

    spec = SynthSpec(airports, bundles, flights=args.flights,
                     chain_lengths=range(1, args.chain + 1), seed=config.seed,
                     outliers=args.outliers, weights=weights)
    paths = write_day(generate_day(spec), config.out)
    _echo('Synthetic day with %d flights: %s' % (args.flights, ', '.join(paths)))
    return EXIT_OK


def cmd_mine_routes(config, args):  # pylint: disable=unused-argument
    """
    Mine operational routes from the track file
    """

    trajectories = _read_trajectories(config)
    kept = filter_min_traffic(trajectories, config.min_traffic, config.days)
    if trajectories and not kept:
        LOGGER.warning('Traffic filter excluded every OD pair')

    routes = mine_routes(kept, config.resample, config.minpt)
    write_json(_path(config, ROUTES), 'routes',
               {'routes': [route.to_record() for route in routes]}, config.digest())

    per_od = Counter('%s-%s' % route.od_pair for route in routes)
    _echo('%d routes over %d OD pairs' % (len(routes), len(per_od)))
    for od_pair in sorted(per_od):
        _echo('  %-9s %d' % (od_pair, per_od[od_pair]))
    return EXIT_OK


def _bounding_box(config, routes):
    box = config.bounding_box
    if box is not None:
        return box
    if not routes:
        raise ConfigError('No routes to derive a bounding box from; set bbox',
                          friendly='no routes; set bbox explicitly')
    vertices = np.concatenate([route.centroid for route in routes])
    margin = config.grid_size / 60.0
    low, high = vertices.min(axis=0) - margin, vertices.max(axis=0) + margin
    return (float(low[0]), float(low[1]), float(high[0]), float(high[1]))


def _grid_metrics(config):
    routes = _read_routes(config)
    grids = grid_partition(_bounding_box(config, routes), config.grid_size)
    if config.accumulate == 'trajectories':
        accumulate_grid_metrics(routes_from_trajectories(_read_trajectories(config),
                                                         config.resample),
                                grids, config.days)
    elif config.accumulate == 'routes':
        accumulate_grid_metrics(routes, grids, config.days)
    else:
        raise ConfigError("accumulate must be 'routes' or 'trajectories', received %r" %
                          config.accumulate)
    return grids


def cmd_find_congestion(config, args):  # pylint: disable=unused-argument
    """
    Score grids, select hot grids, and cluster them into congestion points
    """

    grids = score_grids(_grid_metrics(config), config.weights)
    hot = select_hot_grids(grids, config.hot_mode, config.hot_value, config.weights,
                           config.plugin_dirs)
    points = cluster_hot_grids(hot, config.point_epsilon, config.point_minpt)

    digest = config.digest()
    write_json(_path(config, CONGESTION), 'congestion',
               {'weights': list(config.weights), 'mode': config.hot_mode,
                'value': config.hot_value,
                'hot_grids': [[grid.index[0], grid.index[1], grid.score] for grid in hot],
                'points': [point.to_record() for point in points]}, digest)
    write_table(_path(config, HEATMAP), heatmap_records(grids), digest)

    _echo('Weights %s: %d hot grids, %d congestion points' % (
        ', '.join('%g' % weight for weight in config.weights), len(hot), len(points)))
    return EXIT_OK


def _point_nodes(config, fixture, horizon, trajectories):
    """
    Point nodes from the congestion artifact, or the fixture points when there is none

    With trajectories, service rates come from observed passages; otherwise and for the
    Erlang order, from the fixture entry with the same identifier.
    """

    path = _path(config, CONGESTION)
    if not os.path.isfile(path):
        LOGGER.info('No %s; using fixture points', path)
        return fixture.points

    known = {node.node_id: node for node in fixture.points}
    nodes = []
    for record in read_json(path, 'congestion', config.digest())['points']:
        point = CongestionPoint.from_record(record)
        template = known.get(point.point_id)
        k = template.params.k if template else 1
        mu = template.params.mu if template else 1.0
        if trajectories:
            counts = estimate_enroute_throughput(trajectories, point, config.corridor,
                                                 horizon.dt)
            if len(counts):
                mu = float(max(estimate_service_rate(counts, config.coverage), 1))
        nodes.append(NetworkNode(point.point_id, POINT, point.centroid,
                                 QueueParams(k, mu, config.capacity), horizon.empty_demand(),
                                 point.radius))
    return nodes


def _airport_nodes(config, fixture, horizon, schedule):
    """
    Fixture airports, plus airports of the schedule missing from the fixture with a
    service rate estimated from actual times
    """

    nodes = list(fixture.airports)
    known = {node.node_id for node in nodes}
    for code in sorted({code for record in schedule for code in record.od_pair} - known):
        counts = estimate_airport_throughput(schedule, code, horizon.dt)
        mu = float(max(estimate_service_rate(counts, config.coverage), 1)) if len(counts) \
            else 1.0
        LOGGER.debug('Airport %s missing from fixture; estimated rate %g', code, mu)
        nodes.append(NetworkNode(code, AIRPORT, None, QueueParams(1, mu, config.capacity),
                                 horizon.empty_demand()))
    return nodes


def cmd_build_network(config, args):  # pylint: disable=unused-argument
    """
    Assemble the multi-layer network and its demand profiles
    """

    schedule = _read_schedule(config)
    horizon = Horizon.for_schedule(schedule, config.t0, config.dt, config.slots)
    fixture = load_fixture_network(config.airports_fixture or AIRPORT_FIXTURE,
                                   config.points_fixture or POINT_FIXTURE, horizon,
                                   config.capacity)

    trajectories = _read_trajectories(config) if config.tracks or \
        os.path.isfile(_path(config, TRACKS)) else []

    network = build_network(_airport_nodes(config, fixture, horizon, schedule),
                            _point_nodes(config, fixture, horizon, trajectories),
                            _read_routes(config), schedule, horizon, config.corridor)
    write_json(_path(config, NETWORK), 'network', network.to_record(), config.digest())

    _echo('Network: %d airports, %d points, %d routes, %d crossings' % (
        len(network.airports), len(network.points), len(network.routes),
        len(network.crossings)))
    return EXIT_OK


def _print_report(network_delay, nodes):
    _echo('Network average delay per flight: %.4f min' % network_delay)
    present = nodes.dropna(subset=['local'])
    top = present.sort_values(['local', 'node'], ascending=[False, True],
                              kind='mergesort').head(5)
    _echo('Top nodes by local delay:')
    for row in top.itertuples(index=False):
        _echo('  %-6s %-7s local %.4f  propagated %.4f' % (row.node, row.kind, row.local,
                                                          row.propagated))


def cmd_simulate(config, args):  # pylint: disable=unused-argument
    """
    Simulate the day and write node and flight delay tables
    """

    buffers = _buffers(config)
    network = _read_network(config)
    report = simulate_day(network, _itineraries(config, network), buffers)

    digest = config.digest()
    nodes = report.node_table()
    write_table(_path(config, NODES), nodes, digest)
    write_table(_path(config, FLIGHTS), report.flight_table(), digest)

    summary = network_summary(report)
    write_json(_path(config, SUMMARY), 'summary',
               {'network_delay': report.network_delay,
                'flights': len(report.flight_delays),
                'by_kind': {kind: {'local': _finite(row.local),
                                   'propagated': _finite(row.propagated),
                                   'nodes': int(row.nodes)}
                            for kind, row in summary.iterrows()}}, digest)

    _print_report(report.network_delay, nodes)
    _echo(_format_table(summary))
    return EXIT_OK


def _finite(value):
    return None if pd.isna(value) else float(value)


def _parse_runway(text):
    airport, _, runways = text.partition(':')
    try:
        return ('runway', airport, float(runways) if runways else float(DEFAULT_RUNWAYS))
    except ValueError:
        raise ConfigError('Runway edit must be AIRPORT[:RUNWAYS], received %r' % text) \
            from None


def _scenario_spec(config, args):
    edits = [_parse_runway(item) for item in args.runway or ()]
    edits += [('eliminate', airport, 100.0) for airport in args.eliminate or ()]
    if args.scale is not None:
        edits.append(('enroute_scale', None, args.scale))
    if edits:
        return ScenarioSpec('cli', edits, args.subset or ())

    if not config.scenario:
        raise ConfigError('No scenario file or edits given',
                          friendly='give a scenario file or at least one edit flag')
    try:
        with io.open(config.scenario, 'r', encoding='utf-8') as handle:
            record = json.load(handle)
    except (OSError, ValueError) as e:
        raise ConfigError('Unable to read scenario %s: %s' % (config.scenario, e),
                          friendly='scenario file %s could not be read' % config.scenario) \
            from None
    return ScenarioSpec.from_record(record)


def cmd_scenario(config, args):
    """
    Evaluate a capacity scenario against the baseline
    """

    buffers = _buffers(config)
    spec = _scenario_spec(config, args)
    network = _read_network(config)
    result = run_scenario(network, _itineraries(config, network), buffers, spec,
                          plugin_paths=config.plugin_dirs)

    write_table(_path(config, SCENARIO), result.to_frame(), config.digest())
    for description in result.descriptions:
        _echo('Applied %s' % description)
    _echo('Network average delay per flight: %.4f -> %.4f min (reduction %.4f)' % (
        result.baseline.network_delay, result.scenario.network_delay, result.network_delta))
    for airport in spec.subset:
        _echo('  flights of %s: reduction %.4f min' % (airport, result.subset_delta(airport)))
    return EXIT_OK


def cmd_report(config, args):  # pylint: disable=unused-argument
    """
    Print the summary of the last simulation in the output directory
    """

    digest = config.digest()
    summary = read_json(_path(config, SUMMARY), 'summary', digest)
    nodes = read_table(_path(config, NODES), digest)
    nodes['node'] = nodes['node'].astype(str)

    _print_report(summary['network_delay'], nodes)
    for kind in sorted(summary['by_kind']):
        row = summary['by_kind'][kind]
        if row['local'] is None:
            _echo('  %-7s no traffic' % kind)
        else:
            _echo('  %-7s local %.4f  propagated %.4f  over %d nodes' % (
                kind, row['local'], row['propagated'], row['nodes']))
    return EXIT_OK


def _airport_list(args):
    if not args.airports:
        raise ConfigError('This sweep needs --airports')
    return [code.strip() for code in args.airports.split(',') if code.strip()]


def _float_list(text):
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ConfigError('Expecting comma-separated numbers, received %r' % text) from None


def cmd_sweep(config, args):
    """
    Parameter sweeps: en-route scale curve, entropy-weight sensitivity, cumulative runway
    expansions, and runway versus en-route comparison
    """

    digest = config.digest()
    target = _path(config, 'sweep_%s.csv' % args.kind)

    if args.kind == 'omega3':
        values = _float_list(args.values or DEFAULT_OMEGA3_VALUES)
        report = sensitivity_sweep(_grid_metrics(config), values, config.weights[:2],
                                   config.hot_mode, config.hot_value, config.plugin_dirs)
        frame = report.jaccard.reset_index().rename(columns={'index': 'omega3'})
        frame.columns = [str(column) for column in frame.columns]
        write_table(target, frame, digest)
        _echo('%d grids selected under every weight, %d weight-sensitive' % (
            len(report.intersection), len(report.sensitive)))
        return EXIT_OK

    buffers = _buffers(config)
    network = _read_network(config)
    itineraries = _itineraries(config, network)

    if args.kind == 'enroute':
        kwargs = {'factors': _float_list(args.values)} if args.values else {}
        frame = enroute_scale_sweep(network, itineraries, buffers,
                                    plugin_paths=config.plugin_dirs, **kwargs)
    elif args.kind == 'expansions':
        frame = rank_cumulative_expansions(network, itineraries, buffers, _airport_list(args),
                                           plugin_paths=config.plugin_dirs)
    else:
        frame = compare_runway_vs_enroute(network, itineraries, buffers, _airport_list(args),
                                          plugin_paths=config.plugin_dirs)

    write_table(target, frame, digest)
    _echo(_format_table(frame))
    return EXIT_OK


def _add_flag(parser, flag, key, kind=str, text=None):
    parser.add_argument(flag, dest=key, type=kind, default=None,
                        help=text or '%s (config: %s)' % (DESCRIPTIONS[key], key))


def build_parser():
    """
    Returns:
        :py:class:`argparse.ArgumentParser`: Parser with one subparser per command
    """

    parser = argparse.ArgumentParser(prog='airnet',
                                     description='Air traffic multi-layer network delay model')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--config', help='Configuration file of key = value lines')
    parser.add_argument('--out', default=None, help='Output directory')
    parser.add_argument('--seed', type=int, default=None, help='Random seed')
    parser.add_argument('--strict', action='store_true', default=None,
                        help='Require buffers to be set explicitly')
    parser.add_argument('--set', action='append', metavar='KEY=VALUE',
                        help='Override any configuration key')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')

    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    sub = commands.add_parser('synth', help='Write a synthetic day of tracks and schedules')
    sub.add_argument('--airports', type=int, default=6, help='Fixture airports to use')
    sub.add_argument('--flights', type=int, default=300, help='Flights in the day')
    sub.add_argument('--bundles', type=int, default=2, help='Route bundles per OD pair')
    sub.add_argument('--outliers', type=int, default=0, help='Outlier flights per OD pair')
    sub.add_argument('--chain', type=int, default=3, help='Longest aircraft itinerary')
    sub.set_defaults(func=cmd_synth)

    sub = commands.add_parser('mine-routes', help='Mine operational routes from tracks')
    _add_flag(sub, '--tracks', 'tracks')
    _add_flag(sub, '--min-traffic', 'min_traffic', float)
    _add_flag(sub, '--days', 'days', float)
    _add_flag(sub, '--minpt', 'minpt', int)
    _add_flag(sub, '--resample', 'resample', int)
    sub.set_defaults(func=cmd_mine_routes)

    sub = commands.add_parser('find-congestion', help='Identify en-route congestion points')
    _add_flag(sub, '--tracks', 'tracks')
    _add_flag(sub, '--grid-size', 'grid_size', float)
    _add_flag(sub, '--bbox', 'bbox')
    _add_flag(sub, '--accumulate', 'accumulate')
    for number in (1, 2, 3):
        _add_flag(sub, '--omega%d' % number, 'omega%d' % number, float)
    selection = sub.add_mutually_exclusive_group()
    selection.add_argument('--top-n', type=int, default=None, help='Select the n best grids')
    selection.add_argument('--threshold', type=float, default=None,
                           help='Select grids above a normalized score')
    sub.set_defaults(func=cmd_find_congestion)

    sub = commands.add_parser('build-network', help='Build the multi-layer network')
    _add_flag(sub, '--tracks', 'tracks')
    _add_flag(sub, '--schedule', 'schedule')
    _add_flag(sub, '--corridor', 'corridor', float)
    _add_flag(sub, '--coverage', 'coverage', float)
    sub.set_defaults(func=cmd_build_network)

    for name, func, text in (('simulate', cmd_simulate, 'Simulate delay propagation'),
                             ('scenario', cmd_scenario, 'Evaluate a capacity scenario'),
                             ('sweep', cmd_sweep, 'Run a parameter sweep')):
        sub = commands.add_parser(name, help=text)
        _add_flag(sub, '--schedule', 'schedule')
        _add_flag(sub, '--a-buffer', 'a_buffer', float)
        _add_flag(sub, '--e-buffer', 'e_buffer', float)
        sub.set_defaults(func=func)

        if name == 'scenario':
            _add_flag(sub, '--scenario', 'scenario', text='Scenario file')
            sub.add_argument('--runway', action='append', metavar='AIRPORT[:N]',
                             help='Add a runway to an airport with N runways (default %d)' %
                             DEFAULT_RUNWAYS)
            sub.add_argument('--eliminate', action='append', metavar='AIRPORT',
                             help='Eliminate en-route congestion on routes of an airport')
            sub.add_argument('--scale', type=float, default=None,
                             help='Scale every en-route service rate')
            sub.add_argument('--subset', action='append', metavar='AIRPORT',
                             help='Report delay of flights of an airport')
        elif name == 'sweep':
            sub.add_argument('kind', choices=('enroute', 'omega3', 'expansions', 'compare'))
            sub.add_argument('--values', help='Comma-separated factors or entropy weights')
            sub.add_argument('--airports', help='Comma-separated airport codes')

    sub = commands.add_parser('report', help='Print the last simulation summary')
    sub.set_defaults(func=cmd_report)

    return parser


def load_config(args):
    """
    Args:
        args(:py:class:`argparse.Namespace`): Parsed arguments

    Returns:
        RunConfig: File values overridden by ``--set`` and then by dedicated flags
    """

    overrides = {}
    for item in args.set or ():
        key, sep, value = item.partition('=')
        if not sep:
            raise ConfigError('--set expects KEY=VALUE, received %r' % item)
        overrides[key.strip()] = value.strip()

    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value

    if getattr(args, 'top_n', None) is not None:
        overrides.update(hot_mode='top_n', hot_value=args.top_n)
    if getattr(args, 'threshold', None) is not None:
        overrides.update(hot_mode='threshold', hot_value=args.threshold)

    return RunConfig.load(args.config, overrides)


def main(argv=None):
    """
    Args:
        argv(list): Arguments, ``sys.argv[1:]`` when omitted

    Returns:
        int: Exit status
    """

    args = build_parser().parse_args(argv)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
    LOGGER.addHandler(handler)
    LOGGER.setLevel(logging.DEBUG if args.verbose else logging.INFO)

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter('always', AirnetWarning)
            try:
                config = load_config(args)
                return args.func(config, args)
            finally:
                for item in caught:
                    LOGGER.warning('%s', item.message)

    except NumericalError as e:
        LOGGER.error('Numerical failure: %s', e.friendly or e)
        return EXIT_NUMERICAL
    except (AirnetError, ValueError, KeyError) as e:
        LOGGER.error('%s', getattr(e, 'friendly', None) or e)
        return EXIT_INPUT
    finally:
        LOGGER.removeHandler(handler)
