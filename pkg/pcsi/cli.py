# -*- coding: utf-8 -*-

from fractions import Fraction
import functools
import logging
import math
import random
import sys

import click

from pcsi import settings
from pcsi.dbfile import generate_database, read_database, write_database, encode_database
from pcsi.exceptions import PCSIError
from pcsi.factory import create_server, init_observability
from pcsi.finite_field import next_prime
from pcsi.grs_code import is_mds, min_weight_support_census
from pcsi.lib.json import dumps
from pcsi.net_service import remote_retrieve
from pcsi.pir_protocol import (
    Database,
    ProtocolParams,
    SideInformation,
    client_build_query,
    retrieve_local,
    sample_instance,
    sample_side_info,
)
from pcsi.privacy_auditor import (
    answer_uniformity_census,
    audit_lemma1,
    capacity,
    check_w_privacy,
    check_ws_privacy,
    enumerate_posterior,
    measure_rate,
    w_privacy_capacity,
)
from pcsi.utils import format_fraction, parse_index_list, parse_residues


EXIT_FAILURE = 1
EXIT_ERROR = 2

MODEL_CHOICE = click.Choice(['I', 'II'], case_sensitive=False)


def handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except PCSIError as exc:
            logging.getLogger(__name__).debug('Command failed', exc_info=True)
            click.echo(f'error: {exc}', err=True)
            sys.exit(EXIT_ERROR)
    return wrapper


def _setting(key, default):
    return int(settings.get(key, default))


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Log at DEBUG level.')
def cli(verbose):
    init_observability(settings, logging.DEBUG if verbose else None)


@cli.command('db-gen')
@click.option('--q', 'q', type=int, required=True, help='Prime field size.')
@click.option('--K', 'K', type=int, required=True, help='Number of messages.')
@click.option('--m', 'm', type=int, default=1, show_default=True, help='Symbols per message.')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True)
@handle_errors
def db_gen(q, K, m, seed, out):
    """
    Write a database of K uniformly random messages
    """

    db = generate_database(q, K, m, random.Random(seed))
    write_database(out, db)
    click.echo(f'wrote {out}: q={q} K={K} m={m} ({len(encode_database(db))} bytes)')


def _side_info(params, db, W, S, C, rng):
    S = parse_index_list(S)
    C = parse_residues(C, params.q)
    if (S is None) != (C is None):
        raise click.UsageError('--S and --C must be given together')

    if S is None:
        return sample_side_info(params, db, W, rng)

    if len(S) != len(C):
        raise click.UsageError(f'--S has {len(S)} indices but --C has {len(C)} coefficients')
    si = SideInformation.create(db, S, dict(zip(S, C)), W)
    si.check_model(params)
    return si


@cli.command()
@click.option('--db', 'db_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--model', type=MODEL_CHOICE, default='I', show_default=True)
@click.option('--M', 'M', type=int, required=True, help='Side information size.')
@click.option('--W', 'W', type=int, required=True, help='Demand index (0-based).')
@click.option('--S', 'S', type=str, default=None, help='Side information indices, e.g. 0,2.')
@click.option('--C', 'C', type=str, default=None, help='Nonzero coefficients aligned with --S.')
@click.option('--remote', type=str, default=None, help='host:port of a running server.')
@click.option('--seed', type=int, default=0, show_default=True)
@handle_errors
def retrieve(db_path, model, M, W, S, C, remote, seed):
    """
    Retrieve message W privately, locally or from a server
    """

    db = read_database(db_path)
    params = ProtocolParams.create(db.field.q, db.K, M, db.m, model)
    rng = random.Random(seed)
    si = _side_info(params, db, W, S, C, rng)

    if remote:
        timeout = settings.get('SOCKET_TIMEOUT')
        recovered = remote_retrieve(remote, si, params, rng, timeout=float(timeout) if timeout else None)
        downloaded = params.num_rows * params.m
    else:
        recovered, downloaded, _ = retrieve_local(params, db, si, rng)

    verified = recovered == db.messages[W]
    click.echo(f'model: {params.model.name} q={params.q} K={params.K} M={params.M} m={params.m}')
    click.echo(f'side information: S={list(si.S)} C={[c.value for c in si.coefficients()]}')
    click.echo(f'demand: W={W}')
    click.echo(f'recovered: {" ".join(str(x.value) for x in recovered)}')
    click.echo(f'rows: {params.num_rows}')
    click.echo(f'downloaded symbols: {downloaded}')
    click.echo(f'rate: {format_fraction(Fraction(params.m, downloaded))}')
    click.echo(f'verified: {"yes" if verified else "no"}')

    if not verified:
        sys.exit(EXIT_FAILURE)


def seeded_build(params, seed):
    """One protocol run's generator matrix and query, reproducible from `seed`."""

    rng = random.Random(seed)
    db = Database.random(params.field, params.K, params.m, rng)
    si = sample_instance(params, db, rng)
    query, state = client_build_query(si, params, rng)
    return state.generator, query


def _audit_privacy(params, **_):
    report = enumerate_posterior(params, guard=_setting('PRIVACY_ENUMERATION_GUARD', 10 ** 8))
    verdict = check_ws_privacy(report)
    w_verdict = check_w_privacy(report)

    lines = [
        f'atoms: {report.atoms}',
        f'distinct queries: {report.distinct_queries}',
        f'prior: {format_fraction(next(iter(report.prior.values())))}',
        verdict.summary,
        f'W-privacy: {"PASS" if w_verdict.passed else "FAIL"}',
    ]
    data = report.as_dict()
    data['w_privacy'] = 'PASS' if w_verdict.passed else 'FAIL'
    return verdict.passed, verdict.worst_deviation, lines, data


def _audit_builds(params, seed, builds, check):
    passed = 0
    failures = []
    for build_seed in range(seed, seed + builds):
        G, _ = seeded_build(params, build_seed)
        if check(G):
            passed += 1
        else:
            failures.append(build_seed)
    return passed, failures


def _audit_mds(params, seed, builds, **_):
    passed, failures = _audit_builds(params, seed, builds, is_mds)
    lines = [f'MDS builds: {passed}/{builds}']
    if failures:
        lines.append(f'failing seeds: {failures}')
    return not failures, None, lines, {'mode': 'mds', 'builds': builds, 'passed': passed}


def _audit_lemma1(params, seed, builds, **_):
    guard = _setting('CODEWORD_ENUMERATION_GUARD', 10 ** 7)
    batch_size = _setting('CODEWORD_BATCH_SIZE', 1 << 16)

    def check(G):
        return audit_lemma1(G, params.model, params, guard=guard, batch_size=batch_size).passed

    passed, failures = _audit_builds(params, seed, builds, check)
    lines = [f'recovery witnesses found for every (W, S) in {passed}/{builds} builds']
    if failures:
        lines.append(f'failing seeds: {failures}')
    return not failures, None, lines, {'mode': 'lemma1', 'builds': builds, 'passed': passed}


def _audit_census(params, seed, **_):
    G, _ = seeded_build(params, seed)
    census = min_weight_support_census(
        G,
        guard=_setting('CODEWORD_ENUMERATION_GUARD', 10 ** 7),
        batch_size=_setting('CODEWORD_BATCH_SIZE', 1 << 16))

    expected_weight = params.K - params.num_rows + 1
    passed = (
        census.min_weight == expected_weight
        and census.uniform
        and census.supports == math.comb(params.K, expected_weight)
    )
    if census.uniform and census.counts:
        per_support = next(iter(census.counts.values()))
        line = f'min weight {census.min_weight}; {per_support} codewords per each of {census.supports} supports'
    else:
        line = f'min weight {census.min_weight}; unequal counts {sorted(set(census.counts.values()))} over {census.supports} supports'
    data = {
        'mode': 'census',
        'min_weight': census.min_weight,
        'supports': census.supports,
        'counts': sorted(set(census.counts.values())),
    }
    return passed, None, [line], data


def _audit_uniformity(params, seed, **_):
    _, query = seeded_build(params, seed)
    census = answer_uniformity_census(
        query, params, params.m, guard=_setting('CODEWORD_ENUMERATION_GUARD', 10 ** 7))

    expected_distinct = params.q ** (query.num_rows * params.m)
    passed = census.uniform and census.distinct == expected_distinct
    line = f'{census.distinct} answer tuples; expected count {census.expected} each'
    data = {'mode': 'uniformity', 'distinct': census.distinct, 'expected': census.expected}
    return passed, None, [line], data


AUDITS = {
    'privacy': _audit_privacy,
    'lemma1': _audit_lemma1,
    'mds': _audit_mds,
    'census': _audit_census,
    'uniformity': _audit_uniformity,
}


def write_report(path, data):
    with open(path, 'w', encoding='utf-8') as reportfile:
        for key in sorted(data):
            reportfile.write(f'{key}={dumps(data[key])}\n')


@cli.command()
@click.option('--mode', type=click.Choice(sorted(AUDITS)), required=True)
@click.option('--q', 'q', type=int, default=5, show_default=True)
@click.option('--K', 'K', type=int, default=3, show_default=True)
@click.option('--M', 'M', type=int, default=1, show_default=True)
@click.option('--m', 'm', type=int, default=1, show_default=True)
@click.option('--model', type=MODEL_CHOICE, default='I', show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--builds', type=int, default=None, help='Seeded builds for mds and lemma1.')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False), default=None)
@handle_errors
def audit(mode, q, K, M, m, model, seed, builds, report_path):
    """
    Run one of the exact audits and print the verdict
    """

    params = ProtocolParams.create(q, K, M, m, model)
    if builds is None:
        builds = _setting('AUDIT_DEFAULT_BUILDS', 100)

    passed, deviation, lines, data = AUDITS[mode](params, seed=seed, builds=builds)

    verdict = 'PASS' if passed else 'FAIL'
    headline = f'{mode}: {verdict}'
    if deviation is not None:
        headline += f', deviation {format_fraction(deviation)}'
    click.echo(f'model {params.model.name} q={params.q} K={params.K} M={params.M} R={params.num_rows}')
    click.echo(headline)
    for line in lines:
        click.echo(line)

    if report_path:
        data.update({'q': params.q, 'K': params.K, 'M': params.M, 'model': params.model.name, 'verdict': verdict})
        write_report(report_path, data)

    if not passed:
        sys.exit(EXIT_FAILURE)


@cli.command()
@click.option('--db', 'db_path', type=click.Path(dir_okay=False), required=True)
@click.option('--M', 'M', type=int, required=True, help='Side information size.')
@click.option('--model', type=MODEL_CHOICE, default='I', show_default=True)
@click.option('--listen', type=str, default=None, help='host:port; defaults to PCSI_LISTEN.')
@handle_errors
def serve(db_path, M, model, listen):
    """
    Host a database and answer queries until interrupted
    """

    db = read_database(db_path)
    params = ProtocolParams.create(db.field.q, db.K, M, db.m, model)
    server = create_server(db, params, listen, settings=settings)

    omegas = ','.join(str(w.value) for w in params.code.omegas)
    click.echo(
        f'serving q={params.q} K={params.K} M={params.M} m={params.m} '
        f'model {params.model.name} omegas={omegas} on {server.endpoint}')

    with server:
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            click.echo('shutting down')


@cli.command()
@click.option('--q', 'q', type=int, default=None, help='Defaults to the smallest prime >= max(K, 3).')
@click.option('--K', 'K', type=int, required=True)
@click.option('--M', 'M', type=int, required=True)
@click.option('--m', 'm', type=int, default=1, show_default=True)
@click.option('--model', type=MODEL_CHOICE, default='I', show_default=True)
@click.option('--trials', type=int, default=1, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@handle_errors
def rate(q, K, M, m, model, trials, seed):
    """
    Measure the download rate and compare it with the capacity
    """

    if q is None:
        q = next_prime(max(K, 3))
    params = ProtocolParams.create(q, K, M, m, model)

    measured = measure_rate(params, trials, random.Random(seed))
    click.echo(f'model {params.model.name} q={q} K={K} M={M} m={m}')
    click.echo(f'measured rate: {format_fraction(measured)}')
    click.echo(f'(W,S)-privacy capacity: {format_fraction(capacity(params.model, K, M))}')
    click.echo(f'W-privacy capacity: {format_fraction(w_privacy_capacity(params.model, K, M))}')


if __name__ == '__main__':
    cli()
