# -*- coding: utf-8 -*-

from fractions import Fraction
import dataclasses
import random

import pytest

from pcsi.exceptions import (
    EnumerationTooLargeError,
    InvalidArgumentError,
    InvalidQueryError,
    MalformedReportError,
)
from pcsi.finite_field import FieldParams
from pcsi.grs_code import (
    GeneratorMatrix,
    build_annihilator,
    build_generator,
    derive_multipliers_model1,
)
from pcsi.pir_protocol import (
    Database,
    Model,
    ProtocolParams,
    Query,
    client_build_query,
    sample_instance,
)
from pcsi.privacy_auditor import (
    AuditReport,
    answer_uniformity_census,
    audit_lemma1,
    capacity,
    check_w_privacy,
    check_ws_privacy,
    count_atoms,
    enumerate_posterior,
    measure_rate,
    prior_for,
    w_privacy_capacity,
)


def unshuffled_fixed_multipliers(si, params, rng=None, *, randomness=None):
    """Model I construction with every free multiplier pinned to 1 and no row shuffle."""

    code = params.code
    p = build_annihilator(code, set(si.S) | {si.W})
    ones = (params.field.one,) * (params.K - params.M)
    multipliers = derive_multipliers_model1(code, si.S, si.C, si.W, p, free=ones)
    G = build_generator(code, multipliers, params.num_rows)
    return Query(G.rows, params.model), None


@pytest.fixture(scope='module')
def model1_report():
    return enumerate_posterior(ProtocolParams.create(5, 3, 1, 1, Model.I))


@pytest.mark.parametrize('q, K, M, model, atoms', [
    (5, 3, 1, Model.I, 768),
    (5, 3, 2, Model.II, 2304),
])
def test_atom_counts(q, K, M, model, atoms):
    assert count_atoms(ProtocolParams.create(q, K, M, 1, model)) == atoms


def test_model1_privacy(model1_report):
    report = model1_report
    assert report.atoms == 768
    assert report.passed
    assert report.worst_deviation == 0
    assert set(report.prior.values()) == {Fraction(1, 6)}

    verdict = check_ws_privacy(report)
    assert verdict.passed
    assert check_w_privacy(report).passed


@pytest.mark.slow
@pytest.mark.parametrize('q, K, M, model', [
    (5, 3, 2, Model.II),
    (5, 4, 2, Model.I),
    (5, 4, 2, Model.II),
])
def test_privacy_passes(q, K, M, model):
    report = enumerate_posterior(ProtocolParams.create(q, K, M, 1, model))
    assert report.passed
    assert check_ws_privacy(report).worst_deviation == 0


@pytest.mark.parametrize('K, M, model, atoms', [
    (3, 2, Model.I, 192),
    (3, 3, Model.II, 576),
])
def test_privacy_single_row_and_full_side_info(K, M, model, atoms):
    report = enumerate_posterior(ProtocolParams.create(5, K, M, 1, model))

    assert report.atoms == atoms
    assert report.passed
    assert check_ws_privacy(report).worst_deviation == 0
    assert report.as_dict()['model'] == model.name


def test_model2_atom_weight():
    params = ProtocolParams.create(5, 3, 2, 1, Model.II)
    report = enumerate_posterior(params)
    assert report.atoms == 2304
    assert set(report.weight_per_pair.values()) == {2304 // 6}
    assert report.verdict == 'PASS'


def test_unshuffled_fixed_multipliers_fail():
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    report = enumerate_posterior(params, query_builder=unshuffled_fixed_multipliers)

    assert not report.passed
    verdict = check_ws_privacy(report)
    assert not verdict.passed
    assert verdict.worst_deviation > 0
    assert verdict.summary.startswith('FAIL')


def test_perturbed_count_fails(model1_report):
    counts = {key: dict(weights) for key, weights in model1_report.counts.items()}
    key = sorted(counts)[0]
    pair = next(iter(counts[key]))
    counts[key][pair] += 1

    verdict = check_ws_privacy(dataclasses.replace(model1_report, counts=counts))
    assert not verdict.passed
    assert verdict.worst_deviation > 0


def test_empty_report():
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    report = AuditReport(params, {}, prior_for(params))
    with pytest.raises(MalformedReportError):
        check_ws_privacy(report)


def test_enumeration_guard():
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    with pytest.raises(EnumerationTooLargeError):
        enumerate_posterior(params, guard=100)


def built_generator(params, seed):
    rng = random.Random(seed)
    db = Database.random(params.field, params.K, params.m, rng)
    _, state = client_build_query(sample_instance(params, db, rng), params, rng)
    return state.generator


def test_recovery_witnesses_model1():
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    for seed in range(10):
        result = audit_lemma1(built_generator(params, seed), Model.I, params)
        assert result.passed
        assert len(result.witnesses) == 6


def test_recovery_witnesses_model2():
    params = ProtocolParams.create(5, 4, 2, 1, Model.II)
    for seed in range(5):
        assert audit_lemma1(built_generator(params, seed), Model.II, params).passed


def test_recovery_witnesses_missing_for_non_mds():
    F = FieldParams(5)
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    G = GeneratorMatrix.from_values(F, [(1, 1, 1), (0, 1, 1)])

    result = audit_lemma1(G, Model.I, params)
    assert not result.passed
    assert result.missing


def test_answer_uniformity(F5):
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    query = Query((F5.vector((1, 3, 1)), F5.vector((0, 3, 2))), Model.I)
    census = answer_uniformity_census(query, params)

    assert census.distinct == 25
    assert census.expected == 5
    assert census.uniform


def test_answer_uniformity_rejects_zero_rows(F5):
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    query = Query((F5.vector((0, 0, 0)), F5.vector((0, 3, 2))), Model.I)
    with pytest.raises(InvalidQueryError):
        answer_uniformity_census(query, params)


@pytest.mark.parametrize('model, K, M, expected', [
    (Model.I, 4, 2, Fraction(1, 2)),
    (Model.II, 4, 2, Fraction(1, 3)),
    (Model.II, 4, 4, Fraction(1)),
])
def test_measured_rate_matches_capacity(model, K, M, expected):
    params = ProtocolParams.create(5, K, M, 3, model)
    assert measure_rate(params, 5, random.Random(0)) == expected
    assert capacity(model, K, M) == expected


@pytest.mark.parametrize('model, K, M, expected', [
    (Model.I, 5, 2, Fraction(1, 3)),
    (Model.I, 6, 0, Fraction(1, 6)),
    (Model.II, 5, 2, Fraction(1, 4)),
])
def test_capacity(model, K, M, expected):
    assert capacity(model, K, M) == expected


@pytest.mark.parametrize('model, K, M, expected', [
    (Model.I, 5, 2, Fraction(1, 2)),
    (Model.I, 6, 2, Fraction(1, 2)),
    (Model.II, 5, 2, Fraction(1)),
    (Model.II, 5, 3, Fraction(1, 2)),
    (Model.II, 5, 5, Fraction(1)),
])
def test_w_privacy_capacity(model, K, M, expected):
    assert w_privacy_capacity(model, K, M) == expected
    assert w_privacy_capacity(model, K, M) >= capacity(model, K, M)


def test_measure_rate_needs_a_trial():
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    with pytest.raises(InvalidArgumentError):
        measure_rate(params, 0, random.Random(0))
