# -*- coding: utf-8 -*-

from collections import Counter
import dataclasses
import itertools
import random

import pytest
from scipy import stats

from pcsi.exceptions import (
    DimensionError,
    FieldTooSmallError,
    InvalidCoefficientError,
    InvalidIndexError,
    ModelViolationError,
)
from pcsi.finite_field import FieldParams, next_prime, vec_add
from pcsi.pir_protocol import (
    Answer,
    Database,
    Model,
    ProtocolParams,
    QueryRandomness,
    SideInformation,
    client_build_query,
    client_recover,
    compute_side_info_value,
    run_local,
    sample_instance,
    sample_side_info,
    server_answer,
)


def model1_trace(F5, worked_db):
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    si = SideInformation.create(worked_db, (1,), {1: 2}, 0)
    randomness = QueryRandomness(F5.vector((1, 1)), (0, 1))
    return params, si, client_build_query(si, params, randomness=randomness)


def model2_trace(F5, worked_db):
    params = ProtocolParams.create(5, 3, 2, 1, Model.II)
    si = SideInformation.create(worked_db, (0, 1), {0: 1, 1: 1}, 0)
    randomness = QueryRandomness(F5.vector((1,)), (0, 1), F5(2))
    return params, si, client_build_query(si, params, randomness=randomness)


def test_model1_worked_trace(F5, worked_db):
    params, si, (query, state) = model1_trace(F5, worked_db)

    assert query.key() == (0, (1, 3, 1), (0, 3, 2))
    assert state.p.values() == (3, 1)
    assert state.recovery_coefficient == F5(3)

    answer = server_answer(query, worked_db)
    assert answer.values == (F5.vector((0,)), F5.vector((2,)))
    assert client_recover(answer, state, params) == F5.vector((2,))


def test_model2_worked_trace(F5, worked_db):
    params, si, (query, state) = model2_trace(F5, worked_db)

    assert query.key() == (1, (4, 4, 1), (0, 4, 2))
    assert si.Y == F5.vector((0,))
    assert state.c_star == F5(2)
    assert state.recovery_coefficient == F5(1)

    answer = server_answer(query, worked_db)
    assert client_recover(answer, state, params) == worked_db.messages[0]


def test_swapped_rows_still_recover(F5, worked_db):
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    si = SideInformation.create(worked_db, (1,), {1: 2}, 0)
    query, state = client_build_query(si, params, randomness=QueryRandomness(F5.vector((1, 1)), (1, 0)))

    assert query.key() == (0, (0, 3, 2), (1, 3, 1))
    answer = server_answer(query, worked_db)
    assert client_recover(answer, state, params) == F5.vector((2,))


def test_server_answer_dot_products(F5, worked_db):
    params, _, (query, _) = model1_trace(F5, worked_db)
    zero = Database.from_values(F5, [(0,), (0,), (0,)])
    assert server_answer(query, zero).values == (F5.vector((0,)), F5.vector((0,)))


def test_server_answer_dimension_mismatch(F5, worked_db):
    _, _, (query, _) = model1_trace(F5, worked_db)
    db = Database.from_values(F5, [(1,), (2,), (3,), (4,)])
    with pytest.raises(DimensionError):
        server_answer(query, db)


def test_client_recover_wrong_answer_length(F5, worked_db):
    params, _, (query, state) = model1_trace(F5, worked_db)
    with pytest.raises(DimensionError):
        client_recover(Answer((F5.vector((1,)),)), state, params)


@pytest.mark.parametrize('m, X, C, expected', [
    (1, [(2,), (3,)], {0: 1, 1: 1}, (0,)),
    (2, [(1, 2), (3, 0)], {0: 2, 1: 4}, (4, 4)),
])
def test_compute_side_info_value(F5, m, X, C, expected):
    db = Database.from_values(F5, X)
    C = {i: F5(c) for i, c in C.items()}
    assert compute_side_info_value((0, 1), C, db) == F5.vector(expected)


def test_compute_side_info_value_empty_and_bad_index(F5, worked_db):
    assert compute_side_info_value((), {}, worked_db) == F5.vector((0,))
    with pytest.raises(InvalidIndexError):
        compute_side_info_value((3,), {3: F5(1)}, worked_db)


def test_model_violations(worked_db):
    model1 = ProtocolParams.create(5, 3, 1, 1, Model.I)
    model2 = ProtocolParams.create(5, 3, 2, 1, Model.II)

    with pytest.raises(ModelViolationError):
        client_build_query(SideInformation.create(worked_db, (1,), {1: 2}, 1), model1, random.Random(0))
    with pytest.raises(ModelViolationError):
        client_build_query(SideInformation.create(worked_db, (1, 2), {1: 1, 2: 1}, 0), model2, random.Random(0))
    with pytest.raises(ModelViolationError):
        ProtocolParams.create(5, 3, 3, 1, Model.I)
    with pytest.raises(ModelViolationError):
        ProtocolParams.create(5, 3, 1, 1, Model.II)
    with pytest.raises(FieldTooSmallError):
        ProtocolParams.create(2, 2, 2, 1, Model.II)


def test_side_information_rejects_zero_coefficient(worked_db):
    with pytest.raises(InvalidCoefficientError):
        SideInformation.create(worked_db, (1,), {1: 0}, 0)


def all_side_info(params, db):
    nonzero = params.field.nonzero()
    for W, S in params.valid_pairs():
        for C in itertools.product(nonzero, repeat=params.M):
            yield SideInformation.create(db, S, dict(zip(S, C)), W)


@pytest.mark.slow
@pytest.mark.parametrize('model', [Model.I, Model.II])
@pytest.mark.parametrize('K', [2, 3, 4])
def test_recoverability_exhaustive(model, K):
    F = FieldParams(5)
    Ms = range(0, K) if model is Model.I else range(2, K + 1)

    for M in Ms:
        params = ProtocolParams.create(5, K, M, 1, model)
        db = Database.random(F, K, 1, random.Random(K * 10 + M))
        for si in all_side_info(params, db):
            for seed in range(8):
                query, state = client_build_query(si, params, random.Random(seed))
                answer = server_answer(query, db)
                assert client_recover(answer, state, params) == db.messages[si.W]


def test_recover_requires_side_info_value(F5, worked_db):
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    si = SideInformation((1,), {1: F5(2)}, None, 0)
    query, state = client_build_query(si, params, random.Random(0))
    answer = server_answer(query, worked_db)

    with pytest.raises(InvalidCoefficientError):
        client_recover(answer, state, params)


def test_recover_without_side_info_value_when_m_is_zero(F5, worked_db):
    params = ProtocolParams.create(5, 3, 0, 1, Model.I)
    si = SideInformation((), {}, None, 1)
    query, state = client_build_query(si, params, random.Random(0))
    answer = server_answer(query, worked_db)

    assert client_recover(answer, state, params) == worked_db.messages[1]


def sweep():
    for K in range(2, 9):
        q = next_prime(max(K, 3))
        for model in Model:
            Ms = range(0, K) if model is Model.I else range(2, K + 1)
            for M in Ms:
                for m in (1, 3):
                    yield q, K, M, m, model


@pytest.mark.parametrize('q, K, M, m, model', list(sweep()))
def test_download_cost(q, K, M, m, model):
    params = ProtocolParams.create(q, K, M, m, model)
    rng = random.Random(q + K + M + m)
    db = Database.random(params.field, K, m, rng)

    expected_rows = K - M if model is Model.I else K - M + 1
    for _ in range(3):
        result = run_local(params, db, rng)
        assert result.recovered == db.messages[result.side_info.W]
        assert result.downloaded_symbols == expected_rows * m


@pytest.mark.parametrize('model, expected', [(Model.I, 6), (Model.II, 9)])
def test_download_cost_examples(model, expected):
    params = ProtocolParams.create(5, 4, 2, 3, model)
    db = Database.random(params.field, 4, 3, random.Random(0))
    assert run_local(params, db, random.Random(1)).downloaded_symbols == expected


def test_model2_full_side_information_has_rate_one():
    params = ProtocolParams.create(7, 4, 4, 2, Model.II)
    db = Database.random(params.field, 4, 2, random.Random(0))
    result = run_local(params, db, random.Random(2))
    assert result.downloaded_symbols == 2
    assert result.recovered == db.messages[result.side_info.W]


def test_query_does_not_depend_on_side_info_value(F5, worked_db):
    params = ProtocolParams.create(5, 3, 1, 1, Model.I)
    si = SideInformation.create(worked_db, (1,), {1: 2}, 0)
    blind = dataclasses.replace(si, Y=None)

    for seed in range(20):
        query, _ = client_build_query(si, params, random.Random(seed))
        blind_query, _ = client_build_query(blind, params, random.Random(seed))
        assert query == blind_query


def test_server_answer_is_linear():
    F = FieldParams(7)
    rng = random.Random(5)
    params = ProtocolParams.create(7, 5, 2, 2, Model.I)
    db1 = Database.random(F, 5, 2, rng)
    db2 = Database.random(F, 5, 2, rng)
    query, _ = client_build_query(sample_instance(params, db1, rng), params, rng)

    combined = server_answer(query, db1 + db2).values
    separate = zip(server_answer(query, db1).values, server_answer(query, db2).values)
    assert combined == tuple(vec_add(a, b) for a, b in separate)


@pytest.mark.slow
@pytest.mark.parametrize('model', [Model.I, Model.II])
def test_sample_instance_follows_pmf(model):
    params = ProtocolParams.create(5, 4, 2, 1, model)
    rng = random.Random(99)
    db = Database.random(params.field, 4, 1, rng)

    draws = 20000
    sets = Counter()
    demands = Counter()
    for _ in range(draws):
        si = sample_instance(params, db, rng)
        sets[si.S] += 1
        demands[si.W] += 1
        assert si.indicator is model
        assert si.Y == compute_side_info_value(si.S, si.C, db)

    assert len(sets) == 6
    assert stats.chisquare(list(sets.values())).pvalue > 0.001
    # every index is equally likely to be the demand under both models
    assert len(demands) == 4
    assert stats.chisquare(list(demands.values())).pvalue > 0.001


def test_sample_side_info_respects_demand():
    rng = random.Random(4)
    for model, M in ((Model.I, 2), (Model.II, 2)):
        params = ProtocolParams.create(5, 4, M, 1, model)
        db = Database.random(params.field, 4, 1, rng)
        for W in range(4):
            si = sample_side_info(params, db, W, rng)
            si.check_model(params)
            assert si.W == W and si.M == M
