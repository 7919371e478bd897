# -*- coding: utf-8 -*-
"""
Exact audits of the protocol at desk scale.

Nothing here samples: every (S, C, W) and every atom of the client's
randomness is enumerated and weighted with integers, so a passing privacy
audit means the server's posterior equals its prior identically.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import logging
import math
import typing

import numpy as np

from pcsi.exceptions import (
    EnumerationTooLargeError,
    InternalInvariantError,
    InvalidArgumentError,
    InvalidQueryError,
    MalformedReportError,
)
from pcsi.grs_code import (
    CODEWORD_BATCH_SIZE,
    CODEWORD_ENUMERATION_GUARD,
    GeneratorMatrix,
    check_codeword_guard,
    iter_codewords,
)
from pcsi.pir_protocol import (
    Database,
    Model,
    ProtocolParams,
    Query,
    QueryRandomness,
    SideInformation,
    client_build_query,
    run_local,
)


logger = logging.getLogger(__name__)

PRIVACY_ENUMERATION_GUARD = 10 ** 8

Pair = typing.Tuple[int, typing.Tuple[int, ...]]


@dataclass
class AuditReport:
    params: ProtocolParams
    counts: typing.Dict[typing.Tuple, typing.Dict[Pair, int]]
    prior: typing.Dict[Pair, Fraction]
    worst_deviation: Fraction = Fraction(0)
    worst: typing.Optional[typing.Tuple] = None
    atoms: int = 0
    weight_per_pair: typing.Dict[Pair, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst_deviation == 0

    @property
    def verdict(self) -> str:
        return 'PASS' if self.passed else 'FAIL'

    @property
    def distinct_queries(self) -> int:
        return len(self.counts)

    def as_dict(self) -> typing.Dict[str, typing.Any]:
        params = self.params
        return {
            'mode': 'privacy',
            'q': params.q,
            'K': params.K,
            'M': params.M,
            'model': params.model.name,
            'num_rows': params.num_rows,
            'atoms': self.atoms,
            'distinct_queries': self.distinct_queries,
            'prior': next(iter(self.prior.values()), Fraction(0)),
            'worst_deviation': self.worst_deviation,
            'verdict': self.verdict,
        }


@dataclass(frozen=True)
class PrivacyVerdict:
    passed: bool
    summary: str
    worst_deviation: Fraction
    offender: typing.Optional[typing.Tuple] = None


def prior_for(params: ProtocolParams) -> typing.Dict[Pair, Fraction]:
    """Uniform over the model's valid (W, S) pairs: 1/((K-M) * C(K,M)) or 1/(M * C(K,M))."""

    per_set = params.K - params.M if params.model is Model.I else params.M
    probability = Fraction(1, per_set * math.comb(params.K, params.M))
    return {pair: probability for pair in params.valid_pairs()}


def randomness_space(params: ProtocolParams) -> int:
    """Atoms per (W, S, C): free multipliers, model-II c, and sigma."""

    q = params.q
    size = (q - 1) ** (params.K - params.M) * math.factorial(params.num_rows)
    if params.model is Model.II:
        size *= q - 2
    return size


def count_atoms(params: ProtocolParams) -> int:
    pairs = sum(1 for _ in params.valid_pairs())
    return pairs * (params.q - 1) ** params.M * randomness_space(params)


def iter_randomness(params: ProtocolParams, si: SideInformation) -> typing.Iterator[QueryRandomness]:
    field_ = params.field
    nonzero = field_.nonzero()
    c_choices = (None,)
    if params.model is Model.II:
        c_choices = tuple(c for c in nonzero if c != si.C[si.W])

    for c_star in c_choices:
        for free in itertools.product(nonzero, repeat=params.K - params.M):
            for sigma in itertools.permutations(range(params.num_rows)):
                yield QueryRandomness(tuple(free), tuple(sigma), c_star)


def _worst_deviation(counts, prior):
    worst = Fraction(0)
    offender = None
    for key in sorted(counts):
        weights = counts[key]
        total = sum(weights.values())
        if total <= 0:
            continue
        for pair, probability in prior.items():
            deviation = abs(Fraction(weights.get(pair, 0), total) - probability)
            if deviation > worst:
                worst, offender = deviation, (key, pair[0], pair[1])
        for pair in weights:
            if pair not in prior and weights[pair]:
                # weight on a pair the model rules out
                deviation = Fraction(weights[pair], total)
                if deviation > worst:
                    worst, offender = deviation, (key, pair[0], pair[1])
    return worst, offender


def enumerate_posterior(params: ProtocolParams,
                        *,
                        guard: int = PRIVACY_ENUMERATION_GUARD,
                        query_builder: typing.Callable = client_build_query) -> AuditReport:
    """
    Walks every (S, C, W) valid under the model and every randomness atom,
    and tallies how often each exact query is produced by each (W, S).
    """

    atoms = count_atoms(params)
    if atoms > guard:
        raise EnumerationTooLargeError(atoms, guard, what='privacy enumeration')

    logger.info('Enumerating %d atoms for K=%d M=%d q=%d model %s',
                atoms, params.K, params.M, params.q, params.model.name)

    counts = defaultdict(Counter)
    per_pair = Counter()
    nonzero = params.field.nonzero()
    for W, S in params.valid_pairs():
        for C in itertools.product(nonzero, repeat=params.M):
            si = SideInformation(S, dict(zip(S, C)), None, W)
            for randomness in iter_randomness(params, si):
                query, _ = query_builder(si, params, randomness=randomness)
                counts[query.key()][(W, S)] += 1
                per_pair[(W, S)] += 1

    expected = (params.q - 1) ** params.M * randomness_space(params)
    for pair, weight in per_pair.items():
        if weight != expected:
            raise InternalInvariantError(f'pair {pair} carries weight {weight}, expected {expected}')

    prior = prior_for(params)
    worst, offender = _worst_deviation(counts, prior)
    return AuditReport(
        params=params,
        counts={key: dict(weights) for key, weights in counts.items()},
        prior=prior,
        worst_deviation=worst,
        worst=offender,
        atoms=sum(per_pair.values()),
        weight_per_pair=dict(per_pair),
    )


def _check_report(report: AuditReport):
    if not report.counts or not any(sum(w.values()) for w in report.counts.values()):
        raise MalformedReportError('report carries no weighted atoms')
    if not report.prior:
        raise MalformedReportError('report carries no prior')


def _describe(offender):
    key, W, S = offender
    return f'query {key[1:]} (indicator {key[0]}), W={W}, S={list(S)}'


def check_ws_privacy(report: AuditReport) -> PrivacyVerdict:
    """Posterior of (W, S) must equal the prior for every realised query."""

    _check_report(report)
    worst, offender = _worst_deviation(report.counts, report.prior)
    if worst == 0:
        return PrivacyVerdict(
            True,
            f'PASS: {report.distinct_queries} distinct queries, posterior equals prior for every (W, S)',
            worst)

    return PrivacyVerdict(
        False,
        f'FAIL: deviation {worst.numerator}/{worst.denominator} at {_describe(offender)}',
        worst,
        offender)


def check_w_privacy(report: AuditReport) -> PrivacyVerdict:
    """The weaker demand-only notion: P(W | Q) = P(W | indicator)."""

    _check_report(report)
    prior = Counter()
    for (W, _), probability in report.prior.items():
        prior[W] += probability

    marginal_counts = {}
    for key, weights in report.counts.items():
        marginal = Counter()
        for (W, _), weight in weights.items():
            marginal[W] += weight
        marginal_counts[key] = {(W, ()): weight for W, weight in marginal.items()}

    worst, offender = _worst_deviation(
        marginal_counts, {(W, ()): probability for W, probability in prior.items()})
    if worst == 0:
        return PrivacyVerdict(True, 'PASS: posterior of W equals its prior for every query', worst)
    return PrivacyVerdict(
        False,
        f'FAIL: deviation {worst.numerator}/{worst.denominator} at {_describe(offender)}',
        worst,
        offender)


@dataclass(frozen=True)
class Lemma1Result:
    passed: bool
    witnesses: typing.Dict[Pair, typing.Optional[typing.Tuple[int, ...]]]

    @property
    def missing(self) -> typing.List[Pair]:
        return [pair for pair, witness in self.witnesses.items() if witness is None]


def _pairs_for(theta: Model, K: int, M: int):
    for S in itertools.combinations(range(K), M):
        demands = S if theta is Model.II else [i for i in range(K) if i not in S]
        for W in demands:
            yield W, S


def audit_lemma1(G: GeneratorMatrix,
                 theta: Model,
                 params: ProtocolParams,
                 *,
                 guard: int = CODEWORD_ENUMERATION_GUARD,
                 batch_size: int = CODEWORD_BATCH_SIZE) -> Lemma1Result:
    """
    For every (W*, S*) with indicator theta, look for a codeword in the row
    space of G from which X_W* follows given some side information on S*
    with all-nonzero coefficients.
    """

    theta = Model.parse(theta)
    check_codeword_guard(G, guard)
    words = np.concatenate(list(iter_codewords(G, batch_size=batch_size)), axis=0)
    q, K = G.field.q, G.K

    witnesses = {}
    for W, S in _pairs_for(theta, K, params.M):
        support = set(S) | {W}
        outside = [j for j in range(K) if j not in support]
        mask = (words[:, outside] == 0).all(axis=1) if outside else np.ones(len(words), dtype=bool)

        if theta is Model.I:
            # u_j = c*_j on S*, u_W nonzero
            mask &= (words[:, sorted(support)] != 0).all(axis=1)
        else:
            # u_j = c*_j on S* minus W; need some c*_W in F_q^x different from u_W
            others = [j for j in S if j != W]
            mask &= (words[:, others] != 0).all(axis=1)
            if q == 2:
                mask &= words[:, W] == 0

        hits = np.flatnonzero(mask)
        witnesses[(W, S)] = tuple(int(x) for x in words[hits[0]]) if hits.size else None

    result = Lemma1Result(all(w is not None for w in witnesses.values()), witnesses)
    if not result.passed:
        logger.info('Recovery witnesses missing for %d pairs', len(result.missing))
    return result


@dataclass(frozen=True)
class UniformityCensus:
    counts: typing.Dict[typing.Tuple[int, ...], int]
    expected: int

    @property
    def uniform(self) -> bool:
        return all(count == self.expected for count in self.counts.values())

    @property
    def distinct(self) -> int:
        return len(self.counts)


def answer_uniformity_census(query: Query,
                             params: ProtocolParams,
                             m: int = 1,
                             *,
                             guard: int = CODEWORD_ENUMERATION_GUARD) -> UniformityCensus:
    """Histogram of answers over every database in GF(q)^(K*m)."""

    if not query.rows or any(all(not x for x in row) for row in query.rows):
        raise InvalidQueryError('query rows must be nonempty and not all-zero')
    if query.K != params.K:
        raise InvalidQueryError(f'query rows have length {query.K}, expected K={params.K}')

    q, K, R = params.q, params.K, query.num_rows
    size = q ** (K * m)
    if size > guard:
        raise EnumerationTooLargeError(size, guard, what='database enumeration')

    rows = np.array(query.key()[1:], dtype=np.int64).reshape(R, K)
    databases = np.array(list(itertools.product(range(q), repeat=K * m)), dtype=np.int64)
    databases = databases.reshape(size, K, m)
    answers = np.einsum('rk,nkm->nrm', rows, databases) % q

    counts = Counter(tuple(int(x) for x in answer.ravel()) for answer in answers)
    return UniformityCensus(dict(counts), q ** ((K - R) * m))


def measure_rate(params: ProtocolParams, trials: int, rng, db: typing.Optional[Database] = None) -> Fraction:
    """m over the mean number of downloaded symbols, as an exact fraction."""

    if trials < 1:
        raise InvalidArgumentError(f'trials must be at least 1, got {trials}')
    if db is None:
        db = Database.random(params.field, params.K, params.m, rng)

    downloaded = 0
    for _ in range(trials):
        result = run_local(params, db, rng)
        if result.recovered != db.messages[result.side_info.W]:
            raise InternalInvariantError('run_local recovered the wrong message')
        downloaded += result.downloaded_symbols
    return Fraction(params.m * trials, downloaded)


def capacity(model, K: int, M: int) -> Fraction:
    """(W,S)-private capacity: 1/(K-M) for model I; scalar-linear 1/(K-M+1) for model II."""

    model = Model.parse(model)
    return Fraction(1, K - M) if model is Model.I else Fraction(1, K - M + 1)


def w_privacy_capacity(model, K: int, M: int) -> Fraction:
    """Reference capacity when only W has to be hidden."""

    model = Model.parse(model)
    if model is Model.I:
        return Fraction(1, -(-K // (M + 1)))
    return Fraction(1) if M in (2, K) else Fraction(1, 2)
