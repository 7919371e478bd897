# -*- coding: utf-8 -*-
"""
Generalized Reed-Solomon generator matrices carrying one prescribed codeword,
and the MDS / minimum-weight diagnostics used to check them.
"""

from collections import Counter
from dataclasses import dataclass
import itertools
import logging
import typing

import galois
import numpy as np

from pcsi.exceptions import (
    EnumerationTooLargeError,
    FieldTooSmallError,
    InternalInvariantError,
    InvalidCoefficientError,
    InvalidFieldError,
    InvalidIndexError,
    InvalidMultiplierError,
    ModelViolationError,
)
from pcsi.finite_field import FieldElement, FieldParams, Polynomial, poly_from_roots


logger = logging.getLogger(__name__)

CODEWORD_ENUMERATION_GUARD = 10 ** 7
CODEWORD_BATCH_SIZE = 1 << 16


@dataclass(frozen=True)
class CodeParams:
    K: int
    field: FieldParams
    omegas: typing.Tuple[FieldElement, ...] = None

    def __post_init__(self):
        if self.K < 1:
            raise InvalidIndexError(f'K must be positive, got {self.K}')
        if self.field.q < self.K:
            raise InvalidFieldError(f'q={self.field.q} is smaller than K={self.K}')

        if self.omegas is None:
            # canonical evaluation points: omega_i = i (0-based), so omega_0 = 0
            object.__setattr__(self, 'omegas', tuple(self.field(i) for i in range(self.K)))
        else:
            omegas = tuple(
                omega if isinstance(omega, FieldElement) else self.field(omega)
                for omega in self.omegas)
            object.__setattr__(self, 'omegas', omegas)

        if len(self.omegas) != self.K:
            raise InvalidIndexError(f'{len(self.omegas)} evaluation points for K={self.K}')
        if any(omega.params != self.field for omega in self.omegas):
            raise InvalidFieldError('evaluation points belong to a different field')
        if len(set(self.omegas)) != self.K:
            raise InvalidIndexError('evaluation points must be pairwise distinct')

    @property
    def indices(self) -> range:
        return range(self.K)

    def check_index(self, index: int):
        if not isinstance(index, int) or not 0 <= index < self.K:
            raise InvalidIndexError(f'index {index!r} outside [0, {self.K})')


@dataclass(frozen=True)
class GeneratorMatrix:
    """R x K matrix with entry (i, j) = v_j * omega_j**i."""

    field: FieldParams
    rows: typing.Tuple[typing.Tuple[FieldElement, ...], ...]
    multipliers: typing.Tuple[FieldElement, ...] = ()

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def K(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @classmethod
    def from_values(cls, params: FieldParams, rows, multipliers=()) -> 'GeneratorMatrix':
        return cls(
            params,
            tuple(params.vector(row) for row in rows),
            params.vector(multipliers),
        )

    def values(self) -> typing.Tuple[typing.Tuple[int, ...], ...]:
        return tuple(tuple(x.value for x in row) for row in self.rows)

    def as_array(self) -> np.ndarray:
        return np.array(self.values(), dtype=np.int64).reshape(self.num_rows, self.K)


def build_annihilator(params: CodeParams, excluded: typing.Iterable[int]) -> Polynomial:
    """prod(x - omega_i) over every index i outside `excluded`."""

    excluded = set(excluded)
    for index in excluded:
        params.check_index(index)

    roots = [params.omegas[i] for i in params.indices if i not in excluded]
    return poly_from_roots(roots, params.field)


def build_generator(params: CodeParams,
                    multipliers: typing.Sequence[FieldElement],
                    num_rows: int) -> GeneratorMatrix:
    multipliers = tuple(multipliers)
    if len(multipliers) != params.K:
        raise InvalidMultiplierError(f'{len(multipliers)} multipliers for K={params.K}')
    if any(not v for v in multipliers):
        raise InvalidMultiplierError('GRS multipliers must all be nonzero')
    if not 1 <= num_rows <= params.K:
        raise InvalidIndexError(f'num_rows={num_rows} outside [1, {params.K}]')

    rows = []
    powers = tuple(params.field.one for _ in multipliers)
    for _ in range(num_rows):
        rows.append(tuple(v * power for v, power in zip(multipliers, powers)))
        powers = tuple(power * omega for power, omega in zip(powers, params.omegas))

    return GeneratorMatrix(params.field, tuple(rows), multipliers)


def _constrained(params: CodeParams, C: typing.Mapping[int, FieldElement], p: Polynomial, index: int):
    value = p(params.omegas[index])
    if not value:
        raise InternalInvariantError(f'annihilator vanishes on protected index {index}')
    return C[index] / value


def _check_coefficients(params: CodeParams, S, C):
    if set(S) != set(C):
        raise InvalidCoefficientError(f'coefficients given for {sorted(C)} but S = {sorted(S)}')
    for index in S:
        params.check_index(index)
        if C[index].params != params.field:
            raise InvalidCoefficientError(f'coefficient for index {index} is in the wrong field')
        if not C[index]:
            raise InvalidCoefficientError(f'coefficient for index {index} is zero')


def _free_multipliers(params: CodeParams, count: int, rng, free):
    if free is not None:
        free = tuple(free)
        if len(free) != count:
            raise InvalidMultiplierError(f'{len(free)} free multipliers supplied, {count} needed')
        if any(not v for v in free):
            raise InvalidMultiplierError('free multipliers must be nonzero')
        return free
    return tuple(params.field.random_nonzero(rng) for _ in range(count))


def derive_multipliers_model1(params: CodeParams,
                              S: typing.Collection[int],
                              C: typing.Mapping[int, FieldElement],
                              W: int,
                              p: Polynomial,
                              rng=None,
                              *,
                              free: typing.Optional[typing.Sequence[FieldElement]] = None,
                              ) -> typing.Tuple[FieldElement, ...]:
    """
    v_i = c_i / p(omega_i) on S; every other index (W included) takes a uniform
    element of F_q^x, drawn in ascending index order or taken from `free`.
    """

    params.check_index(W)
    if W in S:
        raise ModelViolationError(f'model I requires W not in S, got W={W}, S={sorted(S)}')
    _check_coefficients(params, S, C)

    open_indices = [i for i in params.indices if i not in S]
    drawn = dict(zip(open_indices, _free_multipliers(params, len(open_indices), rng, free)))

    return tuple(
        _constrained(params, C, p, i) if i in S else drawn[i]
        for i in params.indices
    )


def derive_multipliers_model2(params: CodeParams,
                              S: typing.Collection[int],
                              C: typing.Mapping[int, FieldElement],
                              W: int,
                              p: Polynomial,
                              rng=None,
                              *,
                              c_star: typing.Optional[FieldElement] = None,
                              free: typing.Optional[typing.Sequence[FieldElement]] = None,
                              ) -> typing.Tuple[typing.Tuple[FieldElement, ...], FieldElement]:
    """
    As model I on S minus W, but v_W = c / p(omega_W) with c uniform over
    F_q^x minus c_W. The drawn c is returned since recovery divides by c - c_W.
    """

    params.check_index(W)
    if W not in S:
        raise ModelViolationError(f'model II requires W in S, got W={W}, S={sorted(S)}')
    if len(S) < 2:
        raise ModelViolationError(f'model II requires |S| >= 2, got {len(S)}')
    if params.field.q < 3:
        raise FieldTooSmallError('model II needs q >= 3 so that F_q^x minus c_W is not empty')
    _check_coefficients(params, S, C)

    choices = tuple(c for c in params.field.nonzero() if c != C[W])
    if c_star is None:
        c_star = rng.choice(choices)
    elif c_star not in choices:
        raise InvalidCoefficientError(f'c={c_star!r} must be nonzero and differ from c_W={C[W]!r}')

    open_indices = [i for i in params.indices if i not in S]
    drawn = dict(zip(open_indices, _free_multipliers(params, len(open_indices), rng, free)))

    omega_w = p(params.omegas[W])
    if not omega_w:
        raise InternalInvariantError(f'annihilator vanishes on the demand index {W}')

    multipliers = []
    for i in params.indices:
        if i == W:
            multipliers.append(c_star / omega_w)
        elif i in S:
            multipliers.append(_constrained(params, C, p, i))
        else:
            multipliers.append(drawn[i])
    return tuple(multipliers), c_star


def _galois_field(q: int):
    return galois.GF(q)


def is_mds(G: GeneratorMatrix) -> bool:
    """True iff every R x R column submatrix of G is nonsingular."""

    R, K = G.num_rows, G.K
    if R == 0 or R > K:
        return False

    GF = _galois_field(G.field.q)
    matrix = GF(G.as_array())
    for columns in itertools.combinations(range(K), R):
        if np.linalg.matrix_rank(matrix[:, list(columns)]) < R:
            logger.debug('Singular column set %s', columns)
            return False
    return True


def iter_codewords(G: GeneratorMatrix, *, batch_size: int = CODEWORD_BATCH_SIZE) -> typing.Iterator[np.ndarray]:
    """Every codeword of the row space (zero included), in batches of rows."""

    q = G.field.q
    basis = G.as_array()
    messages = itertools.product(range(q), repeat=G.num_rows)
    while True:
        chunk = list(itertools.islice(messages, batch_size))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.int64).reshape(len(chunk), G.num_rows) @ basis % q


def check_codeword_guard(G: GeneratorMatrix, guard: int = CODEWORD_ENUMERATION_GUARD):
    size = G.field.q ** G.num_rows
    if size > guard:
        raise EnumerationTooLargeError(size, guard, what='codeword enumeration')
    return size


@dataclass(frozen=True)
class SupportCensus:
    min_weight: int
    counts: typing.Dict[typing.Tuple[int, ...], int]

    @property
    def uniform(self) -> bool:
        return len(set(self.counts.values())) <= 1

    @property
    def supports(self) -> int:
        return len(self.counts)


def min_weight_support_census(G: GeneratorMatrix,
                              *,
                              guard: int = CODEWORD_ENUMERATION_GUARD,
                              batch_size: int = CODEWORD_BATCH_SIZE) -> SupportCensus:
    """Number of minimum-weight codewords on each support set."""

    check_codeword_guard(G, guard)

    min_weight = None
    counts = Counter()
    for words in iter_codewords(G, batch_size=batch_size):
        nonzero = words != 0
        weights = nonzero.sum(axis=1)
        positive = weights[weights > 0]
        if not positive.size:
            continue

        batch_min = int(positive.min())
        if min_weight is None or batch_min < min_weight:
            min_weight = batch_min
            counts = Counter()
        if batch_min > min_weight:
            continue

        for row in nonzero[weights == min_weight]:
            counts[tuple(int(j) for j in np.flatnonzero(row))] += 1

    return SupportCensus(min_weight or 0, dict(counts))
