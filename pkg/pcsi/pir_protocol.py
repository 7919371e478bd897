# -*- coding: utf-8 -*-
"""
Single-server PIR with private coded side information.

The client holds Y = sum(c_i * X_i) over a secret index set S and wants X_W,
hiding both W and S. Under model I the demand is outside S; under model II
it is one of the combined messages. Both are served by a GRS generator
matrix with one planted codeword on S + {W} (model I) or S (model II).
"""

from dataclasses import dataclass
import enum
import itertools
import logging
import typing

from pcsi.exceptions import (
    DimensionError,
    FieldTooSmallError,
    InternalInvariantError,
    InvalidCoefficientError,
    InvalidIndexError,
    ModelViolationError,
)
from pcsi.finite_field import (
    FieldElement,
    FieldParams,
    Polynomial,
    Vector,
    linear_combination,
    vec_add,
    vec_scale,
    vec_sub,
    vec_zero,
)
from pcsi.grs_code import (
    CodeParams,
    GeneratorMatrix,
    build_annihilator,
    build_generator,
    derive_multipliers_model1,
    derive_multipliers_model2,
)


logger = logging.getLogger(__name__)


class Model(enum.IntEnum):
    """The value is the public indicator: 1 iff W is inside S."""

    I = 0
    II = 1

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        return cls[str(value).strip().upper()]


@dataclass(frozen=True)
class ProtocolParams:
    K: int
    M: int
    m: int
    model: Model
    code: CodeParams

    def __post_init__(self):
        if self.code.K != self.K:
            raise InvalidIndexError(f'code built for K={self.code.K}, protocol K={self.K}')
        if self.m < 1:
            raise DimensionError(f'messages need at least one symbol, got m={self.m}')

        if self.model is Model.I and not 0 <= self.M <= self.K - 1:
            raise ModelViolationError(f'model I needs 0 <= M <= K-1, got M={self.M}, K={self.K}')
        if self.model is Model.II:
            if not 2 <= self.M <= self.K:
                raise ModelViolationError(f'model II needs 2 <= M <= K, got M={self.M}, K={self.K}')
            if self.q < 3:
                raise FieldTooSmallError('model II needs q >= 3')

    @classmethod
    def create(cls, q: int, K: int, M: int, m: int = 1, model=Model.I, omegas=None) -> 'ProtocolParams':
        field = FieldParams(q)
        return cls(K, M, m, Model.parse(model), CodeParams(K, field, omegas))

    @property
    def field(self) -> FieldParams:
        return self.code.field

    @property
    def q(self) -> int:
        return self.code.field.q

    @property
    def num_rows(self) -> int:
        """R: K-M rows for model I, K-M+1 for model II."""
        return self.K - self.M + (1 if self.model is Model.II else 0)

    def valid_pairs(self) -> typing.Iterator[typing.Tuple[int, typing.Tuple[int, ...]]]:
        """Every (W, S) allowed by the model, S in lexicographic order."""

        for S in itertools.combinations(range(self.K), self.M):
            demands = S if self.model is Model.II else [i for i in range(self.K) if i not in S]
            for W in demands:
                yield W, S

    def advertisement(self) -> typing.Tuple:
        return (self.q, self.K, self.M, self.m, self.model, tuple(w.value for w in self.code.omegas))


@dataclass(frozen=True)
class Database:
    field: FieldParams
    messages: typing.Tuple[Vector, ...]

    def __post_init__(self):
        if not self.messages:
            raise DimensionError('a database needs at least one message')
        lengths = {len(message) for message in self.messages}
        if len(lengths) != 1 or 0 in lengths:
            raise DimensionError(f'messages must share one positive length, got {sorted(lengths)}')
        for message in self.messages:
            for x in message:
                if x.params != self.field:
                    raise DimensionError('message symbol from a different field')

    @classmethod
    def from_values(cls, field: FieldParams, rows) -> 'Database':
        return cls(field, tuple(field.vector(row) for row in rows))

    @classmethod
    def random(cls, field: FieldParams, K: int, m: int, rng) -> 'Database':
        """K*m i.i.d. uniform symbols, drawn message-major."""
        return cls(field, tuple(
            tuple(field.random_element(rng) for _ in range(m)) for _ in range(K)))

    @property
    def K(self) -> int:
        return len(self.messages)

    @property
    def m(self) -> int:
        return len(self.messages[0])

    def values(self) -> typing.Tuple[typing.Tuple[int, ...], ...]:
        return tuple(tuple(x.value for x in message) for message in self.messages)

    def __add__(self, other: 'Database') -> 'Database':
        if (self.K, self.m) != (other.K, other.m):
            raise DimensionError('databases of different shapes')
        return Database(self.field, tuple(vec_add(a, b) for a, b in zip(self.messages, other.messages)))

    def check(self, params: ProtocolParams):
        if self.field != params.field or self.K != params.K or self.m != params.m:
            raise DimensionError(
                f'database (q={self.field.q}, K={self.K}, m={self.m}) does not match '
                f'params (q={params.q}, K={params.K}, m={params.m})')


@dataclass(frozen=True)
class SideInformation:
    S: typing.Tuple[int, ...]
    C: typing.Mapping[int, FieldElement]
    Y: typing.Optional[Vector]
    W: int

    def __post_init__(self):
        object.__setattr__(self, 'S', tuple(sorted(self.S)))
        if len(set(self.S)) != len(self.S):
            raise InvalidIndexError(f'repeated index in S={self.S}')
        if set(self.C) != set(self.S):
            raise InvalidCoefficientError(f'coefficients given for {sorted(self.C)} but S = {self.S}')
        for index, c in self.C.items():
            if not c:
                raise InvalidCoefficientError(f'coefficient for index {index} is zero')

    @property
    def M(self) -> int:
        return len(self.S)

    @property
    def indicator(self) -> Model:
        return Model.II if self.W in self.S else Model.I

    def coefficients(self) -> typing.Tuple[FieldElement, ...]:
        return tuple(self.C[i] for i in self.S)

    def check_model(self, params: ProtocolParams):
        for index in self.S + (self.W,):
            params.code.check_index(index)
        if self.M != params.M:
            raise ModelViolationError(f'|S|={self.M} but the protocol is set up for M={params.M}')
        if params.model is Model.I and self.W in self.S:
            raise ModelViolationError(f'model I requires W not in S, got W={self.W}, S={self.S}')
        if params.model is Model.II and self.W not in self.S:
            raise ModelViolationError(f'model II requires W in S, got W={self.W}, S={self.S}')

    def check_value(self, db: Database):
        if self.Y is not None and self.Y != compute_side_info_value(self.S, self.C, db):
            raise InvalidCoefficientError('Y does not equal sum(c_i * X_i) over S')

    @classmethod
    def create(cls, db: Database, S, C, W: int) -> 'SideInformation':
        S = tuple(sorted(S))
        if not isinstance(C, typing.Mapping):
            C = dict(zip(S, C))
        C = {i: c if isinstance(c, FieldElement) else db.field(c) for i, c in C.items()}
        return cls(S, C, compute_side_info_value(S, C, db), W)


@dataclass(frozen=True)
class Query:
    rows: typing.Tuple[Vector, ...]
    model: Model

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def K(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def key(self) -> typing.Tuple:
        """Exactly what the server observes: the ordered rows and the indicator."""
        return (int(self.model),) + tuple(tuple(x.value for x in row) for row in self.rows)


@dataclass(frozen=True)
class QueryRandomness:
    """One atom of the client's randomness: free multipliers, model-II c, sigma."""

    free: typing.Tuple[FieldElement, ...]
    sigma: typing.Tuple[int, ...]
    c_star: typing.Optional[FieldElement] = None


@dataclass(frozen=True)
class ClientState:
    sigma: typing.Tuple[int, ...]
    p: Polynomial
    side_info: SideInformation
    recovery_coefficient: FieldElement
    c_star: typing.Optional[FieldElement] = None
    generator: typing.Optional[GeneratorMatrix] = None


@dataclass(frozen=True)
class Answer:
    values: typing.Tuple[Vector, ...]

    @property
    def num_rows(self) -> int:
        return len(self.values)

    @property
    def symbols(self) -> int:
        return sum(len(value) for value in self.values)


class Retrieval(typing.NamedTuple):
    recovered: Vector
    downloaded_symbols: int
    side_info: SideInformation


def compute_side_info_value(S: typing.Iterable[int],
                            C: typing.Mapping[int, FieldElement],
                            db: Database) -> Vector:
    S = tuple(S)
    for index in S:
        if not isinstance(index, int) or not 0 <= index < db.K:
            raise InvalidIndexError(f'index {index!r} outside [0, {db.K})')
    return linear_combination(
        [C[i] for i in S], [db.messages[i] for i in S], db.field, db.m)


def sample_instance(params: ProtocolParams, db: Database, rng) -> SideInformation:
    """Draws (S, C, W) from the model's PMF and computes Y from the database."""

    db.check(params)
    S = tuple(sorted(rng.sample(range(params.K), params.M)))
    C = {i: params.field.random_nonzero(rng) for i in S}
    if params.model is Model.I:
        W = rng.choice([i for i in range(params.K) if i not in S])
    else:
        W = rng.choice(S)
    return SideInformation(S, C, compute_side_info_value(S, C, db), W)


def sample_side_info(params: ProtocolParams, db: Database, W: int, rng) -> SideInformation:
    """Draws (S, C) from the model's PMF conditioned on the demand index W."""

    db.check(params)
    params.code.check_index(W)
    others = [i for i in range(params.K) if i != W]
    if params.model is Model.I:
        S = tuple(sorted(rng.sample(others, params.M)))
    else:
        S = tuple(sorted(rng.sample(others, params.M - 1) + [W]))
    C = {i: params.field.random_nonzero(rng) for i in S}
    return SideInformation(S, C, compute_side_info_value(S, C, db), W)


def _permute(rows, sigma):
    """Row i lands at position sigma[i]."""

    out = [None] * len(rows)
    for i, row in enumerate(rows):
        out[sigma[i]] = row
    return tuple(out)


def client_build_query(si: SideInformation,
                       params: ProtocolParams,
                       rng=None,
                       *,
                       randomness: typing.Optional[QueryRandomness] = None,
                       ) -> typing.Tuple[Query, ClientState]:
    """
    Steps 1 and 2: plant the codeword, build the R generator rows and send
    them in a uniformly shuffled order. Only S, C and W are read; Y is not.

    With `randomness` the rng is left untouched; otherwise draws happen in the
    order c (model II), free multipliers by ascending index, then sigma.
    """

    si.check_model(params)
    code = params.code
    R = params.num_rows

    free = randomness.free if randomness is not None else None
    if params.model is Model.I:
        p = build_annihilator(code, set(si.S) | {si.W})
        multipliers = derive_multipliers_model1(code, si.S, si.C, si.W, p, rng, free=free)
        c_star = None
        coefficient = multipliers[si.W] * p(code.omegas[si.W])
    else:
        p = build_annihilator(code, si.S)
        multipliers, c_star = derive_multipliers_model2(
            code, si.S, si.C, si.W, p, rng,
            c_star=randomness.c_star if randomness is not None else None,
            free=free)
        coefficient = c_star - si.C[si.W]

    if not coefficient:
        raise InternalInvariantError('recovery coefficient is zero')

    G = build_generator(code, multipliers, R)

    if randomness is not None:
        sigma = tuple(randomness.sigma)
        if sorted(sigma) != list(range(R)):
            raise InvalidIndexError(f'sigma={sigma} is not a permutation of range({R})')
    else:
        sigma = list(range(R))
        rng.shuffle(sigma)
        sigma = tuple(sigma)

    query = Query(_permute(G.rows, sigma), params.model)
    state = ClientState(sigma, p, si, coefficient, c_star, G)
    return query, state


def server_answer(query: Query, db: Database) -> Answer:
    """Step 3: one linear combination of the messages per received row."""

    values = []
    for row in query.rows:
        if len(row) != db.K:
            raise DimensionError(f'query row of length {len(row)} for a database of K={db.K}')
        values.append(linear_combination(row, db.messages, db.field, db.m))
    return Answer(tuple(values))


def client_recover(ans: Answer, state: ClientState, params: ProtocolParams) -> Vector:
    """
    Step 4: undo sigma, combine the answers with weights p_0..p_{R-1} and
    strip the side information; what remains is a known multiple of X_W.
    """

    R = len(state.sigma)
    if ans.num_rows != R:
        raise DimensionError(f'answer has {ans.num_rows} values, expected {R}')
    if any(len(value) != params.m for value in ans.values):
        raise DimensionError(f'answer values must have m={params.m} symbols')

    field = params.field
    unpermuted = [ans.values[state.sigma[i]] for i in range(R)]
    combo = linear_combination(
        [state.p.coefficient(i) for i in range(R)], unpermuted, field, params.m)

    Y = state.side_info.Y
    if Y is None:
        if state.side_info.M:
            raise InvalidCoefficientError('side information value Y is required for recovery')
        Y = vec_zero(field, params.m)
    if not state.recovery_coefficient:
        raise InternalInvariantError('recovery coefficient is zero')
    return vec_scale(state.recovery_coefficient.inverse(), vec_sub(combo, Y))


def retrieve_local(params: ProtocolParams, db: Database, si: SideInformation, rng) -> Retrieval:
    db.check(params)
    query, state = client_build_query(si, params, rng)
    answer = server_answer(query, db)
    recovered = client_recover(answer, state, params)
    return Retrieval(recovered, answer.symbols, si)


def run_local(params: ProtocolParams, db: Database, rng) -> Retrieval:
    """Samples (W, S, C) and runs all four steps in-process."""

    si = sample_instance(params, db, rng)
    return retrieve_local(params, db, si, rng)
