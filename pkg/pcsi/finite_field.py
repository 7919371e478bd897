# -*- coding: utf-8 -*-
"""
Exact arithmetic in the prime field GF(q), plus the handful of polynomial and
vector helpers the protocol needs.

Messages over the extension field F_{q^m} are stored as length-m tuples of base
field elements. Every protocol coefficient lives in GF(q), so extension-field
multiplication never comes up.
"""

from dataclasses import dataclass
import functools
import typing

from pcsi.exceptions import (
    FieldDivisionByZeroError,
    InvalidFieldError,
    ParameterMismatchError,
)


MAX_MODULUS = 2 ** 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2

    divisor = 3
    while divisor * divisor <= n:
        if n % divisor == 0:
            return False
        divisor += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""

    n = max(n, 2)
    while not is_prime(n):
        n += 1
    return n


@dataclass(frozen=True)
class FieldParams:
    q: int

    def __post_init__(self):
        if not isinstance(self.q, int) or isinstance(self.q, bool):
            raise InvalidFieldError(f'Field modulus must be an integer, got {self.q!r}')
        if not 2 <= self.q < MAX_MODULUS:
            raise InvalidFieldError(f'Field modulus {self.q} outside [2, {MAX_MODULUS})')
        if not is_prime(self.q):
            raise InvalidFieldError(f'Field modulus {self.q} is not prime')

    def __call__(self, value: int) -> 'FieldElement':
        return FieldElement(value % self.q, self)

    @property
    def zero(self) -> 'FieldElement':
        return FieldElement(0, self)

    @property
    def one(self) -> 'FieldElement':
        return FieldElement(1, self)

    def elements(self) -> typing.Iterator['FieldElement']:
        return (FieldElement(value, self) for value in range(self.q))

    def nonzero(self) -> typing.Tuple['FieldElement', ...]:
        """F_q^x in ascending order."""
        return tuple(FieldElement(value, self) for value in range(1, self.q))

    def vector(self, values: typing.Iterable[int]) -> typing.Tuple['FieldElement', ...]:
        return tuple(self(value) for value in values)

    def random_element(self, rng) -> 'FieldElement':
        return FieldElement(rng.randrange(self.q), self)

    def random_nonzero(self, rng) -> 'FieldElement':
        return FieldElement(rng.randrange(1, self.q), self)


@dataclass(frozen=True)
class FieldElement:
    value: int
    params: FieldParams

    def __post_init__(self):
        if not 0 <= self.value < self.params.q:
            raise InvalidFieldError(f'{self.value} is not a residue mod {self.params.q}')

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.params != self.params:
            raise ParameterMismatchError(
                f'GF({self.params.q}) element combined with GF({other.params.q}) element')
        return other

    def __add__(self, other):
        return ff_add(self, other)

    def __sub__(self, other):
        return ff_sub(self, other)

    def __neg__(self):
        return FieldElement((-self.value) % self.params.q, self.params)

    def __mul__(self, other):
        return ff_mul(self, other)

    def __truediv__(self, other):
        return ff_mul(self, ff_inv(other))

    def __pow__(self, exponent: int):
        if exponent < 0:
            return ff_inv(self) ** (-exponent)
        return FieldElement(pow(self.value, exponent, self.params.q), self.params)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f'GF{self.params.q}({self.value})'

    def inverse(self):
        return ff_inv(self)


def ff_add(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement((a.value + b.value) % a.params.q, a.params)


def ff_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement((a.value - b.value) % a.params.q, a.params)


def ff_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    a._check(b)
    return FieldElement((a.value * b.value) % a.params.q, a.params)


def ff_inv(a: FieldElement) -> FieldElement:
    if a.value == 0:
        raise FieldDivisionByZeroError(f'0 has no inverse in GF({a.params.q})')
    return FieldElement(_inverse_mod(a.value, a.params.q), a.params)


@functools.lru_cache(maxsize=None)
def _inverse_mod(value, q):
    # Fermat: a^(q-2) = a^-1 for prime q
    return pow(value, q - 2, q)


def _common_params(elements) -> typing.Optional[FieldParams]:
    params = None
    for element in elements:
        if params is None:
            params = element.params
        elif element.params != params:
            raise ParameterMismatchError(
                f'GF({params.q}) element combined with GF({element.params.q}) element')
    return params


@dataclass(frozen=True)
class Polynomial:
    """p(x) = sum(coeffs[i] * x**i); trailing zeros are trimmed, zero is ()."""

    coeffs: typing.Tuple[FieldElement, ...]
    params: FieldParams

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        _common_params(coeffs + (self.params.zero,))
        while coeffs and not coeffs[-1]:
            coeffs = coeffs[:-1]
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def from_values(cls, params: FieldParams, values: typing.Iterable[int]) -> 'Polynomial':
        return cls(params.vector(values), params)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1].value == 1

    def coefficient(self, i: int) -> FieldElement:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.params.zero

    def values(self) -> typing.Tuple[int, ...]:
        return tuple(c.value for c in self.coeffs)

    def __call__(self, x: FieldElement) -> FieldElement:
        return poly_eval(self, x)

    def __mul__(self, other: 'Polynomial') -> 'Polynomial':
        return poly_mul(self, other)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.params != b.params:
        raise ParameterMismatchError(f'GF({a.params.q}) polynomial times GF({b.params.q}) polynomial')
    if not a.coeffs or not b.coeffs:
        return Polynomial((), a.params)

    out = [a.params.zero] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, ai in enumerate(a.coeffs):
        for j, bj in enumerate(b.coeffs):
            out[i + j] = out[i + j] + ai * bj
    return Polynomial(tuple(out), a.params)


def poly_from_roots(roots: typing.Sequence[FieldElement],
                    params: typing.Optional[FieldParams] = None) -> Polynomial:
    """Monic prod(x - r); the empty product is the constant 1."""

    roots = tuple(roots)
    found = _common_params(roots)
    if params is None:
        if found is None:
            raise InvalidFieldError('poly_from_roots needs params when the root list is empty')
        params = found
    elif found is not None and found != params:
        raise ParameterMismatchError(f'roots in GF({found.q}) for a GF({params.q}) polynomial')

    result = Polynomial((params.one,), params)
    for root in roots:
        result = poly_mul(result, Polynomial((-root, params.one), params))
    return result


def poly_eval(p: Polynomial, x: FieldElement) -> FieldElement:
    if x.params != p.params:
        raise ParameterMismatchError(f'GF({x.params.q}) point for a GF({p.params.q}) polynomial')

    acc = p.params.zero
    for coeff in reversed(p.coeffs):
        acc = acc * x + coeff
    return acc


Vector = typing.Tuple[FieldElement, ...]


def vec_zero(params: FieldParams, length: int) -> Vector:
    return (params.zero,) * length


def vec_add(a: Vector, b: Vector) -> Vector:
    if len(a) != len(b):
        raise ParameterMismatchError(f'vector lengths differ: {len(a)} != {len(b)}')
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vector, b: Vector) -> Vector:
    if len(a) != len(b):
        raise ParameterMismatchError(f'vector lengths differ: {len(a)} != {len(b)}')
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c: FieldElement, a: Vector) -> Vector:
    return tuple(c * x for x in a)


def linear_combination(coeffs: typing.Sequence[FieldElement],
                       vectors: typing.Sequence[Vector],
                       params: FieldParams,
                       length: int) -> Vector:
    """sum(coeffs[j] * vectors[j]) coordinatewise."""

    if len(coeffs) != len(vectors):
        raise ParameterMismatchError(f'{len(coeffs)} coefficients for {len(vectors)} vectors')

    _common_params(tuple(coeffs) + (params.zero,))
    q = params.q
    acc = [0] * length
    for coeff, vector in zip(coeffs, vectors):
        if not coeff:
            continue
        for t, x in enumerate(vector):
            acc[t] = (acc[t] + coeff.value * x.value) % q
    return tuple(FieldElement(value, params) for value in acc)
