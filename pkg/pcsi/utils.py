# -*- coding: utf-8 -*-

from fractions import Fraction

from pcsi.exceptions import InvalidCoefficientError, InvalidIndexError, TransportError


def parse_index_list(s):
    """'0,2,3' -> (0, 2, 3); an empty string is the empty set."""

    if s is None:
        return None
    if not s.strip():
        return ()

    try:
        indices = tuple(int(part) for part in s.split(','))
    except ValueError as exc:
        raise InvalidIndexError(f'Not a comma-separated index list: {s!r}') from exc

    if len(set(indices)) != len(indices):
        raise InvalidIndexError(f'Repeated index in {s!r}')
    return indices


def parse_residues(s, q):
    """Comma-separated nonzero residues mod q, as used for --C."""

    if s is None:
        return None
    if not s.strip():
        return ()

    try:
        values = tuple(int(part) for part in s.split(','))
    except ValueError as exc:
        raise InvalidCoefficientError(f'Not a comma-separated residue list: {s!r}') from exc

    for value in values:
        if value % q == 0:
            raise InvalidCoefficientError(f'Coefficient {value} is zero mod {q}')
    return tuple(value % q for value in values)


def parse_endpoint(endpoint):
    """'host:port' -> (host, port)"""

    if isinstance(endpoint, (tuple, list)):
        return endpoint[0], int(endpoint[1])

    host, sep, port = str(endpoint).rpartition(':')
    if not sep or not port.isdigit():
        raise TransportError(f'Endpoint must be host:port, got {endpoint!r}')
    return host or '127.0.0.1', int(port)


def format_fraction(value):
    value = Fraction(value)
    return f'{value.numerator}/{value.denominator}'
