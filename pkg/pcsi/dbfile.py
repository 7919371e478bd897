# -*- coding: utf-8 -*-
"""
On-disk database: magic 'PCSIDB', version u8, q u16, K u16, m u16, then
K*m u16 element words, message-major, all little-endian.
"""

import struct

from pcsi.exceptions import DatabaseFileError, PCSIError
from pcsi.finite_field import FieldParams
from pcsi.pir_protocol import Database


MAGIC = b'PCSIDB'
VERSION = 0x01
HEADER = struct.Struct('<6sBHHH')


def encode_database(db: Database) -> bytes:
    values = [x for message in db.values() for x in message]
    return HEADER.pack(MAGIC, VERSION, db.field.q, db.K, db.m) + \
        struct.pack(f'<{len(values)}H', *values)


def decode_database(data: bytes) -> Database:
    if len(data) < HEADER.size:
        raise DatabaseFileError(f'file too short for a header: {len(data)} bytes')

    magic, version, q, K, m = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DatabaseFileError(f'bad magic {magic!r}')
    if version != VERSION:
        raise DatabaseFileError(f'unsupported version {version}')

    expected = HEADER.size + 2 * K * m
    if len(data) != expected:
        raise DatabaseFileError(f'file is {len(data)} bytes, expected {expected}')

    try:
        field = FieldParams(q)
    except PCSIError as exc:
        raise DatabaseFileError(f'invalid modulus in header: {exc}') from exc

    values = struct.unpack_from(f'<{K * m}H', data, HEADER.size)
    if any(value >= q for value in values):
        raise DatabaseFileError(f'element word out of range for q={q}')

    try:
        return Database.from_values(field, [values[i * m:(i + 1) * m] for i in range(K)])
    except PCSIError as exc:
        raise DatabaseFileError(str(exc)) from exc


def write_database(path, db: Database):
    with open(path, 'wb') as dbfile:
        dbfile.write(encode_database(db))


def read_database(path) -> Database:
    try:
        with open(path, 'rb') as dbfile:
            data = dbfile.read()
    except OSError as exc:
        raise DatabaseFileError(f'Unable to read {path}: {exc}') from exc
    return decode_database(data)


def generate_database(q: int, K: int, m: int, rng) -> Database:
    field = FieldParams(q)
    if q < K:
        raise DatabaseFileError(f'q={q} must be at least K={K}')
    return Database.random(field, K, m, rng)
