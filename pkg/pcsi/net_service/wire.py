# -*- coding: utf-8 -*-
"""
Frame layout (all integers little-endian):

    magic 'PCSI' | version 0x01 | kind u8 | payload_len u32 | payload

Field elements always travel as u16 words, which is why q < 2**16.
"""

from dataclasses import dataclass
import enum
import struct
import typing

from pcsi.exceptions import (
    BadMagicError,
    DimensionError,
    ElementOutOfRangeError,
    FramingError,
    ProtocolError,
    UnknownKindError,
)
from pcsi.finite_field import FieldParams
from pcsi.pir_protocol import Answer, Model, ProtocolParams, Query


MAGIC = b'PCSI'
VERSION = 0x01
HEADER = struct.Struct('<4sBBI')
HEADER_SIZE = HEADER.size
MAX_PAYLOAD = (1 << 31) - 1


class Kind(enum.IntEnum):
    HELLO = 0x01
    PARAMS = 0x02
    QUERY = 0x03
    ANSWER = 0x04
    ERROR = 0x7F


class ErrorCode(enum.IntEnum):
    MALFORMED = 0x01
    BAD_MAGIC = 0x02
    UNKNOWN_KIND = 0x03
    DIMENSION = 0x04
    ELEMENT_OUT_OF_RANGE = 0x05
    UNEXPECTED = 0x06
    INTERNAL = 0x07

    @property
    def label(self) -> str:
        return self.name.lower().replace('_', '-')


ERROR_CODES = {
    'malformed': ErrorCode.MALFORMED,
    'framing': ErrorCode.MALFORMED,
    'bad-magic': ErrorCode.BAD_MAGIC,
    'unknown-kind': ErrorCode.UNKNOWN_KIND,
    'element-out-of-range': ErrorCode.ELEMENT_OUT_OF_RANGE,
}


@dataclass(frozen=True)
class Frame:
    kind: int
    payload: bytes = b''


def encode_frame(kind, payload: bytes = b'') -> bytes:
    payload = bytes(payload)
    if len(payload) > MAX_PAYLOAD:
        raise FramingError(f'payload of {len(payload)} bytes is too large')
    return HEADER.pack(MAGIC, VERSION, int(kind), len(payload)) + payload


def decode_header(header: bytes) -> typing.Tuple[int, int]:
    if len(header) < HEADER_SIZE:
        raise FramingError(f'truncated header: {len(header)} of {HEADER_SIZE} bytes')
    magic, version, kind, length = HEADER.unpack(header[:HEADER_SIZE])
    if magic != MAGIC:
        raise BadMagicError(f'bad magic {magic!r}')
    if version != VERSION:
        raise ProtocolError(f'unsupported version {version}')
    if length > MAX_PAYLOAD:
        raise FramingError(f'declared payload of {length} bytes is too large')
    return kind, length


def decode_frame(data: bytes) -> Frame:
    """Decodes exactly one frame; trailing bytes are a framing error."""

    kind, length = decode_header(data)
    payload = data[HEADER_SIZE:]
    if len(payload) != length:
        raise FramingError(f'payload is {len(payload)} bytes, header says {length}')
    return Frame(kind, bytes(payload))


def read_frame(read: typing.Callable[[int], bytes]) -> typing.Optional[Frame]:
    """Reads one frame through `read(n)`; None on a clean end of stream."""

    header = read(HEADER_SIZE)
    if not header:
        return None
    if len(header) < HEADER_SIZE:
        raise FramingError(f'truncated header: {len(header)} of {HEADER_SIZE} bytes')
    try:
        kind, length = decode_header(header)
    except FramingError:
        raise
    except ProtocolError:
        # skip the declared payload so the next header lines up
        length = HEADER.unpack(header)[3]
        if 0 < length <= MAX_PAYLOAD:
            read(length)
        raise
    payload = read(length) if length else b''
    if len(payload) != length:
        raise FramingError(f'truncated payload: {len(payload)} of {length} bytes')
    return Frame(kind, payload)


def check_kind(frame: Frame) -> Kind:
    try:
        return Kind(frame.kind)
    except ValueError as exc:
        raise UnknownKindError(f'unknown frame kind 0x{frame.kind:02x}') from exc


def _words(values: typing.Iterable[int]) -> bytes:
    values = list(values)
    return struct.pack(f'<{len(values)}H', *values)


def _read_words(payload: bytes, offset: int, count: int, q: int) -> typing.Tuple[int, ...]:
    end = offset + 2 * count
    if len(payload) != end:
        raise FramingError(f'expected {end} payload bytes, got {len(payload)}')
    values = struct.unpack_from(f'<{count}H', payload, offset)
    for value in values:
        if value >= q:
            raise ElementOutOfRangeError(f'element {value} >= q={q}')
    return values


def encode_error(code: ErrorCode, message: str = '') -> bytes:
    return bytes([int(code)]) + message.encode('utf-8')


def decode_error(payload: bytes) -> typing.Tuple[int, str]:
    if not payload:
        return int(ErrorCode.MALFORMED), ''
    return payload[0], payload[1:].decode('utf-8', errors='replace')


PARAMS_HEAD = struct.Struct('<HHHHB')


def encode_params(params: ProtocolParams) -> bytes:
    return PARAMS_HEAD.pack(params.q, params.K, params.M, params.m, int(params.model)) + \
        _words(w.value for w in params.code.omegas)


def decode_params(payload: bytes) -> ProtocolParams:
    if len(payload) < PARAMS_HEAD.size:
        raise FramingError('truncated PARAMS payload')
    q, K, M, m, model = PARAMS_HEAD.unpack_from(payload)
    try:
        model = Model(model)
    except ValueError as exc:
        raise ProtocolError(f'unknown model flag {model}') from exc
    omegas = _read_words(payload, PARAMS_HEAD.size, K, q)
    return ProtocolParams.create(q, K, M, m, model, omegas)


QUERY_HEAD = struct.Struct('<BHH')
ANSWER_HEAD = struct.Struct('<HH')


def encode_query(query: Query) -> bytes:
    return QUERY_HEAD.pack(int(query.model), query.num_rows, query.K) + \
        _words(x.value for row in query.rows for x in row)


def decode_query(payload: bytes, field: FieldParams) -> Query:
    if len(payload) < QUERY_HEAD.size:
        raise FramingError('truncated QUERY payload')
    model, R, K = QUERY_HEAD.unpack_from(payload)
    try:
        model = Model(model)
    except ValueError as exc:
        raise ProtocolError(f'unknown model flag {model}') from exc
    if R == 0 or K == 0:
        raise DimensionError(f'empty query: R={R}, K={K}')

    values = _read_words(payload, QUERY_HEAD.size, R * K, field.q)
    rows = tuple(field.vector(values[i * K:(i + 1) * K]) for i in range(R))
    return Query(rows, model)


def encode_answer(answer: Answer) -> bytes:
    m = len(answer.values[0]) if answer.values else 0
    return ANSWER_HEAD.pack(answer.num_rows, m) + \
        _words(x.value for value in answer.values for x in value)


def decode_answer(payload: bytes, field: FieldParams) -> Answer:
    if len(payload) < ANSWER_HEAD.size:
        raise FramingError('truncated ANSWER payload')
    R, m = ANSWER_HEAD.unpack_from(payload)
    values = _read_words(payload, ANSWER_HEAD.size, R * m, field.q)
    return Answer(tuple(field.vector(values[i * m:(i + 1) * m]) for i in range(R)))
