# -*- coding: utf-8 -*-

from collections import Counter
import logging
import socket
import typing

from pcsi.exceptions import ParamsMismatchError, ProtocolError, RemoteError, TransportError
from pcsi.finite_field import Vector
from pcsi.pir_protocol import (
    Answer,
    ProtocolParams,
    Query,
    SideInformation,
    client_build_query,
    client_recover,
)
from pcsi.net_service import wire
from pcsi.net_service.wire import Kind
from pcsi.utils import parse_endpoint


logger = logging.getLogger(__name__)


class PCSIClient:
    """A connection to a PIR-PCSI server. Counts every byte and frame it moves."""

    def __init__(self, endpoint, *, timeout: typing.Optional[float] = 10.0):
        self.address = parse_endpoint(endpoint)
        self.timeout = timeout
        self.advertised: typing.Optional[ProtocolParams] = None
        self.bytes_sent = 0
        self.bytes_received = 0
        self.frames_sent = Counter()
        self._sock = None
        self._rfile = None

    def __enter__(self):
        self.connect()
        return self

    def __exit__(self, *exc_info):
        self.close()

    def connect(self):
        try:
            self._sock = socket.create_connection(self.address, timeout=self.timeout)
        except OSError as exc:
            raise TransportError(f'Unable to connect to {self.address[0]}:{self.address[1]}: {exc}') from exc
        self._rfile = self._sock.makefile('rb')

    def close(self):
        if self._rfile is not None:
            self._rfile.close()
            self._rfile = None
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def _read(self, n: int) -> bytes:
        data = self._rfile.read(n)
        self.bytes_received += len(data)
        return data

    def exchange(self, kind: Kind, payload: bytes = b'') -> wire.Frame:
        if self._sock is None:
            raise TransportError('Client is not connected')

        data = wire.encode_frame(kind, payload)
        try:
            self._sock.sendall(data)
            self.bytes_sent += len(data)
            self.frames_sent[kind] += 1
            frame = wire.read_frame(self._read)
        except OSError as exc:
            raise TransportError(f'Connection to {self.address[0]}:{self.address[1]} failed: {exc}') from exc

        if frame is None:
            raise TransportError('Server closed the connection')
        if frame.kind == Kind.ERROR:
            code, message = wire.decode_error(frame.payload)
            raise RemoteError(code, message)
        return frame

    def hello(self) -> ProtocolParams:
        frame = self.exchange(Kind.HELLO)
        if frame.kind != Kind.PARAMS:
            raise ProtocolError(f'expected PARAMS, got kind 0x{frame.kind:02x}')
        self.advertised = wire.decode_params(frame.payload)
        return self.advertised

    def query(self, query: Query) -> Answer:
        if self.advertised is None:
            self.hello()

        frame = self.exchange(Kind.QUERY, wire.encode_query(query))
        if frame.kind != Kind.ANSWER:
            raise ProtocolError(f'expected ANSWER, got kind 0x{frame.kind:02x}')
        return wire.decode_answer(frame.payload, self.advertised.field)


def check_advertisement(advertised: ProtocolParams, params: ProtocolParams):
    if advertised.advertisement() != params.advertisement():
        raise ParamsMismatchError(
            f'server advertises (q, K, M, m, model, omegas) = {advertised.advertisement()}, '
            f'local parameters are {params.advertisement()}')


def remote_retrieve(endpoint, si: SideInformation, params: ProtocolParams, rng,
                    *, client: typing.Optional[PCSIClient] = None, timeout: float = 10.0) -> Vector:
    """
    Steps 1-4 against a remote server. Nothing is sent beyond HELLO unless the
    advertised public parameters match the local ones exactly.
    """

    own_client = client is None
    if own_client:
        client = PCSIClient(endpoint, timeout=timeout)
        client.connect()

    try:
        advertised = client.advertised or client.hello()
        check_advertisement(advertised, params)

        query, state = client_build_query(si, params, rng)
        answer = client.query(query)
        return client_recover(answer, state, params)
    finally:
        if own_client:
            client.close()
