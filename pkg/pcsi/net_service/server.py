# -*- coding: utf-8 -*-

import logging
import socketserver
import typing

from pcsi.exceptions import DimensionError, FramingError, ProtocolError, report_exception
from pcsi.pir_protocol import Database, ProtocolParams, server_answer
from pcsi.net_service import wire
from pcsi.net_service.wire import ErrorCode, Kind
from pcsi.utils import parse_endpoint


logger = logging.getLogger(__name__)


class PCSIRequestHandler(socketserver.StreamRequestHandler):
    """
    One connection: HELLO -> PARAMS, then any number of QUERY -> ANSWER.
    Malformed frames get an ERROR frame and the connection stays open.
    """

    def setup(self):
        self.timeout = self.server.socket_timeout
        super().setup()
        self.greeted = False

    def handle(self):
        logger.debug('Connection opened from %s', self.client_address)
        while True:
            try:
                frame = wire.read_frame(self.rfile.read)
            except ProtocolError as exc:
                self.send_error(exc)
                if isinstance(exc, FramingError):
                    # a truncated stream cannot be resynchronised
                    break
                continue
            except OSError:
                break

            if frame is None:
                break

            try:
                self.dispatch(frame)
            except ProtocolError as exc:
                self.send_error(exc)
            except DimensionError:
                self.send(Kind.ERROR, wire.encode_error(ErrorCode.DIMENSION, ErrorCode.DIMENSION.label))
            except OSError:
                break
            except Exception as exc:  # pylint: disable=broad-except
                logger.exception(exc)
                report_exception(exc, handler='pcsi-server')
                self.send(Kind.ERROR, wire.encode_error(ErrorCode.INTERNAL, ErrorCode.INTERNAL.label))

        logger.debug('Connection closed from %s', self.client_address)

    def dispatch(self, frame: wire.Frame):
        kind = wire.check_kind(frame)

        if kind is Kind.HELLO:
            self.greeted = True
            self.send(Kind.PARAMS, self.server.params_payload)

        elif kind is Kind.QUERY:
            if not self.greeted:
                self.send(Kind.ERROR, wire.encode_error(ErrorCode.UNEXPECTED, 'hello-first'))
                return
            query = wire.decode_query(frame.payload, self.server.database.field)
            answer = server_answer(query, self.server.database)
            self.send(Kind.ANSWER, wire.encode_answer(answer))

        else:
            self.send(Kind.ERROR, wire.encode_error(ErrorCode.UNEXPECTED, kind.name.lower()))

    def send(self, kind, payload: bytes = b''):
        if kind is Kind.ERROR:
            logger.info('Sending error code %d', payload[0])
        self.wfile.write(wire.encode_frame(kind, payload))
        self.wfile.flush()

    def send_error(self, exc: ProtocolError):
        code = wire.ERROR_CODES.get(getattr(exc, 'code', 'malformed'), ErrorCode.MALFORMED)
        self.send(Kind.ERROR, wire.encode_error(code, code.label))


class PCSIServer(socketserver.ThreadingTCPServer):
    """Answers queries against one immutable database, one thread per connection."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: typing.Tuple[str, int], database: Database, params: ProtocolParams,
                 *, socket_timeout: typing.Optional[float] = None):
        database.check(params)
        self.database = database
        self.params = params
        self.params_payload = wire.encode_params(params)
        self.socket_timeout = socket_timeout
        super().__init__(address, PCSIRequestHandler)

    @property
    def endpoint(self) -> str:
        host, port = self.server_address[:2]
        return f'{host}:{port}'


def serve(db: Database, params: ProtocolParams, endpoint, *, socket_timeout=None, ready=None):
    """Runs until shutdown() is called from another thread or the process is interrupted."""

    with PCSIServer(parse_endpoint(endpoint), db, params, socket_timeout=socket_timeout) as server:
        logger.info('Serving q=%d K=%d m=%d on %s', params.q, params.K, params.m, server.endpoint)
        if ready is not None:
            ready(server)
        server.serve_forever()
