# -*- coding: utf-8 -*-

import os
import random
import threading

# before pcsi (and its settings) are imported
os.environ.setdefault('ENV_FOR_DYNACONF', 'testing')

import pytest

from pcsi.finite_field import FieldParams
from pcsi.net_service import PCSIServer
from pcsi.pir_protocol import Database, ProtocolParams


@pytest.fixture
def F5():
    return FieldParams(5)


@pytest.fixture
def worked_db(F5):
    """X_0=(2), X_1=(3), X_2=(4) over GF(5)."""
    return Database.from_values(F5, [(2,), (3,), (4,)])


@pytest.fixture
def rng():
    return random.Random(1234)


def start_server(db, params):
    server = PCSIServer(('127.0.0.1', 0), db, params, socket_timeout=5)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread


@pytest.fixture
def loopback():
    """Starts servers on ephemeral ports; all of them are shut down afterwards."""

    servers = []

    def _start(db, params):
        server, _ = start_server(db, params)
        servers.append(server)
        return server

    yield _start

    for server in servers:
        server.shutdown()
        server.server_close()


@pytest.fixture
def params_k3_model1():
    return ProtocolParams.create(5, 3, 1, 1, 'I')
