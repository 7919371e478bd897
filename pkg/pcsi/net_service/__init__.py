# -*- coding: utf-8 -*-

from pcsi.net_service.wire import (
    Frame,
    Kind,
    ErrorCode,
    decode_frame,
    encode_frame,
)
from pcsi.net_service.server import PCSIServer, serve
from pcsi.net_service.client import PCSIClient, remote_retrieve
