# -*- coding: utf-8 -*-

import logging
import os
import sys


FORMAT = '%(asctime)s %(name)s %(levelname)s %(message)s'


def setup_logging(name, level=None):
    logs = logging.getLogger(name)

    # Repeated calls (one per cli invocation in tests) must not stack handlers
    stream_handler = next(
        (handler for handler in logs.handlers if getattr(handler, '_pcsi', False)), None)
    if stream_handler is None:
        stream_handler = logging.StreamHandler()
        stream_handler._pcsi = True
        stream_handler.setFormatter(logging.Formatter(FORMAT))
        logs.addHandler(stream_handler)
    else:
        stream_handler.setStream(sys.stderr)

    if isinstance(level, str):
        level = logging.getLevelName(level.upper())

    if os.environ.get('DEBUG', None):
        level = logging.DEBUG
    elif level is None:
        level = logging.WARN

    stream_handler.setLevel(level)
    logs.setLevel(level)
    return logs
