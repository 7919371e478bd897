# -*- coding: utf-8 -*-

import logging
import os
import time

from dynaconf import Dynaconf

from pcsi.exceptions import setup_sentry
from pcsi.lib.logging import setup_logging
from pcsi.net_service.server import PCSIServer
from pcsi.utils import parse_endpoint


ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def create_settings(**kwargs):
    options = {
        'envvar_prefix': 'PCSI',
        'settings_files': [os.path.join(ROOT, 'settings.toml')],
        'environments': True,
    }
    options.update(kwargs)
    return Dynaconf(**options)


def init_observability(settings, log_level=None):
    logs = setup_logging('pcsi', log_level if log_level is not None else settings.get('LOG_LEVEL'))

    if settings.current_env.lower() not in ('development', 'testing'):
        setup_sentry(
            settings.get('SENTRY_DSN'),
            environment=settings.current_env,
        )

    logging.getLogger('sentry').setLevel(settings.get('SENTRY_LOG_LEVEL', logging.CRITICAL))
    return logs


def create_server(db, params, endpoint=None, *, settings=None):
    """Binds a PCSIServer, retrying a few times while the port is still held."""

    if settings is None:
        from pcsi import settings

    endpoint = endpoint or settings.get('LISTEN', '127.0.0.1:7878')
    retries = int(settings.get('BIND_RETRIES', 5))
    delay = float(settings.get('BIND_RETRY_DELAY', 2))
    timeout = settings.get('SOCKET_TIMEOUT')

    tries = 0
    while True:
        tries += 1
        try:
            return PCSIServer(
                parse_endpoint(endpoint), db, params,
                socket_timeout=float(timeout) if timeout else None)
        except OSError as exc:
            logging.getLogger(__name__).warning('Bind to %s failed: %s', endpoint, exc)

            if tries >= retries:
                logging.critical('Number of allowed bind retries has been exceeded.')
                raise exc

            time.sleep(delay)  # the previous listener may still hold the port
