# -*- coding: utf-8 -*-

import logging
import os

import sentry_sdk
from sentry_sdk.integrations.logging import LoggingIntegration


class PCSIError(Exception):
    """Base class for every error raised by the pcsi package."""


class FieldError(PCSIError):
    pass


class ParameterMismatchError(FieldError):
    """Arithmetic was attempted between elements of different fields."""


class FieldDivisionByZeroError(FieldError, ZeroDivisionError):
    pass


class InvalidFieldError(FieldError):
    """The modulus is not a prime in the supported range."""


class InvalidIndexError(PCSIError):
    pass


class InvalidMultiplierError(PCSIError):
    pass


class InvalidCoefficientError(PCSIError):
    pass


class ModelViolationError(PCSIError):
    """The demand index sits on the wrong side of the side-information set."""


class FieldTooSmallError(PCSIError):
    pass


class DimensionError(PCSIError):
    pass


class InvalidQueryError(PCSIError):
    pass


class InvalidArgumentError(PCSIError, ValueError):
    pass


class EnumerationTooLargeError(PCSIError):

    def __init__(self, atoms, guard, what='enumeration'):
        self.atoms = atoms
        self.guard = guard
        super().__init__(f'{what} too large: {atoms} atoms exceeds the guard of {guard}')


class InternalInvariantError(PCSIError):
    """Something that the construction guarantees did not hold."""


class MalformedReportError(PCSIError):
    pass


class DatabaseFileError(PCSIError):
    pass


class ProtocolError(PCSIError):
    """A frame or payload on the wire does not follow the format."""

    code = 'malformed'


class BadMagicError(ProtocolError):
    code = 'bad-magic'


class FramingError(ProtocolError):
    code = 'framing'


class UnknownKindError(ProtocolError):
    code = 'unknown-kind'


class ElementOutOfRangeError(ProtocolError):
    code = 'element-out-of-range'


class RemoteError(ProtocolError):
    """The peer answered with an ERROR frame."""

    def __init__(self, code, message=''):
        self.code = code
        super().__init__(f'remote error {code}: {message}' if message else f'remote error {code}')


class TransportError(PCSIError):
    pass


class ParamsMismatchError(PCSIError):
    """The server advertised public parameters that differ from the local ones."""


def setup_sentry(dsn=None, **kwargs):

    if dsn:
        kwargs['dsn'] = dsn
    if 'dsn' not in kwargs or not kwargs['dsn']:
        kwargs['dsn'] = os.environ.get('SENTRY_DSN', os.environ.get('PCSI_SENTRY_DSN'))

    if 'traces_sample_rate' not in kwargs:
        # 0 = no sampling, 1 = 100% sampling
        kwargs['traces_sample_rate'] = 0.1

    if 'integrations' not in kwargs or not kwargs['integrations']:
        kwargs['integrations'] = []
    elif not isinstance(kwargs['integrations'], list):
        kwargs['integrations'] = [kwargs['integrations']]

    if not any(isinstance(integration, LoggingIntegration) for integration in kwargs['integrations']):
        kwargs['integrations'].append(
            LoggingIntegration(level=logging.INFO, event_level=logging.ERROR))

    if kwargs['dsn']:
        sentry_sdk.init(**kwargs)
        return True

    logging.warning("Cannot setup Sentry. No DSN found")
    return False


def report_exception(exc, **tags):
    "Reports an exception to sentry with the given tags, without swallowing it."

    sentry_sdk.capture_exception(exc, tags=tags)
