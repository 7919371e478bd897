# -*- coding: utf-8 -*-

import enum
import json
from fractions import Fraction


class ExtendedEncoder(json.JSONEncoder):
    """Encoder that supports various additional types that we care about."""

    def default(self, obj):
        if isinstance(obj, Fraction):
            return f'{obj.numerator}/{obj.denominator}'
        if isinstance(obj, enum.Enum):
            return obj.name
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        if hasattr(obj, 'value') and hasattr(obj, 'params'):
            # FieldElement
            return obj.value
        if isinstance(obj, Exception):
            return str(obj)

        return json.JSONEncoder.default(self, obj)


def _enum_names(obj):
    # IntEnum members are ints, so they never reach ExtendedEncoder.default
    if isinstance(obj, enum.Enum):
        return obj.name
    if isinstance(obj, dict):
        return {key: _enum_names(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_enum_names(value) for value in obj]
    return obj


def dumps(obj):
    return json.dumps(_enum_names(obj), cls=ExtendedEncoder, sort_keys=True, separators=(',', ':'))
