# -*- coding: utf-8 -*-

from pcsi.factory import create_settings

__version__ = '1.0.0'

settings = create_settings()
