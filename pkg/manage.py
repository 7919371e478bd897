#!/usr/bin/env python
# -*- coding: utf-8 -*-

from pcsi.cli import cli


if __name__ == '__main__':
    cli()
