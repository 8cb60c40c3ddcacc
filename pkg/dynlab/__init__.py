#!/usr/bin/env python
# encoding: utf8

from .program import *


__version__ = (0, 3, 0)


def get_version():
    return ".".join(map(str, __version__))
