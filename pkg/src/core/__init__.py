#!/usr/bin/env python3
"""
Shared infrastructure: settings, error hierarchy, seeded parallelism and result envelopes
"""

from .config import Settings, get_settings, reload_settings
from .errors import NumericFailure, QProgError, ValidationError

__all__ = [
    'Settings',
    'get_settings',
    'reload_settings',
    'QProgError',
    'ValidationError',
    'NumericFailure',
]
