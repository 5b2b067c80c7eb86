#!/usr/bin/env python3
"""
qprog-cost: program-cost bounds and simulators for programmable quantum processors
"""

__version__ = "0.3.0"
