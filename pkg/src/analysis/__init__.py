"""Property suites and CSV parameter sweeps"""
