"""Shared test configuration.

Hypothesis runs derandomized so a red test reproduces from the same command
line; the deadline is disabled because several properties evaluate maps on
numpy grids and the first call pays the allocation cost.
"""

from hypothesis import settings

settings.register_profile("suite", max_examples=100, deadline=None, derandomize=True)
settings.load_profile("suite")
