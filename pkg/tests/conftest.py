"""
Shared pytest configuration.

End-to-end training runs are marked ``slow`` and only collected as runnable
when GRL_RUN_SLOW=1.
"""

import os

import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: stochastic end-to-end training runs")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("GRL_RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set GRL_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
