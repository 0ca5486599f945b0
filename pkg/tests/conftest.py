"""
Shared pytest fixtures
"""

import pytest

from loopk.config import get_settings


@pytest.fixture(autouse=True)
def fresh_settings():
    """Every test reads LOOPK_* from its own environment"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
