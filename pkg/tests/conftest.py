"""Shared fixtures for the toolkit tests."""

import numpy as np
import pytest

from core.settings_manager import SettingsManager


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def settings():
    manager = SettingsManager(":memory:")
    yield manager
    manager.close()
