"""Global pytest configuration."""

import pytest

from twistleaf.config import DEFAULT_SEED


@pytest.fixture(scope="class")
def seeded(request):
    """Give a test class the seed shared by sampled checks."""
    request.cls.seed = DEFAULT_SEED
