import sys
from pathlib import Path

import pytest

from plapeig import make_context

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

_CTX_CACHE = {}


@pytest.fixture
def ctx_for():
    """Context factory with session-wide caching (table build is cheap
    but there is no reason to repeat it per test)."""

    def get(p):
        if p not in _CTX_CACHE:
            _CTX_CACHE[p] = make_context(p)
        return _CTX_CACHE[p]

    return get


@pytest.fixture
def ctx2(ctx_for):
    return ctx_for(2.0)


@pytest.fixture
def ctx3(ctx_for):
    return ctx_for(3.0)
