import pytest

from hyperell.engine import Engine


@pytest.fixture(scope="session")
def engine(tmp_path_factory):
    # one engine for the whole run; the genus-1 table is built on first use
    return Engine(cache_dir=tmp_path_factory.mktemp("hyperell-cache"))


@pytest.fixture(scope="session")
def fresh_engine():
    """Recursion only, no cache; fine for anything that avoids genus-1 lookups."""
    return Engine()
