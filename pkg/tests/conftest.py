import functools

import pytest

from structree import make_generator, truncate


@functools.lru_cache(maxsize=None)
def model(spec, radius=6, probe=2):
    """Shared truncations; the graphs are immutable so caching is safe."""
    return truncate(make_generator(spec), radius, probe).model


@pytest.fixture(scope="session")
def get_model():
    return model


ACCEPTANCE = {}


def record(number, passed, detail):
    """Store one acceptance line; printed in the terminal summary."""
    ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE[number])
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
