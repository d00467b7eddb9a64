from __future__ import annotations

import functools

import pytest

from mkdvsurf import geometry as geo


@functools.lru_cache(maxsize=None)
def profile(name: str, n: int, **kw):
    return geo.preset(name, n, **kw)


@functools.lru_cache(maxsize=None)
def potential(name: str, n: int, **kw):
    return geo.potential_from_profile(profile(name, n, **kw))


@pytest.fixture(scope="session")
def clifford():
    return profile("clifford", 256)


@pytest.fixture(scope="session")
def sphere():
    return profile("sphere", 1024)


@pytest.fixture(scope="session")
def ellipse1():
    return profile("ellipse", 512, id=1)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
