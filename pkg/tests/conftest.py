import functools

import pytest

from latsieve.catalog_io import build_group, builtin_corpus
from latsieve.lattice_core import build_lattice


@functools.lru_cache(maxsize=None)
def group(gid):
    return build_group(gid)


@functools.lru_cache(maxsize=None)
def lattice(gid):
    return build_lattice(group(gid))


@pytest.fixture(scope="session")
def corpus():
    return builtin_corpus()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
