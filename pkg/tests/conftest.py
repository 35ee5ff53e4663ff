import functools
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from qcomplex.chain_model import Params, flag_face  # noqa: E402
from qcomplex.complex import build, link  # noqa: E402


@functools.lru_cache(maxsize=None)
def cached_complex(l, m, symmetrize=True):
    return build(Params(l, m, symmetrize))


@functools.lru_cache(maxsize=None)
def cached_flag_link(l, m):
    return link(cached_complex(l, m), flag_face(Params(l, m)))


@pytest.fixture
def cx():
    return cached_complex


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda k: int(k[1:])):
        ok, detail = results[key]
        terminalreporter.write_line(f"{key}: {'PASS' if ok else 'FAIL'}  {detail}")
