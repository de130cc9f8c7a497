import os
import sys
import time
from contextlib import contextmanager

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

# criterion number -> (label, passed, detail)
_CRITERIA: dict[int, tuple[str, bool, str]] = {}


class Criterion:
    def __init__(self) -> None:
        self.detail = ""

    @contextmanager
    def run(self, number: int, label: str):
        """Record PASS when the block completes, FAIL (and re-raise) otherwise."""
        t0 = time.perf_counter()
        try:
            yield self
        except BaseException as exc:
            _CRITERIA[number] = (label, False, f"{type(exc).__name__}: {exc}".splitlines()[0])
            raise
        ms = (time.perf_counter() - t0) * 1000
        tail = f"; {self.detail}" if self.detail else ""
        _CRITERIA[number] = (label, True, f"{ms:.0f} ms{tail}")


@pytest.fixture
def criterion() -> Criterion:
    return Criterion()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        label, ok, detail = _CRITERIA[number]
        terminalreporter.write_line(
            f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {label}  ({detail})"
        )
