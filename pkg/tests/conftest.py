from __future__ import annotations

from contextlib import contextmanager

import pytest


@pytest.fixture
def announce(capfd):
    """Context manager that prints one PASS/FAIL line per acceptance check,
    bypassing capture so the verdicts always reach the terminal."""

    @contextmanager
    def _run(number: int, description: str):
        try:
            yield
        except BaseException:
            with capfd.disabled():
                print(f"[ACCEPTANCE {number}] FAIL  {description}", flush=True)
            raise
        with capfd.disabled():
            print(f"[ACCEPTANCE {number}] PASS  {description}", flush=True)

    return _run
