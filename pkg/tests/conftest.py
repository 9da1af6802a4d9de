from contextlib import contextmanager

import pytest


@pytest.fixture
def criterion(capfd):
    """Print one visible pass/fail line per acceptance criterion.

    Bypasses pytest's capture so the gate's outcome shows up in any run mode.
    """

    @contextmanager
    def _criterion(number: int, label: str):
        try:
            yield
        except BaseException:
            with capfd.disabled():
                print(f"criterion {number}: FAIL - {label}")
            raise
        with capfd.disabled():
            print(f"criterion {number}: PASS - {label}")

    return _criterion
