import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "laws",
    max_examples=1000,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("quick", max_examples=100, deadline=None)
settings.load_profile(os.environ.get("CUNTZPERM_HYPOTHESIS", "quick"))

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def record():
    """Log one acceptance line; printed after the run."""

    def _rec(label: str, ok: bool, detail: str = ""):
        _ACCEPTANCE.append((label, ok, detail))
        return ok

    return _rec


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def level4():
    """The full n=2, k=4 enumeration with square-free counts, shared across files."""
    from cuntzperm.search import SearchConfig, enumerate_automorphisms

    return enumerate_automorphisms(SearchConfig(2, 4, mode="square-free"))
