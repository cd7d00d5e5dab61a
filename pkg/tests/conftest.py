import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("BKCHECK_CACHE_DIR", str(tmp_path / "cache"))


ACCEPTANCE: list[tuple[int, str, bool, str]] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def record(number: int, title: str, ok: bool, detail: str = ""):
        ACCEPTANCE.append((number, title, ok, detail))
        print(f"[{number:02d}] {'PASS' if ok else 'FAIL'} {title} {detail}".rstrip())
        assert ok, detail
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{number:02d}] {'PASS' if ok else 'FAIL'} {title}  {detail}")
