import pytest

_ACCEPTANCE: list[tuple[int, str, bool, str]] = []


class AcceptanceLog:
    """Records one pass/fail line per acceptance criterion, then asserts."""

    def check(self, number: int, name: str, ok: bool, detail: str = "") -> None:
        ok = bool(ok)
        _ACCEPTANCE.append((number, name, ok, detail))
        print(f"[acceptance {number:2d}] {'PASS' if ok else 'FAIL'} {name} {detail}")
        assert ok, f"criterion {number} ({name}) failed: {detail}"


@pytest.fixture
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{number:2d}. {'PASS' if ok else 'FAIL'}  {name}  {detail}")
