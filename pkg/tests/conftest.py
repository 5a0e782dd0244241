import pytest

from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE = {}


def record(key, passed, detail):
    ACCEPTANCE[key] = (bool(passed), detail)
    print(f"{key} {'PASS' if passed else 'FAIL'}: {detail}")


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if passed else 'FAIL'}: {detail}")
