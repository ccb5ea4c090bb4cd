import warnings

import pytest
from hypothesis import settings

from qprabhakar import QContext, QFunction

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def ctx():
    return QContext(0.5)


@pytest.fixture(params=[0.3, 0.5, 0.9], ids=lambda q: f"q={q}")
def ctx_q(request):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return QContext(request.param)


def poly(*coefs):
    return QFunction(lambda t: sum(c * t**i for i, c in enumerate(coefs)), name="poly")


# acceptance criteria report one line each, shown at the end of every run
ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    def report(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
        ACCEPTANCE[number] = line
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
