import pytest
from hypothesis import settings

from cheegerspec.sturm import BACKENDS

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

# lines recorded by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES = {}


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[num])
