import numpy as np
import pytest

from quadbounds import ChangeScenario

# Urban multipath SAM parameters: nominal N(0.1, 4e-4), changed N(0.2, 1.6e-3).
MU0, SIGMA0_SQ, MU1, SIGMA1_SQ = 0.1, 4e-4, 0.2, 1.6e-3


def sam_scenario(m=10, m_alpha=100, mu1=MU1):
    return ChangeScenario.from_params(MU0, SIGMA0_SQ, mu1, SIGMA1_SQ, m=m, m_alpha=m_alpha)


@pytest.fixture(scope="session")
def scenario():
    return sam_scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Mutable record whose ``detail`` ends up in the acceptance summary line."""
    record = {"detail": ""}
    request.node.criterion_record = record
    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        record = getattr(item, "criterion_record", {"detail": ""})
        _CRITERIA[marker.args[0]] = ("PASS" if report.passed else "FAIL", record["detail"])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {detail}".rstrip())
