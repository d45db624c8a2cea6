import pytest

from sigflow import FamilyParams, Metric, launch_family
from sigflow.verify import c3_metric, slit_metric, z_family

_LINES = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_LINES] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line, print it and fail the test when it did not pass."""
    lines = request.config.stash[_LINES]

    def record(n: int, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} criterion {n:>2}: {detail}"
        lines[n] = line
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])


# shared families (integrating them is the slow part of the suite) ----------


@pytest.fixture(scope="session")
def E1():
    return slit_metric()


@pytest.fixture(scope="session")
def C3():
    return c3_metric()


@pytest.fixture(scope="session")
def z_fam():
    return z_family()


def _d_family(eps, **kw):
    kw.setdefault("extent", 0.5)
    kw.setdefault("simple_roots", False)
    return launch_family(Metric.normal_form("-1", eps), (0.0, 0.0), FamilyParams(**kw))


@pytest.fixture(scope="session")
def ds_fam():
    return _d_family(-1.0)


@pytest.fixture(scope="session")
def dn_fam():
    return _d_family(1.0 / 32.0)


@pytest.fixture(scope="session")
def df_fam():
    return _d_family(1.0, leaves=(0.0,))


@pytest.fixture(scope="session")
def c3_fam(C3):
    return launch_family(C3, (0.0, 0.0), FamilyParams(extent=0.5))
