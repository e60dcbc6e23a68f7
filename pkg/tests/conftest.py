import pytest
from hypothesis import HealthCheck, settings, strategies as st

from crystal_cone.cartan import IndexSequence, builtin_family, cartan_rank2
from crystal_cone.forms import LinearForm
from crystal_cone.zinf import ZSeq

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FAMILIES = ["A1", "A2", "A3", "rank2:2,2", "rank2:1,3", "rank2:3,3", "affineA3"]


@st.composite
def cartan_and_iota(draw):
    name = draw(st.sampled_from(FAMILIES))
    cartan = builtin_family(name)
    n = cartan.n
    if n == 1:
        return cartan, IndexSequence.standard(1)
    order = draw(st.permutations(list(range(1, n + 1))))
    return cartan, IndexSequence.periodic(order)


def zseqs(max_len=8, lo=0, hi=3):
    return st.lists(st.integers(lo, hi), max_size=max_len).map(lambda v: ZSeq(tuple(v)))


def linear_forms(max_support=10, max_coeff=20):
    return st.dictionaries(
        st.integers(1, max_support), st.integers(-max_coeff, max_coeff), max_size=max_support
    ).map(LinearForm.from_dict)


@pytest.fixture
def a2():
    return builtin_family("A2"), IndexSequence.standard(2)


# ---------------------------------------------------------------- acceptance summary

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        prev = _criteria.get(number)
        if prev is None or prev[0] == "PASS":
            _criteria[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
