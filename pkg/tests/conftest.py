import numpy as np
import pytest

from gifs import AffineMap, PointSet, build_system
from gifs.sysio import builtin


def random_system(rng, M=2, p=2, L=None, D=1.0, scale=0.8):
    """A random affine GIFS that passes strict certification."""
    L = L or int(rng.integers(1, 4))
    maps = []
    for _ in range(L):
        blocks = rng.uniform(-1, 1, size=(p, M, M))
        # keeps both the sum of Frobenius norms (>= sum of spectral norms) and
        # the interval width of the linear part below `scale`
        fro = sum(np.linalg.norm(b) for b in blocks)
        rows = np.abs(blocks).sum(axis=(0, 2)).max()
        blocks *= scale / max(fro, rows)
        f = AffineMap(blocks, np.zeros(M))
        lo = sum(np.minimum(b * 0, b * D).sum(axis=1) for b in blocks)
        hi = sum(np.maximum(b * 0, b * D).sum(axis=1) for b in blocks)
        offset = rng.uniform(-lo, D - hi)
        maps.append(AffineMap(f.blocks, offset))
    return build_system(maps, D, p, M)


def random_points(rng, count, M=2, D=1.0):
    return PointSet.from_array(rng.uniform(0, D, size=(count, M)), D)


@pytest.fixture
def rng():
    return np.random.default_rng(20181)


@pytest.fixture(scope="session")
def example_a():
    return builtin("A")


@pytest.fixture(scope="session")
def examples():
    return {name: builtin(name) for name in "ABC"}


@pytest.fixture(scope="session")
def det_a4():
    """Example A, deterministic algorithm, 4 applications from the cube center (~10 s)."""
    from gifs.algorithms import deterministic_run
    s = builtin("A")
    return deterministic_run(s, s.center(), 4)


# acceptance reporting -----------------------------------------------------------

_CRITERIA: dict[int, str] = {}


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="also run the full-scale reproductions marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="full-scale run; pass --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    num = int(name.split("_")[2])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        prev = _CRITERIA.get(num)
        # a criterion with several parts fails if any part fails
        if prev is None or prev == "PASS" or verdict == "FAIL":
            _CRITERIA[num] = verdict


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        terminalreporter.write_line(f"criterion {num}: {_CRITERIA[num]}")
