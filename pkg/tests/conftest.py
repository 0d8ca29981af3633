import functools

import numpy as np
import pytest

from abfinsler.classify import draw_samples
from abfinsler.zoo import zoo_get

ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@functools.lru_cache(maxsize=None)
def _zoo(id_, params):
    return zoo_get(id_, **dict(params))


def zoo(id_, **params):
    return _zoo(id_, tuple(sorted(params.items())))


@functools.lru_cache(maxsize=None)
def _samples(id_, count, seed, per_point, params):
    return draw_samples(_zoo(id_, params), count, seed, directions_per_point=per_point)


def samples(id_, count=200, seed=0, per_point=1, **params):
    return _samples(id_, count, seed, per_point, tuple(sorted(params.items())))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = next((m for m in getattr(report, "criterion", ()) or ()), None)
    if marker:
        num, title = marker
        detail = next((v for k, v in report.user_properties if k == "detail"), "")
        ACCEPTANCE[num] = ("PASS" if report.passed else "FAIL", title, detail)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    rep.criterion = [tuple(m.args)] if m else []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:>2} {status}  {title}" + (f"  ({detail})" if detail else ""))
