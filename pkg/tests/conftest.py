import numpy as np
import pytest

from nearwhite import ArmaSpec, RngSpec, gen_arma, gen_white_noise, standardize


def brute_force_acov(x):
    """O(N^2) double loop, the reference for lag products."""
    n = len(x)
    out = []
    for tau in range(n):
        total = 0.0
        for t in range(n - tau):
            total += x[t] * x[t + tau]
        out.append(total)
    return np.array(out)


def wn_standardized(n, seed):
    return standardize(gen_white_noise(n, RngSpec(seed)))


def arma_standardized(n, seed, ar=(), ma=()):
    return standardize(gen_arma(n, ArmaSpec(ar, ma), RngSpec(seed)))


@pytest.fixture
def alternating4():
    return standardize([1.0, -1.0, 1.0, -1.0])


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def check(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
