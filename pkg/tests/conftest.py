import pytest

from liouville.solution import InitialData, solve

CONST = InitialData("0", "0", 2.0)
SINCOS = InitialData("sin(x)", "cos(2*x)", 1.0)


@pytest.fixture(scope="session")
def const_field():
    return solve(CONST, alpha=2, T=2)


@pytest.fixture(scope="session")
def sincos_field():
    return solve(SINCOS, alpha=2, T=2)


class PolyField:
    """Synthetic jet-capable field sum c * t^i x^j, for plumbing tests."""

    def __init__(self, terms, m=2.0):
        self.terms = terms
        self.m = m

    def partial(self, t, x, beta):
        from math import perm

        b1, b2 = beta
        out = 0.0 * t * x
        for (i, j), c in self.terms.items():
            if i >= b1 and j >= b2:
                out = out + c * perm(i, b1) * perm(j, b2) * t ** (i - b1) * x ** (j - b2)
        return out


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion."""

    def record(number, passed, detail):
        _ACCEPTANCE.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
