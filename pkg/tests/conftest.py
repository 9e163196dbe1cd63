import numpy as np
import pytest

import smcperiod as sp

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def dna():
    return sp.StateSpace.dna()


@pytest.fixture(scope="session")
def fix_det():
    """Two states, deterministic alternation: A holds 1, B holds 2.

    Starting from A the trajectory is A B B A B B ...; every kernel entry
    is 0 or 1 and small-lag kernels are known by hand.
    """
    states = sp.StateSpace(("A", "B"))
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    H = np.zeros((2, 2, 2))
    H[0, 0, 1] = 1.0
    H[1, 1, 0] = 1.0
    return sp.SemiMarkovModel(states, P, H)


@pytest.fixture(scope="session")
def fix_unif(dna):
    """Model of an i.i.d. uniform DNA sequence.

    Uniform embedded matrix and geometric holding times with success 3/4
    (the chance the next symbol differs), truncated at 30.
    """
    g = sp.geometric_holding(0.75, 30)
    H = np.tile(g[:, None, None], (1, 4, 4))
    return sp.SemiMarkovModel(dna, sp.uniform_embedded(dna), H)


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    def record(num: int, name: str, ok: bool, detail: str = ""):
        line = "ACCEPTANCE %d %-28s %s%s" % (
            num, name + ":", "PASS" if ok else "FAIL",
            ("  [%s]" % detail) if detail else "")
        ACCEPTANCE_RESULTS.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.ensure_newline()
        terminalreporter.section("acceptance criteria", sep="-")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
