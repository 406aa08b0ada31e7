import sys

import numpy as np
import pytest

from homolpn.ecc import hamming_7_4
from homolpn.gf2 import BitMatrix
from homolpn.homophonic import HomophonicCode

HAMMING_ROWS = ["1000110", "0100101", "0010011", "0001111"]
EX1_GH = ["0010", "0001", "1010", "0101"]
EX2_GH = ["0010", "0001", "1011", "0111"]


# -- independent list-based GF(2) oracles ---------------------------------------


def py_matmul(a, b):
    """Schoolbook GF(2) product on lists of lists of ints."""
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][t] * b[t][j] for t in range(inner)) % 2 for j in range(cols)] for i in range(len(a))]


def py_rank(rows):
    """Rank via integer bitmasks, sharing nothing with the packed kernels."""
    basis = []
    for r in rows:
        x = int("".join(map(str, r)) or "0", 2)
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis.append(x)
    return len(basis)


def bits(text):
    return [int(c) for c in text]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("tests.test_acceptance")
    if module is not None and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def hamming():
    return hamming_7_4()


@pytest.fixture
def ex1():
    return HomophonicCode.from_matrix(BitMatrix.from_strings(EX1_GH), 2, 1)


@pytest.fixture
def ex2():
    return HomophonicCode.from_matrix(BitMatrix.from_strings(EX2_GH), 2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
