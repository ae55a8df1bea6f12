import json
from pathlib import Path

import numpy as np
import pytest

ORACLES = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def oracle():
    return ORACLES


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_skew(rng, n):
    x = random_complex(rng, n)
    return 0.5 * (x - x.conj().T)


def random_hermitian(rng, n):
    x = random_complex(rng, n)
    return 0.5 * (x + x.conj().T)


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion(request):
    def record(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        print(line)
        ACCEPTANCE.append(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
