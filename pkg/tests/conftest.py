import json
from pathlib import Path

import pytest

from koszulcurve.curves import HyperellipticCurve, RationalCurve, klein_quartic
from koszulcurve.exactalg.fields import GF

ORACLE_FILE = Path(__file__).parent / "oracles" / "oracle_values.json"

GENUS2_F = [-1, 0, 0, 0, 0, 1]  # x^5 - 1
GENUS3_F = [0, -1, 0, 0, 0, 0, 0, 1]  # x^7 - x


@pytest.fixture(scope="session")
def oracle():
    return json.loads(ORACLE_FILE.read_text())


@pytest.fixture(scope="session")
def genus2():
    return HyperellipticCurve(GENUS2_F)


@pytest.fixture(scope="session")
def genus3():
    return HyperellipticCurve(GENUS3_F)


@pytest.fixture(scope="session")
def klein():
    return klein_quartic()


@pytest.fixture(scope="session")
def p1():
    return RationalCurve()


@pytest.fixture(scope="session")
def genus2_f11():
    return HyperellipticCurve(GENUS2_F, GF(11))


@pytest.fixture(scope="session")
def genus3_f11():
    return HyperellipticCurve(GENUS3_F, GF(11))


@pytest.fixture(scope="session")
def klein_f11():
    return klein_quartic(GF(11))



def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
