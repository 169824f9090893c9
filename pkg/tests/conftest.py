import sys

import numpy as np
import pytest

from eopk.eop import build_family
from eopk.recurrence import extract_five_term, extract_seven_term
from eopk.weierstrass import build_lattice

WEIGHTS = ("unity", "exp_p:0.5", "exp_pp:0.3")
SYMMETRIC_WEIGHTS = ("unity", "exp_p:0.5")


@pytest.fixture(scope="session")
def lattice():
    return build_lattice(1.0)


@pytest.fixture(scope="session")
def families():
    return {w: build_family(1.0, w, 8, 256) for w in WEIGHTS}


@pytest.fixture(scope="session", params=WEIGHTS)
def fam(request, families):
    return families[request.param]


@pytest.fixture(scope="session", params=SYMMETRIC_WEIGHTS)
def sym_fam(request, families):
    return families[request.param]


@pytest.fixture(scope="session")
def unity(families):
    return families["unity"]


@pytest.fixture(scope="session")
def coeffs():
    cache = {}

    def get(f):
        key = str(f.weight)
        if key not in cache:
            cache[key] = (extract_five_term(f), extract_seven_term(f))
        return cache[key]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def gamma_points(L, rng, k, lo=0.02, hi=0.98):
    return 0.5j * L.tau_im + rng.uniform(lo, hi, k)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
