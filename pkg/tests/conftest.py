from __future__ import annotations

import pytest
from hypothesis import settings

from autonum import linrep as lr
from autonum import logic, reproduce, templates

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("repo")


def compiled(text: str):
    return logic.compile_formula(logic.parse_formula(text))


@pytest.fixture(scope="session")
def r2a_dfa():
    return compiled(templates.R2A)


@pytest.fixture(scope="session")
def r2b_dfa():
    return compiled(templates.R2B)


@pytest.fixture(scope="session")
def r2a(r2a_dfa):
    return lr.extract(r2a_dfa, "n")


@pytest.fixture(scope="session")
def r2b(r2b_dfa):
    return lr.extract(r2b_dfa, "n")


@pytest.fixture(scope="session")
def r3c():
    return lr.extract(compiled(templates.R3C_SHIFTED), "n")


@pytest.fixture(scope="session")
def r3d():
    return lr.extract(compiled(templates.R3D_SHIFTED), "n")


@pytest.fixture(scope="session")
def r3c_plain():
    return lr.extract(compiled(templates.representation_formula(3, "TT", 0)), "n")


@pytest.fixture(scope="session")
def r3d_plain():
    return lr.extract(compiled(templates.representation_formula(3, "TT", 1)), "n")


@pytest.fixture(scope="session")
def rho():
    """Reference rank-5 matrices for the evil-number R2 series."""
    return reproduce.fixture("dombi_rank5.rep")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
