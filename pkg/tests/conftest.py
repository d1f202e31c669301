import functools
import sys
from importlib import resources
from pathlib import Path

import pytest

from chemtau import load_gri30, parse_mechanism

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"

# (criterion, label, ok, detail) tuples appended by test_acceptance
RESULTS: list = []


def gri_thermo_text() -> str:
    return (resources.files("chemtau") / "data" / "thermo30.dat").read_text()


def toy_mechanism(reactions: str, species: str, elements: str = "C H O N AR"):
    """Small mechanism built from GRI thermo cards."""
    text = f"ELEMENTS {elements} END\nSPECIES {species} END\nREACTIONS\n{reactions}\nEND\n"
    return parse_mechanism(text, gri_thermo_text())


@pytest.fixture(scope="session")
def gri():
    return load_gri30()


@pytest.fixture(scope="session")
def first_order():
    """CH2(S) => CH2 with constant rate 1e3 1/s (equal molecular weights)."""
    return toy_mechanism("CH2(S) => CH2   1.0E3  0.0  0.0", "CH2(S) CH2")


@functools.lru_cache(maxsize=None)
def run_builtin(name: str, **overrides):
    """Integrate a built-in case once per test session."""
    from dataclasses import replace

    from chemtau.cli import CASES, load_mechanism
    from chemtau.reactor import integrate

    case = replace(CASES[name], **overrides)
    m = load_mechanism(case)
    return m, integrate(m, case.reactor_config(m))


@pytest.fixture(scope="session")
def builtin():
    return run_builtin


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted({r[0] for r in RESULTS}):
        rows = [r for r in RESULTS if r[0] == crit]
        ok = all(r[2] for r in rows)
        failed = [r[1] for r in rows if not r[2]]
        tail = f" (failing: {'; '.join(failed)})" if failed else ""
        tr.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}, {len(rows)} checks{tail}")
        for _, label, good, detail in rows:
            tr.write_line(f"    {'ok  ' if good else 'FAIL'} {label}: {detail}")
