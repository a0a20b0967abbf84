from pathlib import Path

import pytest

from cqasm.ir import load_program

CORPUS = Path(__file__).parent / "corpus"
GOLDEN = Path(__file__).parent / "golden"
LISTINGS = ["bell", "rename", "feedback", "parity", "parallel", "grover", "variational"]

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def read_listing(name: str, verbatim: bool = False) -> str:
    base = CORPUS / "verbatim" if verbatim else CORPUS
    return (base / f"{name}.qc").read_text(encoding="utf-8")


@pytest.fixture
def listing():
    return read_listing


@pytest.fixture
def program():
    def _load(name: str):
        return load_program(read_listing(name))
    return _load


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
