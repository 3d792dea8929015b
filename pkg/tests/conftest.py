import pytest

from tonguetwist.lexicon import default_lexicon, load_lexicon
from tonguetwist.phonology import default_table

TOY_LEXICON = """\
;;; toy dictionary
the  DH AH0
a  AH0
fun  F AH1 N
funny  F AH1 N IY0
fast  F AE1 S T
very  V EH1 R IY0
grey  G R EY1
big  B IH1 G
fox  F AA1 K S
vixen  V IH1 K S AH0 N
pat  P AE1 T
bat  B AE1 T
"""


@pytest.fixture(scope="session")
def lex():
    return default_lexicon()


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture(scope="session")
def toy_lex():
    return load_lexicon(TOY_LEXICON)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, in criterion order."""
    results = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if status != "passed" or rep.when == "call":
                results[name] = "PASS" if status == "passed" else "FAIL"
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(results):
        num, _, label = name[len("test_criterion_"):].partition("_")
        terminalreporter.write_line(f"{results[name]}  criterion {int(num):2d}  {label.replace('_', ' ')}")
