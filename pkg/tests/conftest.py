import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid:
                results[nodeid.split("::")[-1]] = "PASS" if outcome == "passed" else "FAIL"
    if results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name in sorted(results, key=lambda n: int(n.split("_")[2])):
            terminalreporter.write_line(f"{results[name]}: {name}")

from causal_threads import format as model_format
from causal_threads import snowball_path
from causal_threads.engine import run


@pytest.fixture(scope="session")
def snowball():
    model, _doc = model_format.parse_file(snowball_path())
    return model


@pytest.fixture(scope="session")
def snowball_trace(snowball):
    return run(snowball, snowball.disruptions, 60)
