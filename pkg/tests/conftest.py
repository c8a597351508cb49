import pytest

CRITERIA = {
    1: "exact-mode chi equals brute-force crosstalk",
    2: "activation decomposition",
    3: "conservation of distributed crosstalk",
    4: "Markov chain statistics",
    5: "i.i.d. accuracy at N=1000",
    6: "C0 scaling against N/(2 ln N)",
    7: "efficiency under bias and correlation dispersion",
    8: "dynamic flag fires before stability loss",
    9: "byte-identical reruns",
}

_outcomes: dict[int, bool] = {}
_details: dict[int, list[str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not mark.args:
        return
    k = mark.args[0]
    if rep.when == "call" or rep.failed:
        _outcomes[k] = _outcomes.get(k, True) and rep.passed
    if rep.when == "call":
        _details.setdefault(k, []).extend(v for name, v in item.user_properties if name == "measured")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_outcomes):
        status = "PASS" if _outcomes[k] else "FAIL"
        line = f"criterion {k}: {status}  {CRITERIA.get(k, '')}"
        if _details.get(k):
            line += "  [" + "; ".join(_details[k]) + "]"
        tr.write_line(line)
