import os
from pathlib import Path

import pytest

CRITERIA = {
    "test_criterion_1_theorem2_equivalence": "1 Rank construction equivalence over the corpus",
    "test_criterion_2_rank1_universality": "2 Rank-1 universality",
    "test_criterion_3_remark_reproduction": "3 Counterexample reproduction (n=3, eps=1/10)",
    "test_criterion_4_compositional_f": "4 Compositional f vs brute force",
    "test_criterion_5_smooth_lower_bound": "5 Smooth-domain lower bound",
    "test_criterion_6_oracle_agreement": "6 Oracle agreement",
    "test_criterion_7_structural_invariants": "7 Structural invariants",
}

_results: dict[str, tuple[str, float]] = {}

REPORT_PATH = Path(__file__).resolve().parent.parent / "oracle_reports.jsonl"


@pytest.fixture(scope="session")
def oracle_log():
    """Append OracleReport JSON lines to oracle_reports.jsonl."""
    REPORT_PATH.write_text("")

    def log(report):
        with REPORT_PATH.open("a") as fh:
            fh.write(report.to_json_line() + "\n")
        return report

    return log


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if name not in CRITERIA:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results[name] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, title in CRITERIA.items():
        if name not in _results:
            continue
        outcome, secs = _results[name]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {title}  ({secs:.1f}s)")


def pytest_configure(config):
    os.environ.setdefault("HBOPS_SEED", "0")
    config.addinivalue_line("markers", "acceptance: acceptance criteria")
