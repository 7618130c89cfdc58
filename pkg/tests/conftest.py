import time
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

# fixtures that are publication-ready (DOI + published date): the corpus the
# emit/schema/consistency suites run over
EMIT_FIXTURES = ["emojex_pub", "mathtitle", "minimal", "unicode"]

_t0 = time.monotonic()

# (criterion number, description) -> list of outcomes, filled by the hook below
_criteria: dict[tuple[int, str], list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(num, desc): acceptance criterion this test verifies")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        key = (marker.args[0], marker.args[1])
        _criteria.setdefault(key, []).append(report.passed)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def journal_cfg() -> Path:
    return FIXTURES / "journal.cfg"


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.meta"


def load_pm(name: str):
    """Parse and lower a fixture, asserting it is diagnostic-clean."""
    from pubmeta.metafile import lower_to_paper_meta, parse_meta

    doc, parse_diags = parse_meta(fixture_path(name).read_bytes(), source_name=name)
    assert parse_diags == [], parse_diags
    pm, lower_diags = lower_to_paper_meta(doc)
    assert lower_diags == [], lower_diags
    return pm


@pytest.fixture(scope="session")
def emit_cfg():
    from pubmeta.cli import _build_emit_config, _read_config

    values, diags = _read_config(str(FIXTURES / "journal.cfg"))
    assert not any(d.is_error for d in diags)
    return _build_emit_config(values)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _criteria:
        terminalreporter.write_line("acceptance criteria:")
        for (num, desc) in sorted(_criteria):
            verdict = "PASS" if all(_criteria[(num, desc)]) else "FAIL"
            terminalreporter.write_line(f"[criterion {num}] {verdict}  {desc}")
    elapsed = time.monotonic() - _t0
    terminalreporter.write_line(
        f"[criterion 7] suite wall time {elapsed:.1f}s (budget 60s, offline)"
    )
