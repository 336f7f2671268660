import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("HENONHEIGHTS_CACHE", str(tmp_path / "cache"))


CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: (isinstance(k, str), k)):
        ok, title, detail = CRITERIA[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {title} ({detail})")
