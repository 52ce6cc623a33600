import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from roisel.experiments import prepare  # noqa: E402
from roisel.synthetic import standard_clips  # noqa: E402

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (bool(ok), detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


_CLIPS: dict[int, list] = {}


def clips_at(qp: int):
    """The three standard clips analysed at ``qp``; cached for the session."""
    if qp not in _CLIPS:
        _CLIPS[qp] = [prepare(seq, rois, qp) for seq, rois in standard_clips()]
    return _CLIPS[qp]


@pytest.fixture(scope="session")
def standard_prepared():
    return clips_at
