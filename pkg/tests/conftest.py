import os
import subprocess
import sys

import pytest

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(cid: str, ok: bool, detail: str = "") -> bool:
        """Merge a part verdict into the criterion line; return the part's own verdict."""
        ok = bool(ok)
        merged, text = ok, detail
        prev = CRITERIA.get(cid)
        if prev is not None:
            merged = ok and prev[0]
            text = "; ".join(x for x in (prev[1], detail) if x)
        CRITERIA[cid] = (merged, text)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")

    def order(cid):
        head, _, tail = cid.partition(".")
        return (int(head), tail)

    for cid in sorted(CRITERIA, key=order):
        ok, detail = CRITERIA[cid]
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid:<6} {detail}")


@pytest.fixture(scope="session")
def run_cli():
    """Run ``python -m rankedtrees`` and return the CompletedProcess."""
    def _run(*args, stdin=None, env=None):
        full_env = dict(os.environ)
        if env:
            full_env.update(env)
        return subprocess.run([sys.executable, "-m", "rankedtrees", *map(str, args)],
                              input=stdin, capture_output=True, text=True, env=full_env)
    return _run
