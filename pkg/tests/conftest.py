import os
import tempfile

# Isolate the on-disk map-table cache before any table is requested.
os.environ.setdefault("HYBRIDMSD_CACHE_DIR", tempfile.mkdtemp(prefix="hybridmsd-test-"))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n].line())
