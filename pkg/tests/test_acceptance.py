"""Acceptance criteria, one test each.

Run ``pytest -s tests/test_acceptance.py`` or ``python tests/test_acceptance.py``
to see one status line per criterion; the pytest terminal summary also
lists them.  Criterion 10 reports a measure-definition discrepancy rather
than failing.
"""
import pytest

from hybridmsd import verify

RESULTS: dict[int, verify.CheckResult] = {}


@pytest.mark.parametrize("check", verify.CHECKS, ids=lambda f: f.__name__.removeprefix("check_"))
def test_criterion(check):
    result = check()
    RESULTS[result.number] = result
    print(result.line())
    for d in result.details:
        print("    " + d)
    allowed = {"pass", "discrepancy"} if result.number == 10 else {"pass"}
    assert result.status in allowed, "\n".join(result.details)


if __name__ == "__main__":
    for r in verify.run_all():
        print(r.line())
