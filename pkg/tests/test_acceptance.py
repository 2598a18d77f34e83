"""Acceptance criteria 1-10, each at its stated tolerance and time limit.

A one-line verdict per criterion is printed in the terminal summary
(and by running this file directly).
"""
import pytest

from torsdiv import acceptance

RESULTS: dict[int, dict] = {}


def verdict_line(r: dict) -> str:
    tag = "PASS" if r["ok"] and r["within_limit"] else "FAIL"
    return (f"criterion {r['criterion']:>2} {tag}  {r['name']}  "
            f"({r['elapsed_ms']} ms, limit {r['limit_ms']} ms)")


@pytest.mark.parametrize("crit", acceptance.CRITERIA, ids=lambda c: f"criterion_{c.number}")
def test_criterion(crit):
    r = acceptance.run(crit)
    RESULTS[crit.number] = r
    print(verdict_line(r))
    assert r["ok"], r["details"]
    assert r["within_limit"], f"took {r['elapsed_ms']} ms"


if __name__ == "__main__":
    for c in acceptance.CRITERIA:
        print(verdict_line(acceptance.run(c)), flush=True)
