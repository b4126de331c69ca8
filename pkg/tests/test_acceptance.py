"""Full-scale acceptance battery, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL] criterion N`` line to the
terminal and asserts the criterion at its stated tolerance.  Criteria 4, 5
and 6 share one set of simulated paths through the module-scoped battery.
Expect around a quarter of an hour on one core.
"""

import os

import pytest

from ldpoint.verify import CRITERIA, Battery

pytestmark = pytest.mark.acceptance


@pytest.fixture(scope="module")
def battery():
    seed = int(os.environ.get("LDPOINT_SEED", "20240601"))
    return Battery("full", seed)


def _report(res) -> str:
    lines = [res.summary()]
    for c in res.checks:
        flag = "ok " if c.passed else "BAD"
        lines.append(f"    {flag} {c.label}: theory {c.theory:.6g} estimate {c.estimate:.6g} "
                     f"stderr {c.stderr:.3g} z {c.z:.2f} [{c.rule}]")
    return "\n".join(lines)


@pytest.mark.parametrize("cid", sorted(CRITERIA), ids=lambda i: f"criterion_{i}")
def test_criterion(battery, cid, capsys):
    res = battery.run([cid])[0]
    with capsys.disabled():
        print("\n" + res.summary(), flush=True)
    assert res.passed, _report(res)
