import itertools
from fractions import Fraction

import pytest

# criterion number -> (outcome, description), filled by the acceptance module
ACCEPTANCE: dict[int, tuple[str, str]] = {}
DETAILS: dict[int, str] = {}


def brute_force_stats(g):
    """(E[X], Pr[X > 0]) by walking every orientation in pure Python."""
    total = positive = 0
    count = 0
    for bits in itertools.product((0, 1), repeat=g.m):
        tails = set()
        for (u, v), b in zip(g.edges, bits):
            tails.add(u if b == 0 else v)
        k = g.n - len(tails)
        total += k
        positive += k > 0
        count += 1
    return Fraction(total, count), Fraction(positive, count)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    num = getattr(item.function, "criterion", None)
    if num is None or rep.when != "call":
        return
    ACCEPTANCE[num] = ("PASS" if rep.passed else "FAIL", item.function.__doc__.strip().splitlines()[0])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        status, desc = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {status}  {desc}")
        if num in DETAILS:
            terminalreporter.write_line(f"    {DETAILS[num]}")
