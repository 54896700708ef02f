import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> list of (part, ok, note), filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        ok = all(p[1] for p in parts)
        notes = "; ".join("%s: %s" % (p[0], p[2]) for p in parts if not p[1])
        title = parts[0][3]
        terminalreporter.write_line("criterion %2d %-40s %s%s" % (n, title, "PASS" if ok else "FAIL",
                                                                  "  (" + notes + ")" if notes else ""))
