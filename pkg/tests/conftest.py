import sys


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(results):
        parts = results[crit]
        failed = [p for p, ok in parts if not ok]
        status = "FAIL" if failed else "PASS"
        detail = f"{len(parts)} checks" if not failed else "failing: " + "; ".join(failed)
        tr.write_line(f"criterion {crit:2d}: {status}  ({detail})")
