"""Collects one PASS/FAIL line per acceptance criterion for the run summary."""
LINES = []


def record(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}"
    LINES.append(line)
    print(line)
