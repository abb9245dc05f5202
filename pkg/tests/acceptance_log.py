RESULTS = []


def record(name, ok, detail):
    """Store and print one criterion verdict; returns ``ok`` for the assert."""
    RESULTS.append((name, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok
