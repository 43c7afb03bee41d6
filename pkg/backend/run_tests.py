# Test Runner Script
# File: run_tests.py
# Author: Transport Toolkit Team
# Date: 2026-10-12
# Purpose: Simple test runner for the Heisenberg transport toolkit

import subprocess
import sys
from pathlib import Path


def run_tests(target: str, extra: list) -> bool:
    """Run pytest on one test path"""
    print(f"Running {target} ...\n")
    cmd = [sys.executable, "-m", "pytest", target, "--tb=short", *extra]
    try:
        result = subprocess.run(cmd, cwd=Path(__file__).parent)
        return result.returncode == 0
    except Exception as e:
        print(f"Error running tests: {e}")
        return False


def main() -> bool:
    """Unit tests first, then the integration tests unless --unit is given"""
    if not (Path(__file__).parent / "tests").exists():
        print("Tests directory not found. Make sure you're in the backend directory.")
        return False

    args = sys.argv[1:]
    unit_only = "--unit" in args
    extra = [a for a in args if a != "--unit"]

    ok = run_tests("tests/unit/", extra)
    if ok and not unit_only:
        ok = run_tests("tests/", ["-m", "not unit", *extra])

    print("\nAll tests passed!" if ok else "\nSome tests failed!")
    return ok


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
