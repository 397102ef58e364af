"""Run the acceptance suite and print one verdict line per criterion."""

import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    tests = Path(__file__).resolve().parents[1] / "tests" / "test_acceptance.py"
    raise SystemExit(pytest.main([str(tests), "-q", "-s", *sys.argv[1:]]))
