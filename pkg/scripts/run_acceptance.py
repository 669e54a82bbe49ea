"""Run acceptance criteria (all, or the numbers given) and print timings."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import test_acceptance  # noqa: E402


def main(argv: list[str]) -> int:
    numbers = [int(a) for a in argv] or sorted(test_acceptance.CRITERIA)
    results = [test_acceptance.run_criterion(k)[0] for k in numbers]
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
