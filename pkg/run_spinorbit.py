"""Run the spinorbit CLI from a checkout without installing the package."""

import sys
from pathlib import Path


def _insert_repo_paths() -> None:
    """Ensure the in-repo package is importable even when not installed."""
    current = Path(__file__).resolve().parent
    src = current / "src"
    if src.exists() and str(src) not in sys.path:
        sys.path.insert(0, str(src))


_insert_repo_paths()

from spinorbit.cli import main  # noqa: E402

if __name__ == "__main__":
    raise SystemExit(main())
