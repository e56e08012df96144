# ABOUTME: Entry point for the KLE attack workbench.
# ABOUTME: Thin wrapper so that "python main.py attack ..." works; all logic is in the package.
import sys

from kle_workbench.cli import main

if __name__ == "__main__":
    sys.exit(main())
