"""Main script for gadgetdiv: constraint-based diversification of toy MIPS functions."""
import logging
import os
import sys

from gadgetdiv.harness.cli import LOG_FORMAT, main

logging.basicConfig(
    level=getattr(logging, os.environ.get("GADGETDIV_LOG_LEVEL", "INFO").upper(), logging.INFO),
    format=LOG_FORMAT,
    stream=sys.stdout,
)

if __name__ == '__main__':
    sys.exit(main())
