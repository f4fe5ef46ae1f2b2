#!/usr/bin/env python3
"""Render a wc-outage table to an image."""

import sys

from ifplots.cli import main

if __name__ == "__main__":
    sys.exit(main("wc-outage"))
