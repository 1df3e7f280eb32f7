#!/usr/bin/env python3
"""
Entry script for the geotherm command line

Usage:
    python run_geotherm.py presets
    python run_geotherm.py run fig7
    python run_geotherm.py verify rn
"""

import sys

from geotherm.app.main import main

if __name__ == "__main__":
    sys.exit(main())
