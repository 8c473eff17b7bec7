#!/usr/bin/env python3
"""
Command-line entry point for the blackbody friction toolkit.

    python friction_cli.py force --config configs/example_run.yaml
    python friction_cli.py threshold --chi 2.5 --chi 3.0
"""
from dotenv import load_dotenv

# Load environment variables (BBFRICTION_*)
load_dotenv()

from bbfriction.cli import main

if __name__ == "__main__":
    main()
