"""Module entry point: ``python -m fieldsamp``."""

import sys

from .cli import main

sys.exit(main())
