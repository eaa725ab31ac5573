"""python -m sentinel: same as the sentinel console script."""

import sys

from .cli import main

sys.exit(main())
