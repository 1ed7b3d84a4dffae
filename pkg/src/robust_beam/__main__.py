import sys

from robust_beam.cli import main

sys.exit(main())
