import sys

from shotmax.cli import main

sys.exit(main())
