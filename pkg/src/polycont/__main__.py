import sys

from polycont.cli import main

sys.exit(main())
