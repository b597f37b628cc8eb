import sys

from quasidarwin.cli import main

sys.exit(main())
