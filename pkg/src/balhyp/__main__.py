import sys

from balhyp.cli import main

sys.exit(main())
