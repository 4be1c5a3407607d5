import sys

from mibwarden.cli import main

sys.exit(main())
