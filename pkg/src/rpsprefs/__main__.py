import sys

from rpsprefs.cli import main

sys.exit(main())
