import sys

from sinklock.cli import main

sys.exit(main())
