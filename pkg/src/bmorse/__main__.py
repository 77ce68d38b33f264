import sys

from bmorse.cli import main

sys.exit(main())
