import sys

from numeralgame.cli import main

sys.exit(main())
