import sys

from setlab.cli import main

sys.exit(main())
