import sys

from nonconvex.cli import main

sys.exit(main())
