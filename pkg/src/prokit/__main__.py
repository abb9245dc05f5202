import sys

from prokit.cli import main

sys.exit(main())
