import sys

from influence_lab.cli.main import main

sys.exit(main())
