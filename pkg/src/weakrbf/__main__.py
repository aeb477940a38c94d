import sys

from weakrbf.cli.main import main

sys.exit(main())
