import sys

from guicorpus.cli.cli import main

sys.exit(main())
