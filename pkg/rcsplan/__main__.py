import sys

from rcsplan.main import main

sys.exit(main())
