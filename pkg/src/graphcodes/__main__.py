import sys

from graphcodes.harness import main

sys.exit(main())
