import sys

from licenserec.cli import main

sys.exit(main())
