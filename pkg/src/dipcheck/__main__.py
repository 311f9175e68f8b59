import sys
from dipcheck.cli import main
sys.exit(main())
